"""
Translation invariance and the Lipschitz bound
==============================================

Shifting the input shifts every feature map by the same amount, and the
distance between feature sets never exceeds the distance between inputs.
"""
import numpy as np

from framescatter import Grid, Signal, translate
from framescatter.frames import FrameCollection, build_wavelet_frame
from framescatter.scattering import extract_features, feature_distance
from framescatter.verify import verify_lipschitz, verify_translation_invariance

grid = Grid(2, 64)
collection = FrameCollection([build_wavelet_frame(grid, J=4, K=4)])
rng = np.random.default_rng(1)
f = Signal.random(grid, rng)

# Translate-then-extract against extract-then-translate
shifts = [(3, 0), (-7, 12), (31, 31)]
report = verify_translation_invariance(collection, f, shifts, max_depth=2)
print(f"worst per-path residual {report.measured:.2e} (pass: {report.passed})")

# The features of a shifted input are not the features of the input;
# invariance is equivariance of the maps, which the residual above measures
moved = extract_features(collection, translate(f, (5, 5)), 2)
print(f"distance between Phi(f) and Phi(T f): {feature_distance(extract_features(collection, f, 2), moved):.4f}")

pairs = [(Signal.random(grid, rng), Signal.random(grid, rng)) for _ in range(10)]
lip = verify_lipschitz(collection, pairs, max_depth=2)
print(f"worst |||Phi(f) - Phi(h)||| / ||f - h|| = {lip.measured:.4f} (sqrt B = {lip.metadata['sqrt_B']:.4f})")
