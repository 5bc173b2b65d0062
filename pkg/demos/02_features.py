"""
Scattering features over a frame collection
===========================================

Different frames per layer, path enumeration, and how the feature energy
spreads over depth. Pruning trades a little energy for far fewer paths.
"""
import numpy as np

from framescatter import Grid, Signal
from framescatter.frames import FrameCollection, build_gabor_frame, build_shearlet_frame, build_wavelet_frame
from framescatter.scattering import enumerate_paths, extract_features, hm_norm_partial

grid = Grid(2, 64)
x, y = grid.coordinates()

# A smooth blob with an oriented ripple
f = Signal(grid, np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.02) * (1 + 0.5 * np.cos(2 * np.pi * 12 * (x + y))))

# Layer 1 Gabor, layer 2 wavelets, deeper layers shearlets
collection = FrameCollection([
    build_gabor_frame(grid, 16),
    build_wavelet_frame(grid, J=4, K=4),
    build_shearlet_frame(grid, scales=3),
])
print(f"collection bounds A={collection.A:.6f} B={collection.B:.6f}")
print(f"paths up to depth 3: {len(enumerate_paths(collection, 3))}")

features = extract_features(collection, f, max_depth=3)
print(f"|||Phi(f)||| = {features.norm():.6f}   ||f|| = {f.norm:.6f}")
for depth, energy in sorted(features.energy_by_depth().items()):
    print(f"  depth {depth}: energy {energy:.3e}")

for rel in [0.0, 0.01, 0.05, 0.1]:
    pruned = extract_features(collection, f, max_depth=3, prune_rel=rel)
    print(f"prune_rel={rel:<5} paths={len(pruned):5d} |||Phi(f)|||={pruned.norm():.6f}")

# Partial sums of ||U[q] f|| keep growing with depth
print("truncated H_M sums:", [round(hm_norm_partial(collection, f, m), 4) for m in range(4)])
