"""
Building and certifying frames
==============================

Three filter banks on the same grid, their Littlewood-Paley bounds before and
after tightening, and a bank written to disk and read back.
"""
import tempfile

import numpy as np

from framescatter import Grid, Signal
from framescatter.frames import (analyze, build_gabor_frame, build_shearlet_frame,
                                 build_wavelet_frame, load_frame, save_frame)

grid = Grid(2, 64)

# Untightened banks show their raw ripple; the Gabor one is visibly non-tight
for name, build in [("wavelet", lambda t: build_wavelet_frame(grid, J=4, K=4, tighten=t)),
                    ("gabor", lambda t: build_gabor_frame(grid, 16, tighten=t)),
                    ("shearlet", lambda t: build_shearlet_frame(grid, scales=3, tighten=t))]:
    raw, tight = build(False), build(True)
    print(f"{name:9s} atoms={len(raw.atoms):3d}  raw A={raw.A:.6f} B={raw.B:.6f}  "
          f"tight A={tight.A:.12f} B={tight.B:.12f}")

# Parseval means the analysis keeps all the energy of a signal
frame = build_wavelet_frame(grid, J=4, K=4)
f = Signal.random(grid, np.random.default_rng(0))
energy = sum(s.norm ** 2 for s in analyze(frame, f))
print(f"sum ||f * g||^2 = {energy:.12f}   ||f||^2 = {f.norm ** 2:.12f}")

# Scaling to a smaller upper bound keeps the ratio B/A
half = frame.normalized(0.5)
print(f"normalized to B=0.5: A={half.A:.6f} B={half.B:.6f}")

# Banks round-trip through a manifest plus one raw spectrum per atom
with tempfile.TemporaryDirectory() as tmp:
    save_frame(frame, tmp)
    back = load_frame(tmp)
    print(f"reloaded {len(back.atoms)} atoms, bounds {back.bounds}, "
          f"output atom {back.output_atom.label}")
