"""Semi-discrete frames authored in the frequency domain.

A frame is a finite list of atoms, each stored as its Fourier coefficients
on the grid, plus the index of the output-generating atom. Frame bounds are
certified through the Littlewood-Paley sum ``sum_k |atom_k(w)|**2``, whose
minimum and maximum over the grid frequencies are exactly the bounds of the
discretized frame.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, NotAFrameError
from .fileio import read_spectrum, write_spectrum
from .signal import Grid, Signal, Spectrum, dft, idft

__all__ = [
    "Atom",
    "SemiDiscreteFrame",
    "FrameCollection",
    "littlewood_paley_sum",
    "littlewood_paley",
    "analyze",
    "frame_operator",
    "tighten_to_parseval",
    "normalize_to_bound",
    "build_wavelet_frame",
    "build_gabor_frame",
    "build_shearlet_frame",
    "save_frame",
    "load_frame",
    "NOT_A_FRAME_RATIO",
]

# A below NOT_A_FRAME_RATIO * B is treated as a zero lower bound.
NOT_A_FRAME_RATIO = 1e-8


@dataclass(frozen=True, eq=False)
class Atom:
    label: tuple
    freq_response: Spectrum

    @property
    def grid(self) -> Grid:
        return self.freq_response.grid

    @cached_property
    def spatial(self) -> Signal:
        return idft(self.freq_response)

    @cached_property
    def l1_norm(self) -> float:
        """L1 norm of the space-domain atom (Young's inequality constant)."""
        return self.spatial.l1_norm

    def scaled(self, factor) -> "Atom":
        return Atom(self.label, Spectrum(self.grid, self.freq_response.values * factor))


def _common_grid(atoms: Sequence[Atom]) -> Grid:
    if not atoms:
        raise ConfigurationError("a frame needs at least one atom")
    grid = atoms[0].grid
    for a in atoms[1:]:
        if a.grid != grid:
            raise ConfigurationError(f"atom {a.label} lives on {a.grid}, expected {grid}")
    return grid


def littlewood_paley_sum(atoms: Sequence[Atom]) -> np.ndarray:
    _common_grid(atoms)
    return np.sum([np.abs(a.freq_response.values) ** 2 for a in atoms], axis=0)


def littlewood_paley(atoms: Sequence[Atom]) -> tuple[float, float]:
    """Frame bounds ``(A, B)`` as the extrema of the Littlewood-Paley sum.

    Raises
    ------
    NotAFrameError
        If ``A < NOT_A_FRAME_RATIO * B``.
    """
    lp = littlewood_paley_sum(atoms)
    A, B = float(lp.min()), float(lp.max())
    if not A >= NOT_A_FRAME_RATIO * B or B <= 0:
        where = np.unravel_index(int(np.argmin(lp)), lp.shape)
        freq = tuple(int(v) for v in atoms[0].grid.frequencies()[(slice(None),) + where])
        raise NotAFrameError(
            f"not a frame: Littlewood-Paley minimum {A:.3e} at frequency {freq} "
            f"(maximum {B:.3e})")
    return A, B


@dataclass(frozen=True, eq=False)
class SemiDiscreteFrame:
    """Certified frame; construction fails with :class:`NotAFrameError`."""

    atoms: tuple
    output_index: int = 0
    bounds: tuple = field(init=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        _common_grid(atoms)
        if not 0 <= self.output_index < len(atoms):
            raise ConfigurationError(
                f"output_index {self.output_index} out of range for {len(atoms)} atoms")
        object.__setattr__(self, "bounds", littlewood_paley(atoms))

    @property
    def grid(self) -> Grid:
        return self.atoms[0].grid

    @property
    def A(self) -> float:
        return self.bounds[0]

    @property
    def B(self) -> float:
        return self.bounds[1]

    @property
    def output_atom(self) -> Atom:
        return self.atoms[self.output_index]

    @property
    def path_indices(self) -> list[int]:
        """Atom indices usable as path entries (everything but the output atom)."""
        return [i for i in range(len(self.atoms)) if i != self.output_index]

    @cached_property
    def responses(self) -> np.ndarray:
        """All frequency responses stacked, shape ``(n_atoms, *grid.shape)``."""
        arr = np.stack([a.freq_response.values for a in self.atoms])
        arr.flags.writeable = False
        return arr

    def is_parseval(self, tol: float = 1e-9) -> bool:
        return abs(self.A - 1) <= tol and abs(self.B - 1) <= tol

    def tightened(self) -> "SemiDiscreteFrame":
        return SemiDiscreteFrame(tighten_to_parseval(self.atoms), self.output_index)

    def normalized(self, B_target: float = 1.0) -> "SemiDiscreteFrame":
        return SemiDiscreteFrame(normalize_to_bound(self.atoms, B_target), self.output_index)

    def with_output(self, index: int) -> "SemiDiscreteFrame":
        return SemiDiscreteFrame(self.atoms, index)

    def __len__(self):
        return len(self.atoms)


class FrameCollection:
    """Per-layer frames; layers beyond the given ones reuse the last frame."""

    def __init__(self, layers: Sequence[SemiDiscreteFrame]):
        layers = tuple(layers)
        if not layers:
            raise ConfigurationError("a frame collection needs at least one layer")
        grid = layers[0].grid
        for frame in layers[1:]:
            if frame.grid != grid:
                raise ConfigurationError("all layers of a collection must share one grid")
        self.layers = layers

    @property
    def grid(self) -> Grid:
        return self.layers[0].grid

    def layer(self, n: int) -> SemiDiscreteFrame:
        """Frame of network layer ``n`` (1-based)."""
        if n < 1:
            raise ValueError(f"layers are numbered from 1, got {n}")
        return self.layers[min(n, len(self.layers)) - 1]

    @property
    def A(self) -> float:
        return min(frame.A for frame in self.layers)

    @property
    def B(self) -> float:
        return max(frame.B for frame in self.layers)

    def normalized(self, B_target: float = 1.0) -> "FrameCollection":
        return FrameCollection(
            [frame.normalized(B_target) if frame.B > B_target else frame for frame in self.layers])

    def __repr__(self):
        return f"FrameCollection({len(self.layers)} layers, A={self.A:.6g}, B={self.B:.6g})"


def analyze(frame: SemiDiscreteFrame, f: Signal) -> list[Signal]:
    """``[f * atom for atom in frame]``, output-generating atom included."""
    if f.grid != frame.grid:
        raise ConfigurationError(f"signal grid {f.grid} does not match frame grid {frame.grid}")
    F = dft(f).values
    return [idft(Spectrum(f.grid, F * r)) for r in frame.responses]


def frame_operator(frame: SemiDiscreteFrame, f: Signal) -> Signal:
    if f.grid != frame.grid:
        raise ConfigurationError(f"signal grid {f.grid} does not match frame grid {frame.grid}")
    lp = littlewood_paley_sum(frame.atoms)
    return idft(Spectrum(f.grid, dft(f).values * lp))


def tighten_to_parseval(atoms: Sequence[Atom]) -> list[Atom]:
    """Divide every response by ``sqrt`` of the Littlewood-Paley sum."""
    littlewood_paley(atoms)
    scale = 1.0 / np.sqrt(littlewood_paley_sum(atoms))
    return [a.scaled(scale) for a in atoms]


def normalize_to_bound(atoms: Sequence[Atom], B_target: float = 1.0) -> list[Atom]:
    """Uniformly rescale so that the upper bound equals ``B_target``."""
    if not 0 < B_target <= 1:
        raise ConfigurationError(f"B_target must lie in (0, 1], got {B_target}")
    _, B = littlewood_paley(atoms)
    return [a.scaled(math.sqrt(B_target / B)) for a in atoms]


# -- window profiles ---------------------------------------------------------

def smooth_step(t):
    """C-infinity transition from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def _bump(x):
    """Window supported on [-1, 1]; shifted copies at integer spacing have
    squares summing to one."""
    x = np.asarray(x, dtype=float)
    rising = np.sin(0.5 * np.pi * smooth_step(x + 1.0))
    falling = np.cos(0.5 * np.pi * smooth_step(x))
    return np.where(x <= 0, rising, falling) * (np.abs(x) < 1)


def _octave_bands(radius: np.ndarray, top: float, J: int):
    """Low-pass and ``J`` dyadic band windows in ``log2(radius)``.

    Band ``j`` (``j = 0, -1, ..., -J+1``) is centred at ``2**(top + j)``; the
    finest band stays at one beyond its centre so it covers everything up to
    the grid corners.
    """
    with np.errstate(divide="ignore"):
        logr = np.log2(radius)
    bands = {}
    for j in range(0, -J, -1):
        x = logr - (top + j)
        w = _bump(x)
        if j == 0:
            w = np.where(x > 0, 1.0, w)
        bands[j] = w
    x = logr - (top - J + 1)
    low = np.where(x <= -1, 1.0, np.cos(0.5 * np.pi * smooth_step(x + 1.0)))
    low = np.where(x >= 0, 0.0, low)
    return low, bands


def _periodic_windows(theta: np.ndarray, count: int, period: float, offset: float = 0.0):
    """``count`` windows on a circle of length ``period`` whose squares sum to one."""
    if count == 1:
        return [np.ones_like(theta)]
    spacing = period / count
    out = []
    for k in range(count):
        centre = offset + k * spacing
        x = (theta - centre + period / 2) % period - period / 2
        out.append(_bump(x / spacing))
    return out


# -- constructors ------------------------------------------------------------

def _finish(atoms, output_index, tighten):
    frame = SemiDiscreteFrame(atoms, output_index)
    return frame.tightened() if tighten else frame


def build_wavelet_frame(grid: Grid, J: int, K: int = 1, tighten: bool = True) -> SemiDiscreteFrame:
    """Directional dyadic wavelet bank with a low-pass output atom.

    Atoms carry labels ``("psi", j, k)`` with scale ``j`` in ``-J+1 .. 0``
    (``0`` is the octave just below Nyquist) and direction ``k`` in
    ``1 .. K``; the low-pass ``("phi", J)`` sits at index 0. In one dimension
    ``K`` may be 1 (symmetric bands) or 2 (positive and negative frequencies).
    """
    if J < 1:
        raise ConfigurationError(f"J must be >= 1, got {J}")
    max_J = int(math.log2(grid.n)) - 1
    if J > max_J:
        raise ConfigurationError(
            f"J={J} too large for n={grid.n}: coarsest band would drop below frequency 2 "
            f"(maximum J is {max_J})")
    if K < 1 or (grid.d == 1 and K > 2):
        raise ConfigurationError(f"invalid number of directions K={K} for d={grid.d}")

    freqs = grid.frequencies()
    radius = grid.frequency_radius()
    top = math.log2(grid.n / 2)
    low, bands = _octave_bands(radius, top, J)
    if grid.d == 1:
        theta = np.where(freqs[0] < 0, np.pi, 0.0)
    else:
        theta = np.arctan2(freqs[1], freqs[0])
    angular = _periodic_windows(theta, K, 2 * np.pi)

    atoms = [Atom(("phi", J), Spectrum(grid, low))]
    for j in sorted(bands, reverse=True):
        for k, w in enumerate(angular, start=1):
            atoms.append(Atom(("psi", j, k), Spectrum(grid, bands[j] * w)))
    return _finish(atoms, 0, tighten)


def _periodized_gaussian(k: np.ndarray, centre: float, width: float, n: int) -> np.ndarray:
    reach = math.sqrt(2 * math.log(1e16)) * width
    periods = int(math.ceil(reach / n)) + 1
    out = np.zeros_like(k, dtype=float)
    for m in range(-periods, periods + 1):
        out += np.exp(-((k - centre - m * n) ** 2) / (2 * width ** 2))
    out[out < 1e-16] = 0.0
    return out


def build_gabor_frame(grid: Grid, frequency_step: int, width: float | None = None,
                      tighten: bool = True) -> SemiDiscreteFrame:
    """Gaussian windows centred on the lattice ``frequency_step * Z^d``.

    ``width`` is the standard deviation of each window in frequency units
    (default ``frequency_step / 2``). The atom centred at frequency 0 is the
    output-generating atom.
    """
    step = int(frequency_step)
    if step < 1 or step > grid.n or grid.n % step:
        raise ConfigurationError(
            f"frequency_step must divide n={grid.n} and not exceed it, got {frequency_step}")
    width = step / 2 if width is None else float(width)
    if width <= 0:
        raise ConfigurationError(f"width must be positive, got {width}")

    freqs = grid.frequencies()
    half = grid.n // (2 * step)
    centres_1d = [m for m in range(-half, max(half, 1))]
    if grid.d == 1:
        lattice = [(m,) for m in centres_1d]
    else:
        lattice = [(m1, m2) for m1 in centres_1d for m2 in centres_1d]

    atoms = []
    output_index = 0
    for idx, m in enumerate(lattice):
        resp = np.ones(grid.shape)
        for axis, mi in enumerate(m):
            resp = resp * _periodized_gaussian(freqs[axis], mi * step, width, grid.n)
        if all(mi == 0 for mi in m):
            output_index = idx
        atoms.append(Atom(("gabor",) + tuple(m), Spectrum(grid, resp)))
    return _finish(atoms, output_index, tighten)


def shear_counts(scales: int, shears: int) -> list[int]:
    """Shears per cone at each scale, coarsest first: doubling with scale."""
    return [shears * 2 ** s for s in range(scales)]


def build_shearlet_frame(grid: Grid, scales: int, shears_per_scale: int = 1,
                         tighten: bool = True) -> SemiDiscreteFrame:
    """Cone-adapted shearlet-style tiling of the 2-D frequency plane.

    Square dyadic coronae (max-norm radius) are split between a horizontal
    and a vertical cone; at scale index ``s`` (0 = coarsest) each cone gets
    ``shears_per_scale * 2**s`` slope windows. Windows that straddle the
    diagonals blend smoothly between cones. Labels are
    ``("shearlet", s, cone, l)``; the square low-pass sits at index 0.
    """
    if grid.d != 2:
        raise ConfigurationError("shearlet frames are defined for d = 2 only")
    if scales < 1 or shears_per_scale < 1:
        raise ConfigurationError("scales and shears_per_scale must be >= 1")
    max_scales = int(math.log2(grid.n)) - 1
    if scales > max_scales:
        raise ConfigurationError(f"at most {max_scales} scales fit n={grid.n}")

    k1, k2 = grid.frequencies()
    square_radius = np.maximum(np.abs(k1), np.abs(k2))
    top = math.log2(grid.n / 2)
    low, bands = _octave_bands(square_radius, top, scales)

    with np.errstate(divide="ignore", invalid="ignore"):
        horizontal = np.abs(k2) <= np.abs(k1)
        slope_h = np.where(horizontal & (k1 != 0), k2 / np.where(k1 == 0, 1, k1), 0.0)
        slope_v = np.where(~horizontal, k1 / np.where(k2 == 0, 1, k2), 0.0)
    # continuous periodic coordinate of the direction: [0, 2] horizontal cone, [2, 4] vertical
    t = np.where(horizontal, 1.0 + slope_h, 3.0 - slope_v)

    atoms = [Atom(("lowpass", scales), Spectrum(grid, low))]
    counts = shear_counts(scales, shears_per_scale)
    for s, j in enumerate(sorted(bands)):
        count = counts[s]
        spacing = 2.0 / count
        windows = _periodic_windows(t, 2 * count, 4.0, offset=spacing / 2)
        for idx, w in enumerate(windows):
            cone = "h" if idx < count else "v"
            atoms.append(Atom(("shearlet", s, cone, idx % count), Spectrum(grid, bands[j] * w)))
    return _finish(atoms, 0, tighten)


# -- bank files --------------------------------------------------------------

def save_frame(frame: SemiDiscreteFrame, directory) -> Path:
    """Write ``manifest.json`` plus one raw spectrum file per atom."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records = []
    for i, atom in enumerate(frame.atoms):
        name = f"atom_{i:04d}.fsct"
        write_spectrum(directory / name, atom.freq_response)
        records.append({"label": list(atom.label), "file": name})
    manifest = {
        "format": "framescatter-bank",
        "version": 1,
        "grid": {"d": frame.grid.d, "n": frame.grid.n},
        "layout": "fft-order",
        "output_index": frame.output_index,
        "bounds": {"A": frame.A, "B": frame.B},
        "atoms": records,
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return path


def load_frame(directory) -> SemiDiscreteFrame:
    """Read a bank written by :func:`save_frame`; bounds are re-certified."""
    directory = Path(directory)
    try:
        manifest = json.loads((directory / "manifest.json").read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{directory}/manifest.json: {exc}") from exc
    grid = Grid(manifest["grid"]["d"], manifest["grid"]["n"])
    atoms = []
    for rec in manifest["atoms"]:
        spectrum = read_spectrum(directory / rec["file"])
        if spectrum.grid != grid:
            raise ConfigurationError(f"{rec['file']}: grid {spectrum.grid} != manifest {grid}")
        atoms.append(Atom(tuple(rec["label"]), spectrum))
    return SemiDiscreteFrame(atoms, int(manifest["output_index"]))
