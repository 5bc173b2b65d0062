"""Time-frequency deformations ``F f(x) = exp(2 pi i omega(x)) f(x - tau(x))``.

Fields are sampled on the signal grid; ``tau`` is measured in domain units
(the torus has side 1) and ``omega`` in cycles. Warping uses multilinear
interpolation with periodic wrap-around.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, HypothesisError
from .signal import Grid, Signal

__all__ = [
    "DeformationField",
    "AdmissibilityVerdict",
    "EnergyVerdict",
    "SmoothFieldModel",
    "jacobian",
    "jacobian_sup_norm",
    "admissibility_threshold",
    "check_admissible",
    "apply_deformation",
    "deformed_energy_bound",
    "interpolation_tolerance",
    "zero_field",
    "translation_field",
    "sinusoidal_field",
    "random_field_model",
    "random_smooth_field",
]


def admissibility_threshold(d: int) -> float:
    return 1.0 / (2 * d)


def interpolation_tolerance(grid: Grid) -> float:
    """Relative slack for interpolated deformations: 1e-3 at n = 128, halving per doubling."""
    return 1e-3 * 128 / grid.n


def jacobian(tau: np.ndarray, grid: Grid) -> np.ndarray:
    """Central-difference Jacobian ``D[i, j] = d tau_i / d x_j``, shape ``(d, d, *grid.shape)``."""
    h = grid.spacing
    rows = []
    for i in range(grid.d):
        rows.append([(np.roll(tau[i], -1, axis=j) - np.roll(tau[i], 1, axis=j)) / (2 * h)
                     for j in range(grid.d)])
    return np.array(rows)


@dataclass(frozen=True, eq=False)
class DeformationField:
    grid: Grid
    tau: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float).reshape((self.grid.d,) + self.grid.shape)
        omega = np.array(self.omega, dtype=float)
        if omega.shape != self.grid.shape:
            raise ConfigurationError(f"omega of shape {omega.shape} does not match {self.grid.shape}")
        if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(omega))):
            raise ValueError("deformation field contains non-finite values")
        tau.flags.writeable = False
        omega.flags.writeable = False
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "omega", omega)

    @cached_property
    def tau_norm(self) -> float:
        """``sup_x |tau(x)|`` with the Euclidean norm."""
        return float(np.sqrt((self.tau ** 2).sum(axis=0)).max())

    @cached_property
    def jacobian(self) -> np.ndarray:
        return jacobian(self.tau, self.grid)

    @cached_property
    def dtau_norm(self) -> float:
        return float(np.abs(self.jacobian).max())

    @cached_property
    def omega_norm(self) -> float:
        return float(np.abs(self.omega).max())

    def scaled(self, tau_factor: float = 1.0, omega_factor: float = 1.0) -> "DeformationField":
        return DeformationField(self.grid, self.tau * tau_factor, self.omega * omega_factor)

    def norms(self) -> dict:
        return {"tau": self.tau_norm, "dtau": self.dtau_norm, "omega": self.omega_norm}


def jacobian_sup_norm(tau, grid: Grid | None = None) -> float:
    """``max |D tau|`` over grid points and matrix entries."""
    if isinstance(tau, DeformationField):
        return tau.dtau_norm
    if grid is None:
        raise ConfigurationError("a grid is needed to differentiate a raw array")
    return float(np.abs(jacobian(np.asarray(tau, dtype=float), grid)).max())


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    dtau_norm: float
    threshold: float
    min_determinant: float
    determinant_floor: float
    determinant_bound_holds: bool

    def __bool__(self):
        return self.admissible


def check_admissible(field: DeformationField, d: int | None = None) -> AdmissibilityVerdict:
    """``||D tau|| <= 1/(2d)`` plus the pointwise bound ``|det(Id - D tau)| >= 1 - d ||D tau||``."""
    d = field.grid.d if d is None else d
    J = field.jacobian
    if field.grid.d == 1:
        det = 1.0 - J[0, 0]
    else:
        det = (1.0 - J[0, 0]) * (1.0 - J[1, 1]) - J[0, 1] * J[1, 0]
    min_det = float(np.abs(det).min())
    floor = 1.0 - d * field.dtau_norm
    threshold = admissibility_threshold(d)
    admissible = field.dtau_norm <= threshold
    return AdmissibilityVerdict(
        admissible=admissible,
        dtau_norm=field.dtau_norm,
        threshold=threshold,
        min_determinant=min_det,
        determinant_floor=floor,
        determinant_bound_holds=bool(min_det >= floor - 1e-12 and (not admissible or floor >= 0.5 - 1e-12)),
    )


def _interpolate_periodic(values: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of ``values`` at fractional sample ``positions`` (shape ``(d, ...)``)."""
    d = values.ndim
    n = values.shape[0]
    base = np.floor(positions)
    frac = positions - base
    base = base.astype(np.int64) % n
    out = np.zeros(positions.shape[1:], dtype=values.dtype)
    for corner in range(2 ** d):
        weight = np.ones(positions.shape[1:])
        index = []
        for axis in range(d):
            bit = (corner >> axis) & 1
            weight = weight * (frac[axis] if bit else 1.0 - frac[axis])
            index.append((base[axis] + bit) % n)
        out = out + weight * values[tuple(index)]
    return out


def apply_deformation(f: Signal, field: DeformationField) -> Signal:
    if f.grid != field.grid:
        raise ConfigurationError(f"field grid {field.grid} does not match signal grid {f.grid}")
    n = f.grid.n
    idx = np.stack(np.meshgrid(*([np.arange(n)] * f.grid.d), indexing="ij")).astype(float)
    warped = _interpolate_periodic(f.values, idx - field.tau * n)
    return Signal(f.grid, np.exp(2j * np.pi * field.omega) * warped)


@dataclass(frozen=True)
class EnergyVerdict:
    ratio: float
    bound: float
    tolerance: float
    passed: bool


def deformed_energy_bound(f: Signal, field: DeformationField,
                          tolerance: float | None = None) -> EnergyVerdict:
    """Check ``||F f||^2 <= 2 ||f||^2`` (relative slack ``tolerance``)."""
    verdict = check_admissible(field)
    if not verdict:
        raise HypothesisError(
            f"inadmissible deformation: ||D tau|| = {verdict.dtau_norm:.4g} > {verdict.threshold:.4g}")
    tolerance = interpolation_tolerance(f.grid) if tolerance is None else tolerance
    energy = f.norm ** 2
    ratio = apply_deformation(f, field).norm ** 2 / energy if energy > 0 else 0.0
    return EnergyVerdict(ratio=ratio, bound=2.0, tolerance=tolerance, passed=ratio <= 2.0 + tolerance)


# -- generators --------------------------------------------------------------

def zero_field(grid: Grid) -> DeformationField:
    return DeformationField(grid, np.zeros((grid.d,) + grid.shape), np.zeros(grid.shape))


def translation_field(grid: Grid, shift, omega: float = 0.0) -> DeformationField:
    """Constant ``tau`` equal to ``shift`` (in samples) times the grid spacing."""
    shift = np.broadcast_to(np.asarray(shift, dtype=float), (grid.d,))
    tau = np.stack([np.full(grid.shape, s * grid.spacing) for s in shift])
    return DeformationField(grid, tau, np.full(grid.shape, float(omega)))


def sinusoidal_field(grid: Grid, alpha: float) -> DeformationField:
    """``tau_i(x) = alpha sin(2 pi x_i) / (2 pi)`` so that ``||D tau|| = alpha``."""
    x = grid.coordinates()
    return DeformationField(grid, alpha * np.sin(2 * np.pi * x) / (2 * np.pi), np.zeros(grid.shape))


class SmoothFieldModel:
    """Trigonometric-polynomial ``tau`` and ``omega`` defined on the whole torus.

    The model can be sampled on any grid, and evaluated exactly at arbitrary
    points, which lets the same deformation be compared across resolutions.
    """

    def __init__(self, d, freqs, tau_cos, tau_sin, omega_cos, omega_sin, tau_offset=None):
        self.d = d
        self.freqs = np.asarray(freqs, dtype=float)          # (m, d)
        self.tau_cos = np.asarray(tau_cos, dtype=float)      # (d, m)
        self.tau_sin = np.asarray(tau_sin, dtype=float)
        self.omega_cos = np.asarray(omega_cos, dtype=float)  # (m,)
        self.omega_sin = np.asarray(omega_sin, dtype=float)
        self.tau_offset = np.zeros(d) if tau_offset is None else np.asarray(tau_offset, dtype=float)

    def _phases(self, points):
        return 2 * np.pi * np.tensordot(self.freqs, points, axes=(1, 0))

    def tau_at(self, points: np.ndarray) -> np.ndarray:
        ph = self._phases(points)
        c, s = np.cos(ph), np.sin(ph)
        out = np.tensordot(self.tau_cos, c, axes=1) + np.tensordot(self.tau_sin, s, axes=1)
        return out + self.tau_offset.reshape((self.d,) + (1,) * (out.ndim - 1))

    def omega_at(self, points: np.ndarray) -> np.ndarray:
        ph = self._phases(points)
        return np.tensordot(self.omega_cos, np.cos(ph), axes=1) + np.tensordot(self.omega_sin, np.sin(ph), axes=1)

    def jacobian_at(self, points: np.ndarray) -> np.ndarray:
        ph = self._phases(points)
        c, s = np.cos(ph), np.sin(ph)
        rows = []
        for i in range(self.d):
            rows.append([np.tensordot(2 * np.pi * self.freqs[:, j] * self.tau_sin[i], c, axes=1)
                         - np.tensordot(2 * np.pi * self.freqs[:, j] * self.tau_cos[i], s, axes=1)
                         for j in range(self.d)])
        return np.array(rows)

    def sample(self, grid: Grid) -> DeformationField:
        if grid.d != self.d:
            raise ConfigurationError(f"model is {self.d}-dimensional, grid is {grid.d}-dimensional")
        x = grid.coordinates()
        return DeformationField(grid, self.tau_at(x), self.omega_at(x))

    def scaled(self, tau_factor: float = 1.0, omega_factor: float = 1.0) -> "SmoothFieldModel":
        return SmoothFieldModel(self.d, self.freqs, self.tau_cos * tau_factor, self.tau_sin * tau_factor,
                                self.omega_cos * omega_factor, self.omega_sin * omega_factor,
                                self.tau_offset * tau_factor)


def _dense_points(d: int) -> np.ndarray:
    m = 4096 if d == 1 else 256
    axis = np.arange(m) / m
    return np.stack(np.meshgrid(*([axis] * d), indexing="ij"))


def random_field_model(d: int, seed: int, dtau: float, omega: float = 0.0,
                       tau: float | None = None, max_freq: int = 2) -> SmoothFieldModel:
    """Random smooth deformation hitting the requested sup norms.

    ``dtau`` sets ``||D tau||`` of the oscillating part; ``tau`` optionally
    raises ``||tau||`` by a constant shift along the first axis; ``omega``
    sets ``||omega||``. Norms are matched on a dense sampling of the torus.
    """
    if dtau < 0 or omega < 0 or (tau is not None and tau < 0):
        raise ConfigurationError("deformation targets must be nonnegative")
    rng = np.random.default_rng(seed)
    grid_1d = range(-max_freq, max_freq + 1)
    if d == 1:
        freqs = [(k,) for k in grid_1d if k > 0]
    else:
        freqs = [(k1, k2) for k1 in grid_1d for k2 in grid_1d if (k1, k2) > (0, 0)]
    freqs = np.array(freqs, dtype=float)
    decay = 1.0 / (1.0 + (freqs ** 2).sum(axis=1))
    m = len(freqs)
    model = SmoothFieldModel(
        d, freqs,
        rng.standard_normal((d, m)) * decay, rng.standard_normal((d, m)) * decay,
        rng.standard_normal(m) * decay, rng.standard_normal(m) * decay)
    pts = _dense_points(d)
    model = model.scaled(
        tau_factor=dtau / np.abs(model.jacobian_at(pts)).max(),
        omega_factor=omega / np.abs(model.omega_at(pts)).max())
    if tau is not None and tau > 0:
        wobble = model.tau_at(pts)
        base = float(np.sqrt((wobble ** 2).sum(axis=0)).max())
        if tau < base * (1 - 1e-9):
            raise ConfigurationError(
                f"||tau|| target {tau:.4g} is below {base:.4g}, the sup of a field with "
                f"||D tau|| = {dtau:.4g} at max_freq={max_freq}")

        def sup_with(c):
            shifted = wobble.copy()
            shifted[0] += c
            return float(np.sqrt((shifted ** 2).sum(axis=0)).max())

        lo, hi = 0.0, tau + base
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if sup_with(mid) < tau else (lo, mid)
        model.tau_offset = np.zeros(d)
        model.tau_offset[0] = 0.5 * (lo + hi)
    return model


def random_smooth_field(grid: Grid, seed: int, dtau: float, omega: float = 0.0,
                        tau: float | None = None, max_freq: int = 2) -> DeformationField:
    return random_field_model(grid.d, seed, dtau, omega, tau, max_freq).sample(grid)
