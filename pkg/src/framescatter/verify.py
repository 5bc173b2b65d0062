"""Executable checks of the invariance and stability guarantees.

Every check returns a :class:`Report` whose ``passed`` flag is the verdict;
reports serialize to flat JSON records for the command line.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .deformation import (DeformationField, SmoothFieldModel, apply_deformation,
                          check_admissible, interpolation_tolerance)
from .errors import ConfigurationError, HypothesisError
from .frames import FrameCollection, smooth_step
from .scattering import B_TOLERANCE, extract_features, feature_distance
from .signal import Grid, Signal, Spectrum, apply_filter, idft, translate

__all__ = [
    "Mollifier",
    "Report",
    "StabilityReport",
    "TrigPolynomial",
    "eta_hat",
    "build_mollifier",
    "bandlimit_project",
    "stability_constant",
    "verify_translation_invariance",
    "verify_lipschitz",
    "verify_nonexpansive",
    "verify_deformation_stability",
    "verify_intermediate_bound",
    "verify_energy_bound",
    "tau_sweep",
    "interpolation_slack",
    "random_bandlimited",
    "digest",
]

C_NOTE = ("C = max{2||grad eta||_1, 4 pi ||eta||_1}; the factor (R||tau|| + ||omega||) "
          "that the printed constant also carries is applied in the bound instead")


def eta_hat(radius):
    """Mollifier profile in frequency: 1 on ``|w| <= 1``, 0 on ``|w| >= 2``, C-infinity between."""
    return 1.0 - smooth_step(np.asarray(radius, dtype=float) - 1.0)


@dataclass(frozen=True, eq=False)
class Mollifier:
    """``gamma(x) = R^d eta(R x)`` on the grid, with the L1 norms of ``eta`` and its gradient."""

    grid: Grid
    R: float

    def __post_init__(self):
        if not 0 < self.R < self.grid.n / 4:
            raise ConfigurationError(
                f"band limit R={self.R} must satisfy 0 < R < n/4 = {self.grid.n / 4}")

    @cached_property
    def gamma_hat(self) -> Spectrum:
        return Spectrum(self.grid, eta_hat(self.grid.frequency_radius() / self.R))

    @cached_property
    def gamma(self) -> Signal:
        return idft(self.gamma_hat)

    @cached_property
    def eta_l1(self) -> float:
        # ||gamma||_1 = ||eta||_1 for every R
        return self.gamma.l1_norm

    @cached_property
    def grad_eta_l1(self) -> float:
        # ||grad gamma||_1 = R ||grad eta||_1
        k = self.grid.frequencies()
        grad = [np.fft.ifftn(2j * np.pi * k[j] * self.gamma_hat.values) / self.grid.cell_volume
                for j in range(self.grid.d)]
        magnitude = np.sqrt(sum(np.abs(g) ** 2 for g in grad))
        return float(magnitude.sum() * self.grid.cell_volume / self.R)


def build_mollifier(grid: Grid, R: float) -> Mollifier:
    return Mollifier(grid, R)


def bandlimit_project(f: Signal, R) -> Signal:
    """``f * gamma``: identity on signals band-limited to radius ``R``."""
    mollifier = R if isinstance(R, Mollifier) else Mollifier(f.grid, R)
    return apply_filter(f, mollifier.gamma_hat)


def stability_constant(mollifier: Mollifier) -> float:
    return max(2 * mollifier.grad_eta_l1, 4 * math.pi * mollifier.eta_l1)


def digest(*items) -> str:
    """Short SHA-256 over signals, fields, arrays and scalars."""
    h = hashlib.sha256()
    for item in items:
        if isinstance(item, Signal):
            item = item.values
        elif isinstance(item, DeformationField):
            h.update(np.ascontiguousarray(item.tau).tobytes())
            item = item.omega
        if isinstance(item, np.ndarray):
            h.update(np.ascontiguousarray(item).tobytes())
        else:
            h.update(repr(item).encode())
    return h.hexdigest()[:16]


@dataclass
class Report:
    name: str
    measured: float
    bound: float
    passed: bool
    seed: int | None = None
    inputs_digest: str = ""
    metadata: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        rec = {
            "name": self.name,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "measured": self.measured,
            "bound": self.bound,
            "pass": bool(self.passed),
        }
        rec.update(self.metadata)
        return rec

    def __bool__(self):
        return bool(self.passed)


@dataclass
class StabilityReport(Report):
    C: float = float("nan")

    def to_record(self) -> dict:
        rec = super().to_record()
        rec["C"] = self.C
        return rec


def _require_b_le_one(collection: FrameCollection) -> None:
    if collection.B > 1 + B_TOLERANCE:
        raise HypothesisError(
            f"upper frame bound B={collection.B:.6g} > 1 violates the stability hypothesis")


def _require_admissible(field_: DeformationField) -> None:
    verdict = check_admissible(field_)
    if not verdict:
        raise HypothesisError(
            f"inadmissible deformation: ||D tau|| = {verdict.dtau_norm:.4g} exceeds "
            f"1/(2d) = {verdict.threshold:.4g}")


def verify_translation_invariance(collection: FrameCollection, f: Signal, shifts: Iterable,
                                  max_depth: int = 2, tol: float = 1e-9,
                                  seed: int | None = None) -> Report:
    """Compare ``Phi(T_t f)`` with ``T_t Phi(f)`` path by path.

    The residual of each path is measured relative to ``|||Phi(f)|||`` so that
    paths carrying almost no energy do not amplify rounding noise.
    """
    shifts = [tuple(np.broadcast_to(np.asarray(t, dtype=int), (f.grid.d,)).tolist()) for t in shifts]
    base = extract_features(collection, f, max_depth)
    scale = base.norm() or 1.0
    worst, worst_total = 0.0, 0.0
    for t in shifts:
        moved = extract_features(collection, translate(f, t), max_depth)
        expected = base.translated(t)
        for q in expected:
            diff = moved[q] - expected[q]
            worst = max(worst, diff.norm / scale)
        worst_total = max(worst_total, feature_distance(moved, expected) / scale)
    return Report("translation_invariance", worst, tol, worst <= tol, seed=seed,
                  inputs_digest=digest(f, shifts, max_depth),
                  metadata={"shifts": [list(t) for t in shifts], "max_depth": max_depth,
                            "aggregate_residual": worst_total, "paths": len(base)})


def verify_lipschitz(collection: FrameCollection, pairs: Sequence[tuple[Signal, Signal]],
                     max_depth: int = 2, atol: float = 1e-9, seed: int | None = None) -> Report:
    """``|||Phi(f) - Phi(h)||| <= sqrt(B) ||f - h||`` for every pair; reports the worst ratio."""
    sqrt_b = math.sqrt(collection.B)
    worst_ratio, worst_excess, ok = 0.0, -math.inf, True
    for f, h in pairs:
        dist = feature_distance(extract_features(collection, f, max_depth),
                                extract_features(collection, h, max_depth))
        bound = sqrt_b * (f - h).norm
        ok &= dist <= bound + atol
        worst_excess = max(worst_excess, dist - bound)
        if bound > 0:
            worst_ratio = max(worst_ratio, dist / bound)
    return Report("lipschitz", worst_ratio, 1.0, bool(ok), seed=seed,
                  inputs_digest=digest(*[s for p in pairs for s in p], max_depth),
                  metadata={"pairs": len(pairs), "sqrt_B": sqrt_b, "max_depth": max_depth,
                            "worst_excess": worst_excess})


def verify_nonexpansive(collection: FrameCollection, signals: Sequence[Signal],
                        max_depth: int = 2, atol: float = 1e-9, seed: int | None = None) -> Report:
    """``|||Phi(f)||| <= sqrt(B) ||f||`` (Lipschitz bound against ``h = 0``)."""
    sqrt_b = math.sqrt(collection.B)
    worst_ratio, ok = 0.0, True
    for f in signals:
        value = extract_features(collection, f, max_depth).norm()
        ok &= value <= sqrt_b * f.norm + atol
        if f.norm > 0:
            worst_ratio = max(worst_ratio, value / (sqrt_b * f.norm))
    return Report("nonexpansive", worst_ratio, 1.0, bool(ok), seed=seed,
                  inputs_digest=digest(*signals, max_depth),
                  metadata={"signals": len(signals), "sqrt_B": sqrt_b, "max_depth": max_depth})


def _deformation_bound(mollifier: Mollifier, field_: DeformationField, f_norm: float) -> tuple[float, float]:
    C = stability_constant(mollifier)
    return C, C * (mollifier.R * field_.tau_norm + field_.omega_norm) * f_norm


def verify_deformation_stability(collection: FrameCollection, f: Signal, field: DeformationField,
                                 R: float, max_depth: int = 2, tolerance: float | None = None,
                                 seed: int | None = None,
                                 mollifier: Mollifier | None = None) -> StabilityReport:
    """``|||Phi(f) - Phi(F f)||| <= C (R ||tau|| + ||omega||) ||f||`` on the band-limited part of ``f``."""
    _require_b_le_one(collection)
    _require_admissible(field)
    mollifier = mollifier or Mollifier(f.grid, R)
    f_r = bandlimit_project(f, mollifier)
    deformed = apply_deformation(f_r, field)
    measured = feature_distance(extract_features(collection, f_r, max_depth),
                                extract_features(collection, deformed, max_depth))
    C, bound = _deformation_bound(mollifier, field, f_r.norm)
    tol = (interpolation_tolerance(f.grid) if tolerance is None else tolerance) * f_r.norm
    return StabilityReport(
        "deformation_stability", measured, bound, measured <= bound + tol, seed=seed,
        inputs_digest=digest(f, field, R, max_depth), C=C,
        metadata={"R": R, "max_depth": max_depth, "tolerance": tol, "f_norm": f_r.norm,
                  **{f"{k}_norm": v for k, v in field.norms().items()}, "note": C_NOTE})


def verify_intermediate_bound(f: Signal, field: DeformationField, R: float,
                              tolerance: float | None = None, seed: int | None = None,
                              mollifier: Mollifier | None = None) -> StabilityReport:
    """Signal-level bound ``||f - F f|| <= C (R ||tau|| + ||omega||) ||f||`` for band-limited ``f``."""
    _require_admissible(field)
    mollifier = mollifier or Mollifier(f.grid, R)
    f_r = bandlimit_project(f, mollifier)
    measured = (f_r - apply_deformation(f_r, field)).norm
    C, bound = _deformation_bound(mollifier, field, f_r.norm)
    tol = (interpolation_tolerance(f.grid) if tolerance is None else tolerance) * f_r.norm
    return StabilityReport(
        "intermediate_bound", measured, bound, measured <= bound + tol, seed=seed,
        inputs_digest=digest(f, field, R), C=C,
        metadata={"R": R, "tolerance": tol, "f_norm": f_r.norm,
                  "ratio": measured / bound if bound > 0 else 0.0,
                  **{f"{k}_norm": v for k, v in field.norms().items()}})


def verify_energy_bound(f: Signal, field: DeformationField, tolerance: float = 1e-3,
                        seed: int | None = None) -> Report:
    """``||F f||^2 <= 2 ||f||^2`` for admissible fields (relative slack ``tolerance``)."""
    _require_admissible(field)
    energy = f.norm ** 2
    measured = apply_deformation(f, field).norm ** 2 / energy if energy > 0 else 0.0
    return Report("energy_bound", measured, 2.0, measured <= 2.0 + tolerance, seed=seed,
                  inputs_digest=digest(f, field), metadata={"tolerance": tolerance})


def tau_sweep(collection: FrameCollection, f: Signal, field: DeformationField, R: float,
              factors: Sequence[float], max_depth: int = 2) -> list[dict]:
    """Bound and measured distance for ``tau`` scaled by each factor (``omega`` kept)."""
    mollifier = Mollifier(f.grid, R)
    rows = []
    for s in sorted(factors):
        scaled = field.scaled(tau_factor=s)
        rep = verify_deformation_stability(collection, f, scaled, R, max_depth, mollifier=mollifier)
        rows.append({"factor": s, "tau_norm": scaled.tau_norm, "dtau_norm": scaled.dtau_norm,
                     "bound": rep.bound, "measured": rep.measured})
    return rows


class TrigPolynomial:
    """Band-limited function ``sum_k c_k exp(2 pi i <k, x>)`` on the torus."""

    def __init__(self, freqs, coeffs):
        self.freqs = np.asarray(freqs, dtype=float)   # (m, d)
        self.coeffs = np.asarray(coeffs, dtype=complex)

    @property
    def d(self) -> int:
        return self.freqs.shape[1]

    def at(self, points: np.ndarray) -> np.ndarray:
        phase = 2 * np.pi * np.tensordot(self.freqs, points, axes=(1, 0))
        return np.tensordot(self.coeffs, np.exp(1j * phase), axes=1)

    def sample(self, grid: Grid) -> Signal:
        return Signal(grid, self.at(grid.coordinates()))

    def deformed(self, model: SmoothFieldModel, grid: Grid) -> Signal:
        """Exact ``exp(2 pi i omega(x)) f(x - tau(x))`` at the grid points."""
        x = grid.coordinates()
        return Signal(grid, np.exp(2j * np.pi * model.omega_at(x)) * self.at(x - model.tau_at(x)))


def random_bandlimited(d: int, R: float, seed: int) -> TrigPolynomial:
    """Random trigonometric polynomial with frequencies in the closed ball of radius ``R``, unit L2 norm."""
    rng = np.random.default_rng(seed)
    r = int(math.floor(R))
    axis = range(-r, r + 1)
    if d == 1:
        freqs = [(k,) for k in axis]
    else:
        freqs = [(k1, k2) for k1 in axis for k2 in axis if k1 * k1 + k2 * k2 <= R * R]
    freqs = np.array(freqs, dtype=float)
    coeffs = rng.standard_normal(len(freqs)) + 1j * rng.standard_normal(len(freqs))
    return TrigPolynomial(freqs, coeffs / np.linalg.norm(coeffs))


def interpolation_slack(collection: FrameCollection, poly: TrigPolynomial, model: SmoothFieldModel,
                        max_depth: int = 2) -> float:
    """Feature-level error caused by interpolating the deformation, relative to ``||f||``.

    By the triangle inequality this bounds how much interpolation can move the
    measured stability distance.
    """
    grid = collection.grid
    f = poly.sample(grid)
    field_ = model.sample(grid)
    interpolated = extract_features(collection, apply_deformation(f, field_), max_depth)
    exact = extract_features(collection, poly.deformed(model, grid), max_depth)
    return feature_distance(interpolated, exact) / f.norm
