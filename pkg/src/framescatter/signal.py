"""Periodic grid signals and the basic operator vocabulary.

Signals live on the unit torus ``[0, 1)^d`` sampled at ``n`` points per axis.
All norms and integrals carry the quadrature weight ``spacing**d`` so that the
numbers track their continuous counterparts as ``n`` grows. Spectra are the
Fourier-series coefficients on the integer frequencies, stored in numpy FFT
order (index 0 is frequency 0), and the transform pair is unitary:
``norm(f) == norm(dft(f))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "Grid",
    "Signal",
    "Spectrum",
    "dft",
    "idft",
    "circular_convolve",
    "apply_filter",
    "translate",
    "modulate",
    "involute",
    "inner",
    "delta",
    "feature_norm",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[0, 1)^d``."""

    d: int
    n: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ConfigurationError(f"grid dimension must be 1 or 2, got {self.d}")
        if self.n < 4 or self.n & (self.n - 1):
            raise ConfigurationError(
                f"samples per axis must be a power of two >= 4, got {self.n}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.d

    def coordinates(self) -> np.ndarray:
        """Sample positions, shape ``(d, n, ..., n)``."""
        axis = np.arange(self.n) * self.spacing
        return np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"))

    def frequencies(self) -> np.ndarray:
        """Integer frequency of every spectral bin, shape ``(d, n, ..., n)``.

        Values lie in ``[-n/2, n/2)`` and follow FFT ordering.
        """
        k = np.fft.fftfreq(self.n, d=1.0 / self.n)
        return np.stack(np.meshgrid(*([k] * self.d), indexing="ij"))

    def frequency_radius(self) -> np.ndarray:
        return np.sqrt((self.frequencies() ** 2).sum(axis=0))


def _as_grid_array(grid: Grid, values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.shape != grid.shape:
        raise ConfigurationError(
            f"{what} of shape {arr.shape} does not match grid shape {grid.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Complex samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _as_grid_array(self.grid, self.values, "signal")
        if not np.all(np.isfinite(arr)):
            raise ValueError("signal contains non-finite values")
        object.__setattr__(self, "values", arr)

    @cached_property
    def norm(self) -> float:
        """L2 norm with the grid quadrature weight."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))

    @cached_property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.grid.cell_volume)

    def __add__(self, other: "Signal") -> "Signal":
        _check_same_grid(self, other)
        return Signal(self.grid, self.values + other.values)

    def __sub__(self, other: "Signal") -> "Signal":
        _check_same_grid(self, other)
        return Signal(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "Signal":
        return Signal(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __abs__(self) -> "Signal":
        return Signal(self.grid, np.abs(self.values))

    @classmethod
    def zeros(cls, grid: Grid) -> "Signal":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    @classmethod
    def random(cls, grid: Grid, rng: np.random.Generator, real: bool = False) -> "Signal":
        """Standard Gaussian samples; handy for property checks."""
        values = rng.standard_normal(grid.shape)
        if not real:
            values = values + 1j * rng.standard_normal(grid.shape)
        return cls(grid, values)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients on the integer frequencies of a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _as_grid_array(self.grid, self.values, "spectrum")
        if not np.all(np.isfinite(arr)):
            raise ValueError("spectrum contains non-finite values")
        object.__setattr__(self, "values", arr)

    @cached_property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))


def _check_same_grid(*items) -> None:
    grid = items[0].grid
    for item in items[1:]:
        if item.grid != grid:
            raise ConfigurationError(f"grid mismatch: {grid} vs {item.grid}")


def dft(f: Signal) -> Spectrum:
    return Spectrum(f.grid, np.fft.fftn(f.values) * f.grid.cell_volume)


def idft(spectrum: Spectrum) -> Signal:
    return Signal(spectrum.grid, np.fft.ifftn(spectrum.values) / spectrum.grid.cell_volume)


def apply_filter(f: Signal, response: Spectrum) -> Signal:
    """Convolve ``f`` with the filter whose Fourier coefficients are ``response``."""
    _check_same_grid(f, response)
    return idft(Spectrum(f.grid, dft(f).values * response.values))


def circular_convolve(f: Signal, g: Signal) -> Signal:
    """Periodic convolution ``(f * g)(y) = integral of f(x) g(y - x) dx``."""
    _check_same_grid(f, g)
    return apply_filter(f, dft(g))


def translate(f: Signal, t: Sequence[int] | int) -> Signal:
    """``T_t f(x) = f(x - t)`` for an integer shift measured in samples."""
    shift = _int_vector(t, f.grid.d, "shift")
    return Signal(f.grid, np.roll(f.values, shift, axis=tuple(range(f.grid.d))))


def modulate(f: Signal, k: Sequence[int] | int) -> Signal:
    """``M_k f(x) = exp(2 pi i <x, k>) f(x)`` for an integer frequency ``k``."""
    freq = np.asarray(_int_vector(k, f.grid.d, "frequency"), dtype=float)
    x = f.grid.coordinates()
    phase = np.tensordot(freq, x, axes=1)
    return Signal(f.grid, np.exp(2j * np.pi * phase) * f.values)


def involute(f: Signal) -> Signal:
    """``(I f)(x) = conj(f(-x))`` with indices taken modulo ``n``."""
    values = f.values
    for axis in range(f.grid.d):
        values = np.roll(np.flip(values, axis=axis), 1, axis=axis)
    return Signal(f.grid, np.conj(values))


def inner(f: Signal, g: Signal) -> complex:
    """``<f, g> = integral of f conj(g)``."""
    _check_same_grid(f, g)
    return complex(np.sum(f.values * np.conj(g.values)) * f.grid.cell_volume)


def delta(grid: Grid, at: Sequence[int] | int = 0) -> Signal:
    """Unit-mass impulse: the identity element of :func:`circular_convolve`."""
    values = np.zeros(grid.shape, dtype=complex)
    values[(0,) * grid.d] = 1.0 / grid.cell_volume
    return translate(Signal(grid, values), at)


def feature_norm(features: Mapping | Iterable[Signal]) -> float:
    """``(sum of squared L2 norms)**0.5`` over a collection of signals."""
    members = features.values() if isinstance(features, Mapping) else features
    members = list(members)
    if not members:
        return 0.0
    grid = members[0].grid
    total = 0.0
    for s in members:
        if s.grid != grid:
            raise ConfigurationError("feature members live on different grids")
        total += s.norm ** 2
    return float(np.sqrt(total))


def _int_vector(v, d: int, what: str) -> tuple[int, ...]:
    arr = np.atleast_1d(np.asarray(v))
    if arr.size == 1 and d > 1:
        arr = np.repeat(arr, d)
    if arr.shape != (d,):
        raise ConfigurationError(f"{what} must have {d} components, got {arr.shape}")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ConfigurationError(f"{what} must be integer valued, got {arr}")
    return tuple(int(x) for x in arr)
