import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framescatter.deformation import (DeformationField, apply_deformation, check_admissible,
                                      deformed_energy_bound, interpolation_tolerance,
                                      jacobian_sup_norm, random_field_model, random_smooth_field,
                                      sinusoidal_field, translation_field, zero_field)
from framescatter.errors import ConfigurationError, HypothesisError
from framescatter.signal import Grid, Signal, translate
from framescatter.verify import random_bandlimited


def test_jacobian_constant_is_zero():
    g = Grid(2, 32)
    assert jacobian_sup_norm(translation_field(g, (1.5, -2)).tau, g) == 0.0
    assert zero_field(g).dtau_norm == 0.0


@pytest.mark.parametrize("d,n", [(1, 128), (2, 64), (2, 128)])
def test_jacobian_sinusoid(d, n):
    for alpha in [0.05, 0.2, 0.25]:
        field = sinusoidal_field(Grid(d, n), alpha)
        assert abs(field.dtau_norm - alpha) <= 1e-3


def test_jacobian_component_swap(rng):
    g = Grid(2, 32)
    field = random_smooth_field(g, 3, dtau=0.2)
    swapped = field.tau[::-1]
    assert jacobian_sup_norm(swapped, g) == pytest.approx(field.dtau_norm, rel=1e-15)
    with pytest.raises(ConfigurationError):
        jacobian_sup_norm(field.tau)


def test_jacobian_closed_form(rng):
    g = Grid(2, 128)
    model = random_field_model(2, 11, dtau=0.2)
    exact = model.jacobian_at(g.coordinates())
    assert np.max(np.abs(model.sample(g).jacobian - exact)) <= 1e-3


def test_admissibility():
    g = Grid(2, 64)
    v = check_admissible(zero_field(g))
    assert v and v.min_determinant == 1.0 and v.determinant_bound_holds
    bad = sinusoidal_field(g, 0.3)
    assert not check_admissible(bad)
    assert check_admissible(bad).threshold == 0.25
    assert check_admissible(sinusoidal_field(Grid(1, 64), 0.3))
    assert not check_admissible(sinusoidal_field(Grid(1, 64), 0.3), d=2)


@pytest.mark.parametrize("seed", range(10))
def test_admissible_determinant(seed):
    g = Grid(2, 64)
    field = random_smooth_field(g, seed, dtau=0.24)
    v = check_admissible(field)
    assert v and v.determinant_bound_holds
    J = field.jacobian
    # pointwise 2x2 determinant written out
    det = np.array([[np.linalg.det(np.eye(2) - J[:, :, i, j]) for j in range(64)] for i in range(64)])
    assert np.abs(det).min() == pytest.approx(v.min_determinant, rel=1e-12)
    assert np.abs(det).min() >= 0.5


def test_identity_deformation(rng):
    g = Grid(2, 32)
    f = Signal.random(g, rng)
    assert np.array_equal(apply_deformation(f, zero_field(g)).values, f.values)


@pytest.mark.parametrize("d,shift", [(1, 5), (1, -3), (2, (2, -7)), (2, (16, 1))])
def test_integer_shift_is_translation(rng, d, shift):
    g = Grid(d, 32)
    f = Signal.random(g, rng)
    out = apply_deformation(f, translation_field(g, shift))
    assert np.max(np.abs(out.values - translate(f, shift).values)) <= 1e-12


def test_constant_phase(rng):
    g = Grid(2, 32)
    f = Signal.random(g, rng)
    field = translation_field(g, 0, omega=0.37)
    out = apply_deformation(f, field)
    assert np.allclose(np.abs(out.values), np.abs(f.values), atol=1e-12)
    assert np.allclose(out.values, np.exp(2j * np.pi * 0.37) * f.values, atol=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 2.0))
@settings(max_examples=30, deadline=None)
def test_modulation_only_is_isometry(seed, amplitude):
    rng = np.random.default_rng(seed)
    g = Grid(2, 16)
    f = Signal.random(g, rng)
    field = DeformationField(g, np.zeros((2, 16, 16)), amplitude * rng.standard_normal((16, 16)))
    assert abs(apply_deformation(f, field).norm - f.norm) <= 1e-12 * f.norm


def test_fractional_shift_interpolates_linearly():
    g = Grid(1, 8)
    f = Signal(g, np.arange(8, dtype=float))
    out = apply_deformation(f, translation_field(g, 0.25))
    # f(x - 0.25 h) blends sample x with sample x - 1
    expected = 0.75 * np.arange(8) + 0.25 * np.roll(np.arange(8), 1)
    assert np.allclose(out.values, expected, atol=1e-14)


def test_energy_bound(rng):
    g = Grid(2, 64)
    f = Signal.random(g, rng)
    assert deformed_energy_bound(f, zero_field(g)).ratio == pytest.approx(1.0, rel=1e-12)
    pure = DeformationField(g, np.zeros((2, 64, 64)), rng.standard_normal((64, 64)))
    assert deformed_energy_bound(f, pure).ratio == pytest.approx(1.0, rel=1e-12)
    for seed in range(10):
        v = deformed_energy_bound(f, random_smooth_field(g, seed, dtau=0.24, omega=0.1))
        assert v.passed and v.ratio <= 2.0
    with pytest.raises(HypothesisError):
        deformed_energy_bound(f, sinusoidal_field(g, 0.3))


def test_interpolation_tolerance():
    assert interpolation_tolerance(Grid(2, 128)) == 1e-3
    assert interpolation_tolerance(Grid(2, 64)) == 2e-3


@pytest.mark.parametrize("d", [1, 2])
def test_generator_hits_targets(d):
    g = Grid(d, 128)
    for seed in range(5):
        field = random_smooth_field(g, seed, dtau=0.2, omega=0.05)
        assert abs(field.dtau_norm - 0.2) <= 0.01
        assert field.omega_norm == pytest.approx(0.05, rel=0.02)
    model = random_field_model(d, 1, dtau=0.1, tau=0.2)
    assert model.sample(g).tau_norm == pytest.approx(0.2, rel=0.01)
    with pytest.raises(ConfigurationError):
        random_field_model(d, 1, dtau=0.2, tau=1e-6)
    with pytest.raises(ConfigurationError):
        random_field_model(d, 1, dtau=-0.1)


def test_generator_is_seeded():
    g = Grid(2, 32)
    a, b = random_smooth_field(g, 5, 0.2), random_smooth_field(g, 5, 0.2)
    assert np.array_equal(a.tau, b.tau)
    assert not np.array_equal(a.tau, random_smooth_field(g, 6, 0.2).tau)


@pytest.mark.parametrize("d", [1, 2])
def test_composition_first_order(d):
    """tau then -tau returns f; the error shrinks at least linearly with the spacing.

    The displacement is held at a fixed number of samples, so ``||D tau||``
    scales with the spacing and the continuous composition defect
    ``f(x + tau(x) - tau(x + tau(x))) - f(x)`` is included in what is measured.
    """
    poly = random_bandlimited(d, 3, seed=2)
    errors = []
    for n in (64, 128):
        g = Grid(d, n)
        base = random_field_model(d, 4, dtau=1.0)
        field = base.scaled(tau_factor=2.0 / n / np.abs(base.tau_at(g.coordinates())).max()).sample(g)
        assert check_admissible(field)
        f = poly.sample(g)
        back = DeformationField(g, -field.tau, np.zeros(g.shape))
        err = (apply_deformation(apply_deformation(f, field), back) - f).norm / f.norm
        errors.append((err, field.dtau_norm))
    (e64, dt64), (e128, dt128) = errors
    assert e64 <= 10 * dt64 * Grid(d, 64).spacing
    assert e128 <= 10 * dt128 * Grid(d, 128).spacing
    assert e64 / e128 >= 2.0


def test_grid_mismatch(rng):
    with pytest.raises(ConfigurationError):
        apply_deformation(Signal.random(Grid(2, 16), rng), zero_field(Grid(2, 32)))
    with pytest.raises(ConfigurationError):
        DeformationField(Grid(1, 16), np.zeros(16), np.zeros(8))
