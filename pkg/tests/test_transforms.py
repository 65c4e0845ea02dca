import math

import numpy as np
import pytest

from freebias import (Arcsine, Atomic, GridDensity, Mixture, PreconditionError, Semicircle,
                      box_flat_raw, cauchy_transform, classical_zero_bias, dirac, el_gordo,
                      flat_combine, free_zero_bias, inverse_square_bias, rademacher,
                      square_bias, square_bias_cauchy, transform_moments, two_point)


def test_square_bias_atomic():
    mu = Atomic([1.0, 2.0], [0.3, 0.7])
    sb = square_bias(mu)
    assert sb.weights == pytest.approx([0.3 / 3.1, 2.8 / 3.1], abs=1e-15)
    back = inverse_square_bias(sb)
    assert np.abs(back.weights - mu.weights).max() <= 1e-15


def test_square_bias_drops_atom_at_zero_and_fixes_rademacher():
    sb = square_bias(Atomic([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25]))
    assert sb.locations.tolist() == [-1.0, 1.0]
    assert sb.weights.tolist() == [0.5, 0.5]
    r = square_bias(rademacher())
    assert r.weights.tolist() == [0.5, 0.5]
    assert square_bias(dirac(0.0)).locations.tolist() == [0.0]


def test_inverse_square_bias_rejects_atom_at_zero():
    with pytest.raises(PreconditionError, match="atom at 0"):
        inverse_square_bias(Atomic([0.0, 1.0], [0.5, 0.5]))


def test_square_bias_formula_matches_reweighting_atomic(zs):
    mu = Atomic([-2.0, 0.5, 3.0], [0.2, 0.5, 0.3])
    want = cauchy_transform(square_bias(mu))(zs)
    assert np.abs(square_bias_cauchy(mu)(zs) - want).max() < 1e-12


@pytest.mark.parametrize("mu, tol", [
    (Semicircle(0.5, 1.0), 1e-5),
    (Arcsine(-1.0, 1.0), 5e-4),
    (Mixture((0.4, 0.6), (dirac(2.0), Arcsine(-1.0, 1.0))), 1e-4),
])
def test_square_bias_formula_matches_gridded_reweighting(mu, tol):
    # named laws are reweighted on a 4097-point grid; compare away from the axis
    rng = np.random.default_rng(3)
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(0.5, 3, 100)
    want = cauchy_transform(square_bias(mu))(z)
    assert np.abs(square_bias_cauchy(mu)(z) - want).max() < tol


def test_square_bias_of_semicircle_density():
    # x^2 times the semicircle density, normalized by E[X^2] = 1
    sb = square_bias(Semicircle(0.0, 1.0))
    x = np.linspace(-1.9, 1.9, 39)
    want = x ** 2 * np.sqrt(4 - x ** 2) / (2 * math.pi)
    assert np.abs(sb.density(x) - want).max() < 5e-5 * want.max()


@pytest.mark.parametrize("a", [1.0, 2.5, -1.5])
def test_el_gordo_of_point_mass_is_arcsine(a, zs):
    arc = Arcsine(min(0.0, a), max(0.0, a))
    err = np.abs(el_gordo(dirac(a))(zs) - cauchy_transform(arc)(zs)).max()
    assert err < 1e-13


def test_el_gordo_fixes_point_mass_at_zero(zs):
    assert np.abs(el_gordo(dirac(0.0))(zs) - 1 / zs).max() < 1e-15


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (1.0, 3.0), (0.5, 2.0)])
def test_free_zero_bias_of_two_point_is_arcsine(a, b, zs):
    got = free_zero_bias(two_point(a, b))(zs)
    assert np.abs(got - cauchy_transform(Arcsine(-a, b))(zs)).max() < 1e-13


def test_flat_combine_of_two_point_masses(zs):
    got = flat_combine(dirac(1.0), dirac(-1.0))(zs)
    assert np.abs(got - cauchy_transform(Arcsine(-1.0, 1.0))(zs)).max() < 1e-13
    assert np.abs(flat_combine(dirac(2.0), dirac(2.0))(zs) - 1 / (zs - 2)).max() < 1e-14


@pytest.mark.parametrize("s2", [0.5, 1.0, 3.0])
def test_semicircle_is_fixed(s2, zs):
    mu = Semicircle(0.0, s2)
    assert np.abs(free_zero_bias(mu)(zs) - cauchy_transform(mu)(zs)).max() < 1e-12


def test_free_zero_bias_translates_with_mean(zs):
    mu = Semicircle(1.0, 1.0)
    assert np.abs(free_zero_bias(mu)(zs) - cauchy_transform(mu)(zs)).max() < 1e-12


def test_box_flat_raw_differs_off_center():
    mu = Semicircle(1.0, 1.0)
    assert abs(box_flat_raw(mu)(2j) - free_zero_bias(mu)(2j)) > 1e-2
    c = Semicircle(0.0, 1.0)
    assert abs(box_flat_raw(c)(2j) - free_zero_bias(c)(2j)) < 1e-15


def test_free_stein_identity_moments():
    # E[X^3] = 2 s2 E[X°] and E[X^4] = s2 (2 E[X°^2] + E[X°]^2)
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = rng.uniform(-2, 2, 4)
        w = rng.dirichlet(np.ones(4))
        x -= np.dot(w, x)
        mu = Atomic(x, w)
        s2 = mu.moments().variance
        hull = mu.support_hull()
        m0, m1, m2 = transform_moments(free_zero_bias(mu), hull, kmax=2)
        assert m0 == pytest.approx(1.0, abs=1e-10)
        assert 2 * s2 * m1 == pytest.approx(np.dot(w, x ** 3), abs=1e-10)
        assert s2 * (2 * m2 + m1 ** 2) == pytest.approx(np.dot(w, x ** 4), abs=1e-10)


def test_free_zero_bias_needs_variance():
    with pytest.raises(PreconditionError):
        free_zero_bias(dirac(1.0))


def test_classical_zero_bias_rademacher_is_uniform():
    zb = classical_zero_bias(rademacher())
    t = np.linspace(-1.0, 1.0, 41)
    assert np.abs(zb.cdf(t) - (t + 1) / 2).max() < 1e-9


def test_classical_zero_bias_with_mean():
    zb = classical_zero_bias(Atomic([0.0, 2.0], [0.5, 0.5]))
    t = np.linspace(0.0, 2.0, 21)
    assert np.abs(zb.cdf(t) - t / 2).max() < 1e-9


def test_classical_zero_bias_semicircle_density():
    # E[X 1{X > t}] for the standard semicircle is (4 - t^2)^(3/2) / (6 pi)
    zb = classical_zero_bias(Semicircle(0.0, 1.0))
    t = np.linspace(-1.9, 1.9, 39)
    assert np.abs(zb.density(t) - (4 - t ** 2) ** 1.5 / (6 * math.pi)).max() < 1e-4


def test_classical_zero_bias_grid_input():
    x = np.linspace(-1, 1, 201)
    g = GridDensity.normalized(x, 1 - np.abs(x))
    zb = classical_zero_bias(g)
    # triangle: E[X 1{X > t}] = (1 - t)^2 (1 + 2 t) / 6 for t >= 0, variance 1/6
    t = np.linspace(0.0, 0.9, 10)
    assert np.abs(zb.density(t) - (1 - t) ** 2 * (1 + 2 * t)).max() < 1e-3
