import math

import numpy as np
import pytest

from freebias import (Arcsine, Atom, Atomic, CauchyLaw, FreePoisson, GridDensity,
                      InvalidMeasure, Mixture, PreconditionError, Semicircle, dirac, moments,
                      rademacher, scale, shift, support_hull, two_point)


def test_atomic_sorts_and_reports_moments():
    mu = Atomic([2.0, -1.0], [0.25, 0.75])
    assert mu.locations.tolist() == [-1.0, 2.0]
    m = mu.moments()
    assert m.mean == pytest.approx(-0.25)
    assert m.second_moment == pytest.approx(1.75)
    assert m.variance == pytest.approx(1.6875)
    assert m.abs_first_moment == pytest.approx(1.25)
    assert mu.support_hull() == (-1.0, 2.0)


def test_atomic_is_immutable():
    mu = rademacher()
    with pytest.raises(ValueError):
        mu.weights[0] = 0.9


@pytest.mark.parametrize("locs, weights", [
    ([0.0, 1.0], [0.5, 0.4]),
    ([0.0, 1.0], [1.2, -0.2]),
    ([0.0, 0.0], [0.5, 0.5]),
    ([], []),
    ([math.inf], [1.0]),
])
def test_atomic_rejects_invalid(locs, weights):
    with pytest.raises(InvalidMeasure):
        Atomic(locs, weights)


def test_from_atoms_and_atom_view():
    mu = Atomic.from_atoms([Atom(1.0, 0.5), (-1.0, 0.5)])
    assert mu.atoms == [Atom(-1.0, 0.5), Atom(1.0, 0.5)]


def test_two_point_is_centered():
    mu = two_point(1.0, 3.0)
    assert mu.moments().mean == pytest.approx(0.0, abs=1e-15)
    assert mu.weights.tolist() == [0.75, 0.25]
    with pytest.raises(InvalidMeasure):
        two_point(0.0, 1.0)


def test_named_moments():
    assert Semicircle(1.0, 4.0).moments().second_moment == pytest.approx(5.0)
    assert Semicircle(0.0, 1.0).moments().abs_first_moment == pytest.approx(8 / (3 * math.pi))
    a = Arcsine(-1.0, 1.0).moments()
    assert (a.mean, a.variance) == (0.0, 0.5)
    assert a.abs_first_moment == pytest.approx(2 / math.pi)
    fp = FreePoisson(2.0, 3.0).moments()
    assert (fp.mean, fp.variance) == (6.0, 18.0)
    assert CauchyLaw(0.0, 1.0).moments().mean is None


def test_free_poisson_atom_and_hull():
    mu = FreePoisson(0.25, 1.0, offset=2.0)
    assert mu.atom_mass == 0.75
    assert mu.edges() == (2.25, 4.25)
    assert mu.support_hull() == (2.0, 4.25)
    with pytest.raises(PreconditionError):
        mu.to_grid()


def test_free_poisson_density_integrates_to_rate():
    from scipy.integrate import quad
    mu = FreePoisson(0.5, 2.0)
    lo, hi = mu.edges()
    assert quad(mu.density, lo, hi, limit=200)[0] == pytest.approx(0.5, abs=1e-8)


def test_grid_density_validation_and_normalization():
    x = np.linspace(-1, 1, 9)
    with pytest.raises(InvalidMeasure):
        GridDensity(x, 2 * (1 - np.abs(x)))
    with pytest.raises(InvalidMeasure):
        GridDensity(x[:4], 1 - np.abs(x[:4]))
    g = GridDensity.normalized(x, 2 * (1 - np.abs(x)))
    assert np.trapezoid(g.values, g.grid) == pytest.approx(1.0)


def test_grid_density_cdf_and_moments():
    x = np.linspace(-1, 1, 101)
    g = GridDensity(x, 1 - np.abs(x))
    assert g.cdf(0.0) == pytest.approx(0.5)
    assert g.cdf(-2.0) == 0.0 and g.cdf(2.0) == pytest.approx(1.0)
    m = g.moments()
    assert m.mean == pytest.approx(0.0, abs=1e-15)
    # triangle on [-1, 1]: variance 1/6
    assert m.variance == pytest.approx(1 / 6, rel=1e-3)


def test_mixture_moments_and_validation():
    mix = Mixture((0.5, 0.5), (dirac(-2.0), Semicircle(2.0, 1.0)))
    m = mix.moments()
    assert m.mean == pytest.approx(0.0)
    assert m.second_moment == pytest.approx(0.5 * 4 + 0.5 * 5)
    assert mix.support_hull() == (-2.0, 4.0)
    with pytest.raises(InvalidMeasure):
        Mixture((0.5, 0.4), (dirac(0.0), dirac(1.0)))


@pytest.mark.parametrize("mu", [
    rademacher(), Semicircle(0.5, 2.0), Arcsine(-1.0, 3.0), FreePoisson(0.5, 2.0),
    Mixture((0.3, 0.7), (dirac(1.0), Arcsine(0.0, 1.0))),
    GridDensity(np.linspace(0, 2, 21), 1 - np.abs(np.linspace(0, 2, 21) - 1)),
])
def test_shift_and_scale_act_on_moments(mu):
    m = moments(mu)
    s = moments(shift(mu, 1.5))
    assert s.mean == pytest.approx(m.mean + 1.5)
    assert s.variance == pytest.approx(m.variance, rel=1e-9)
    lo, hi = support_hull(mu)
    assert support_hull(shift(mu, 1.5)) == pytest.approx((lo + 1.5, hi + 1.5))
    t = moments(scale(mu, -2.0))
    assert t.mean == pytest.approx(-2 * m.mean)
    assert t.variance == pytest.approx(4 * m.variance, rel=1e-9)
    with pytest.raises(PreconditionError):
        scale(mu, 0.0)


def test_to_grid_keeps_mass_and_moments():
    g = Semicircle(0.0, 1.0).to_grid()
    assert np.trapezoid(g.values, g.grid) == pytest.approx(1.0, abs=1e-12)
    assert g.moments().variance == pytest.approx(1.0, abs=1e-4)


def test_centered():
    assert Semicircle(3.0, 1.0).centered() == Semicircle(0.0, 1.0)
    with pytest.raises(PreconditionError):
        CauchyLaw(0.0, 1.0).centered()
