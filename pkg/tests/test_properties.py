import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from freebias import (Atomic, LevyTriple, cauchy_from_levy, cauchy_transform, el_gordo,
                      flat_combine, free_convolve, free_zero_bias, inverse_square_bias,
                      lk_residual, principal_cbrt, principal_sqrt, square_bias)

finite = st.floats(-50, 50, allow_nan=False)
upper = st.builds(complex, st.floats(-5, 5), st.floats(0.01, 5))
lower = st.builds(complex, st.floats(-5, 5), st.floats(-5, -0.01))


@st.composite
def atomic(draw, centered=False, avoid_zero=False):
    k = draw(st.integers(1, 6))
    xs = draw(st.lists(st.floats(-4, 4), min_size=k, max_size=k, unique=True))
    raw = draw(st.lists(st.floats(0.05, 1), min_size=k, max_size=k))
    w = np.array(raw) / sum(raw)
    x = np.array(xs)
    if centered:
        x = x - np.dot(w, x)
    if avoid_zero:
        assume(np.all(np.abs(x) > 1e-3))
    assume(np.all(np.diff(np.sort(x)) > 1e-6))
    return Atomic(x, w)


@given(finite, finite)
def test_sqrt_squares_back(a, b):
    z = complex(a, b)
    r = principal_sqrt(z)
    assert abs(r * r - z) <= 1e-12 * max(1, abs(z))
    assert r.imag >= 0


@given(finite, finite)
def test_cbrt_cubes_back(a, b):
    z = complex(a, b)
    r = principal_cbrt(z)
    assert abs(r ** 3 - z) <= 1e-12 * max(1, abs(z))
    assert 0 <= np.angle(r) % (2 * np.pi) < 2 * np.pi / 3 + 1e-12


@given(lower, lower)
def test_product_of_roots_of_lower_half_plane_stays_below(a, b):
    assert (principal_sqrt(a) * principal_sqrt(b)).imag <= 0


@given(atomic(), upper)
def test_cauchy_transform_maps_into_lower_half_plane(mu, z):
    g = cauchy_transform(mu)(z)
    assert g.imag < 0
    assert abs(g) <= 1 / z.imag * (1 + 1e-12)
    assert (1 / g).imag >= z.imag * (1 - 1e-12)


@given(atomic(), upper, st.floats(-3, 3))
def test_shift_equivariance(mu, z, c):
    assert abs(cauchy_transform(mu.shift(c))(z) - cauchy_transform(mu)(z - c)) < 1e-9


@given(atomic(), upper, st.floats(0.2, 5))
def test_scale_equivariance(mu, z, a):
    got = cauchy_transform(mu.scale(a))(z)
    assert abs(got - cauchy_transform(mu)(z / a) / a) < 1e-9


@given(atomic(), st.floats(-3, 3))
def test_hull_shifts(mu, c):
    lo, hi = mu.support_hull()
    lo2, hi2 = mu.shift(c).support_hull()
    assert abs(lo2 - lo - c) < 1e-12 and abs(hi2 - hi - c) < 1e-12


@given(atomic(avoid_zero=True))
def test_square_bias_round_trip(mu):
    back = inverse_square_bias(square_bias(mu))
    assert np.abs(back.weights - mu.weights).max() < 1e-12
    assert np.array_equal(back.locations, mu.locations)


@given(atomic(centered=True), upper)
def test_free_zero_bias_is_a_cauchy_transform(mu, z):
    assume(mu.moments().variance > 1e-3)
    g = free_zero_bias(mu)(z)
    assert g.imag <= 0
    assert abs(g) <= 1 / z.imag * (1 + 1e-9)


@given(atomic(centered=True), upper, st.floats(0.3, 3))
def test_free_zero_bias_commutes_with_scaling(mu, z, a):
    assume(mu.moments().variance > 1e-3)
    got = free_zero_bias(mu.scale(a))(z)
    assert abs(got - free_zero_bias(mu)(z / a) / a) < 1e-8 / z.imag


@given(atomic(), upper)
def test_el_gordo_stays_in_lower_half_plane(mu, z):
    assert el_gordo(mu)(z).imag <= 0


@given(atomic(), atomic(), upper)
def test_flat_combine_symmetric_and_below(mu, nu, z):
    a, b = flat_combine(mu, nu)(z), flat_combine(nu, mu)(z)
    assert a == b
    assert a.imag <= 0


@settings(max_examples=25, deadline=None)
@given(atomic(), atomic(), st.builds(complex, st.floats(-3, 3), st.floats(0.2, 3)))
def test_free_convolution_commutes(mu, nu, z):
    a, b = free_convolve(mu, nu)(z), free_convolve(nu, mu)(z)
    assert abs(a - b) < 1e-8
    assert a.imag < 0


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(0.1, 3), atomic(),
       st.builds(complex, st.floats(-3, 3), st.floats(0.2, 3)))
def test_levy_khintchine_solution(m, s2, levy, z):
    t = LevyTriple(m, s2, levy)
    g = cauchy_from_levy(t)(z)
    assert g.imag < 0
    assert lk_residual(t, z, g) < 1e-9 * max(1, abs(z))
