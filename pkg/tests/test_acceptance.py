"""Acceptance criteria 1-17.

Each criterion reports ``(measured, required)`` and passes when
``measured < required`` (or ``<=`` where noted). One line per criterion is
printed; run ``python3 tests/test_acceptance.py`` for the plain listing or
``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import math
import sys

import numpy as np
import pytest

from freebias import (Atomic, cauchy_transform, classical_zero_bias, dirac, flat_combine,
                      free_zero_bias, inverse_square_bias, rademacher, square_bias,
                      square_bias_cauchy, stieltjes_density)
from freebias import verify
from freebias.verify import FINE_EPS, uhp_points

INNER = np.linspace(-0.95, 0.95, 1901)


def _worst(checks):
    if isinstance(checks, verify.Check):
        checks = [checks]
    bad = [c for c in checks if not c.passed]
    pick = bad[0] if bad else max(checks, key=lambda c: c.measured / c.required
                                  if c.required else c.measured)
    return pick.measured, pick.required, all(c.passed for c in checks)


def _lt(measured, required):
    return float(measured), float(required), bool(measured < required)


def _arcsine_density(x):
    return 1 / (math.pi * np.sqrt(1 - x * x))


def c01():
    return _worst(verify.check_semicircle_fixed_point())


def c02():
    c = stieltjes_density(free_zero_bias(rademacher()), INNER, FINE_EPS)
    return _lt(np.abs(c.values - _arcsine_density(INNER)).max(), 1e-3)


def c03():
    # the free zero bias of the Rademacher law is arcsine on [-1, 1]: mean 0, variance 1/2
    twice = free_zero_bias(free_zero_bias(rademacher()), mean=0.0, variance=0.5)
    c = stieltjes_density(twice, INNER, FINE_EPS)
    exact = np.sqrt(1 + 1 / np.sqrt(1 - INNER ** 2)) / math.pi
    return _lt(np.abs(c.values - exact).max(), 1e-3)


def c04():
    c = stieltjes_density(flat_combine(dirac(1.0), dirac(-1.0)), INNER, FINE_EPS)
    return _lt(np.abs(c.values - _arcsine_density(INNER)).max(), 1e-3)


def c05():
    return _worst(verify.check_free_poisson_solver())


def c06():
    return _worst(verify.check_semicircle_levy_density())


def c07():
    return _worst(verify.check_azadi())


def c08():
    return _worst(verify.check_cauchy_levy())


def c09():
    return _worst(verify.check_holder())


def c10():
    return _worst(verify.check_lk_equivalence())


def c11():
    return _worst(verify.check_replace_one())


def c12():
    return _worst(verify.check_levy_from_roots())


def interpolation_cdf(t, n=600):
    """CDF at ``t`` of ``U Y + (1 - U) X`` with ``X, Y`` iid arcsine on [-1, 1].

    With ``X = cos a``, ``Y = cos b`` and ``a, b`` uniform on ``[0, pi]``,
    midpoint rule in ``(a, b)``; given the pair, the mixture is uniform
    between ``x`` and ``y``.
    """
    ang = (np.arange(n) + 0.5) * math.pi / n
    c = np.cos(ang)
    lo = np.minimum.outer(c, c)
    hi = np.maximum.outer(c, c)
    width = hi - lo
    out = []
    for s in np.atleast_1d(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(width > 0, np.clip((s - lo) / width, 0, 1), (s >= lo).astype(float))
        out.append(p.mean())
    return np.array(out)


def c13():
    zb = classical_zero_bias(rademacher())
    t = np.linspace(-1.0, 1.0, 201)
    return _lt(np.abs(zb.cdf(t) - interpolation_cdf(t)).max(), 5e-3)


def c14():
    rng = np.random.default_rng(140)
    z = uhp_points(50, 141)
    g_err, w_err = 0.0, 0.0
    for _ in range(20):
        k = int(rng.integers(2, 7))
        x = rng.uniform(-3, 3, k)
        x = x[np.abs(x) > 1e-3]
        w = rng.dirichlet(np.ones(x.size))
        mu = Atomic(x, w)
        reweight = cauchy_transform(square_bias(mu))(z)
        formula = square_bias_cauchy(mu)(z)
        g_err = max(g_err, float(np.abs(reweight - formula).max()))
        back = inverse_square_bias(square_bias(mu))
        w_err = max(w_err, float(np.abs(back.weights - mu.weights).max()))
    ok = g_err < 1e-10 and w_err <= 1e-12
    return max(g_err / 1e-10, w_err / 1e-12), 1.0, ok


def c15():
    return _worst(verify.check_voiculescu_additivity())


def c16():
    c = verify.check_root_support()
    return c.measured, c.required, c.passed


def c17():
    return _worst(verify.check_halving())


CRITERIA = {
    1: ("semicircle fixed point of the free zero bias", c01),
    2: ("free zero bias of Rademacher is arcsine", c02),
    3: ("iterated free zero bias of Rademacher", c03),
    4: ("geometric-mean combination of two point masses", c04),
    5: ("free Poisson: generic solver vs closed form", c05),
    6: ("semicircle Levy measure density", c06),
    7: ("Azadi tower mass and density", c07),
    8: ("Cauchy Levy measure tail and transform", c08),
    9: ("Holder bound on free zero bias mass", c09),
    10: ("Levy-Khintchine equivalence", c10),
    11: ("replace-one identity", c11),
    12: ("Levy measure from convolution roots", c12),
    13: ("classical zero bias as uniform interpolation", c13),
    14: ("square bias formula and inverse round trip (worst error over bound)", c14),
    15: ("Voiculescu transform additivity", c15),
    16: ("support of the Rademacher fourth root", c16),
    17: ("halving a Levy triple", c17),
}


def report(n):
    title, fn = CRITERIA[n]
    measured, required, ok = fn()
    line = (f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: "
            f"measured {measured:.3g}, required {required:.3g}")
    return line, ok


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    line, ok = report(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report(n) for n in sorted(CRITERIA)]
    for line, _ in results:
        print(line)
    sys.exit(0 if all(ok for _, ok in results) else 1)
