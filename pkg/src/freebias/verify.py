"""Numerical self-checks grouped into named suites.

Each check compares a computed quantity against an independent reference
(a closed form or a second numerical route) and reports the measured error
next to the required bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .freeconv import (ConeWarning, free_convolve, free_power, replace_one_check,
                       root_support_bound, root_transform, voiculescu_transform)
from .holomorphic import cauchy_transform
from .infdiv import (AZADI_EDGE, LevyTriple, cauchy_from_levy, compound_free_poisson,
                     gallery_azadi_cauchy, gallery_azadi_density, gallery_cauchy_levy,
                     gallery_cauchy_levy_density, gallery_semicircle_levy_density,
                     levy_from_measure, levy_from_roots)
from .inversion import curve_cdf, stieltjes_density, support_detect
from .measure import Atomic, CauchyLaw, FreePoisson, Semicircle, dirac, rademacher
from .transforms import el_gordo, free_zero_bias

#: heights for density comparisons against closed forms
FINE_EPS = (2e-3, 1e-3)


@dataclass
class Check:
    name: str
    measured: float
    required: float
    passed: bool

    def as_dict(self):
        return asdict(self)


def _below(name, measured, required) -> Check:
    measured = float(measured)
    return Check(name, measured, float(required), bool(measured < required))


def uhp_points(n: int, seed: int, re=(-3.0, 3.0), im=(0.05, 3.0)) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(*re, n) + 1j * rng.uniform(*im, n)


def cone_points(n: int, beta: float, seed: int) -> np.ndarray:
    """Points of ``{|Re z| < Im z / 2, beta < |z| < 2 beta}``, inside every cone of aperture 1."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(1.05 * beta, 2 * beta, n)
    ang = rng.uniform(-0.45, 0.45, n)
    return 1j * r * np.exp(1j * ang)


# --------------------------------------------------------------------------
# fixed points

def check_semicircle_fixed_point() -> list[Check]:
    out = []
    z = uhp_points(50, 11)
    for s2 in (0.5, 1.0, 2.0):
        mu = Semicircle(0.0, s2)
        err = np.abs(free_zero_bias(mu)(z) - cauchy_transform(mu)(z)).max()
        out.append(_below(f"semicircle fixed point, variance {s2:g}", err, 1e-10))
    return out


def check_el_gordo_fixed_point() -> Check:
    z = uhp_points(50, 12)
    return _below("el gordo fixes the point mass at 0",
                  np.abs(el_gordo(dirac(0.0))(z) - 1 / z).max(), 1e-14)


# --------------------------------------------------------------------------
# gallery

def check_free_poisson_solver() -> Check:
    z = uhp_points(100, 21)
    g = cauchy_from_levy(compound_free_poisson(1.0, dirac(1.0)))(z)
    return _below("free Poisson: LK solver vs closed form",
                  np.abs(g - cauchy_transform(FreePoisson(1.0, 1.0))(z)).max(), 1e-8)


def _edge_mask(x, edges, width):
    keep = np.ones(x.shape, bool)
    for e in edges:
        keep &= np.abs(x - e) > width
    return keep


def check_semicircle_levy_density() -> list[Check]:
    out = []
    for t in (0.1, 1.0):
        edge = 2 * math.sqrt(1 + t)
        x = np.linspace(-1.1 * edge, 1.1 * edge, 1201)
        c = stieltjes_density(cauchy_from_levy(LevyTriple(0.0, 1.0, Semicircle(0.0, t))),
                              x, FINE_EPS)
        keep = _edge_mask(x, (-edge, edge), 2 * FINE_EPS[0])
        err = np.abs(c.values - gallery_semicircle_levy_density(1.0, t, x))[keep].max()
        out.append(_below(f"semicircle Levy measure t={t:g}: density vs closed form", err, 1e-3))
    return out


def check_azadi() -> list[Check]:
    from scipy.integrate import quad
    mass = 2 * quad(gallery_azadi_density, 0, AZADI_EDGE, limit=200)[0]
    x = np.linspace(-AZADI_EDGE, AZADI_EDGE, 1201)
    x = x[_edge_mask(x, (-AZADI_EDGE, 0.0, AZADI_EDGE), 0.05)]
    c = stieltjes_density(cauchy_from_levy(LevyTriple(0.0, 1.0, rademacher())), x, FINE_EPS)
    err = np.abs(c.values - gallery_azadi_density(x)).max()
    return [_below("Azadi tower: closed-form density mass", abs(mass - 1), 1e-6),
            _below("Azadi tower: LK solver density vs closed form", err, 1e-3)]


def check_cauchy_levy() -> list[Check]:
    x = 200.0
    tail = abs(x ** 4 * gallery_cauchy_levy_density(1.0, x) - 1 / math.pi) * math.pi
    z = uhp_points(20, 31)
    g = cauchy_from_levy(LevyTriple(0.0, 1.0, CauchyLaw(0.0, 1.0)))(z)
    return [_below("Cauchy Levy measure: relative tail error of x^4 rho at x=200", tail, 0.02),
            _below("Cauchy Levy measure: LK solver vs closed form",
                   np.abs(g - gallery_cauchy_levy(1.0, z)).max(), 1e-6)]


# --------------------------------------------------------------------------
# replace one, Levy-Khintchine identities

def check_replace_one() -> list[Check]:
    z = uhp_points(50, 41)
    return [_below(f"replace one, Rademacher, n={n}",
                   replace_one_check(rademacher(), n, z).max(), 1e-6) for n in (2, 3)]


def check_lk_equivalence() -> Check:
    """``F`` of the free zero bias equals ``F`` of El Gordo of ``Y`` composed with ``F_X``."""
    t = LevyTriple(0.0, 1.0, rademacher())
    gx = cauchy_from_levy(t)
    z = uhp_points(20, 51)
    lhs = 1 / free_zero_bias(gx, mean=0.0, variance=1.0)(z)
    rhs = 1 / el_gordo(t.levy)(1 / gx(z))
    return _below("LK equivalence for triple (0, 1, Rademacher)", np.abs(lhs - rhs).max(), 1e-6)


def check_halving() -> list[Check]:
    out = []
    z = uhp_points(20, 61)
    for name, nu in (("point mass at 0", dirac(0.0)), ("Rademacher", rademacher())):
        half = cauchy_from_levy(LevyTriple(0.0, 0.5, nu))
        full = cauchy_from_levy(LevyTriple(0.0, 1.0, nu))
        err = np.abs(free_convolve(half, half)(z) - full(z)).max()
        out.append(_below(f"halving the triple, Levy measure {name}", err, 1e-6))
    return out


def check_levy_round_trip() -> Check:
    t = LevyTriple(0.0, 1.0, rademacher())
    z = cone_points(10, 10.0, 71)
    gy = levy_from_measure(cauchy_from_levy(t), mean=0.0, variance=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConeWarning)
        err = np.abs(gy(z) - cauchy_transform(t.levy)(z)).max()
    return _below("Levy measure recovered from the law, Rademacher", err, 1e-6)


# --------------------------------------------------------------------------
# Holder bound

def random_centered_atomic(rng) -> Atomic:
    k = int(rng.integers(3, 7))
    x = rng.uniform(-2, 2, k)
    w = rng.dirichlet(np.ones(k))
    x = x - np.dot(w, x)
    return Atomic(x, w)


def check_holder(n_measures: int = 50, n_intervals: int = 20, seed: int = 81) -> Check:
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(n_measures):
        mu = random_centered_atomic(rng)
        mom = mu.moments()
        lo, hi = mu.support_hull()
        grid = np.linspace(lo - 0.05, hi + 0.05, 4001)
        cdf = curve_cdf(stieltjes_density(free_zero_bias(mu), grid, FINE_EPS))
        ends = np.sort(rng.uniform(lo, hi, (n_intervals, 2)), axis=1)
        mass = cdf(ends[:, 1]) - cdf(ends[:, 0])
        bound = (ends[:, 1] - ends[:, 0]) / mom.variance * mom.abs_first_moment
        worst = max(worst, float(np.max(mass ** 2 - bound)))
    return _below("Holder bound on free zero bias (worst excess)", worst, 1e-4)


# --------------------------------------------------------------------------
# convolution roots

def check_levy_from_roots() -> list[Check]:
    mu = FreePoisson(1.0, 1.0)
    w = np.array([1 + 2j, -1 + 2j, 0.5 + 3j, 2j, -2 + 2.5j])
    errs = [float(np.abs(levy_from_roots(mu, n, w) - 1 / (w - 1)).max()) for n in (4, 16, 64)]
    mono = max(b - a for a, b in zip(errs, errs[1:]))
    return [_below("Levy measure from roots, n=64", errs[-1], 0.05),
            Check("Levy measure from roots nonincreasing over n=4,16,64", mono, 0.0, mono <= 0)]


def check_root_support() -> Check:
    lo, hi = root_support_bound(rademacher())
    runs = support_detect(root_transform(rademacher(), 4), (lo - 3, hi + 3))
    excess = max([0.0] + [max(lo - a, b - hi) for a, b in runs])
    return Check("Rademacher 4th root support inside the bound (excess)", excess, 0.0,
                 excess <= 0)


def check_root_consistency() -> list[Check]:
    out = []
    mu = FreePoisson(1.0, 1.0)
    z = cone_points(10, 10.0, 91)
    for n in (2, 4):
        err = np.abs(free_power(root_transform(mu, n), n)(z) - cauchy_transform(mu)(z)).max()
        out.append(_below(f"n-fold power of the n-th root, free Poisson, n={n}", err, 1e-6))
    return out


def check_voiculescu_additivity() -> Check:
    a, b = rademacher(), Semicircle(0.0, 1.0)
    z = cone_points(10, 15.0, 101)
    ab = free_convolve(a, b)
    err = np.abs(voiculescu_transform(ab, z, variance=2.0) - voiculescu_transform(a, z)
                 - voiculescu_transform(b, z)).max()
    return _below("Voiculescu transform additive, Rademacher and semicircle", err, 1e-7)


def _flatten(items):
    for c in items:
        if isinstance(c, Check):
            yield c
        else:
            yield from c


SUITES: dict[str, list[Callable]] = {
    "fixed_point": [check_semicircle_fixed_point, check_el_gordo_fixed_point],
    "gallery": [check_free_poisson_solver, check_semicircle_levy_density, check_azadi,
                check_cauchy_levy],
    "replace_one": [check_replace_one],
    "lk_roundtrip": [check_lk_equivalence, check_halving, check_levy_round_trip],
    "holder": [check_holder],
    "roots": [check_levy_from_roots, check_root_support, check_root_consistency,
              check_voiculescu_additivity],
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return list(_flatten(f() for f in SUITES[name]))
