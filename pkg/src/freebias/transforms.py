"""Bias transformations of laws and of their Cauchy transforms.

Measure-valued: :func:`square_bias`, :func:`inverse_square_bias`,
:func:`classical_zero_bias`.

Transform-valued (defined through ``G``; materialize with
:mod:`freebias.inversion`): :func:`el_gordo`, :func:`flat_combine`,
:func:`free_zero_bias`, :func:`box_flat_raw`.

Transform-valued operations accept either a measure or an
:class:`~freebias.holomorphic.AnalyticTransform`. In the second case the
moments they need must be passed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import PreconditionError
from .holomorphic import (AnalyticTransform, TransformKind, as_cauchy,
                          principal_sqrt)
from .measure import (Atomic, CauchyLaw, FreePoisson, GridDensity, Mixture,
                      ProbabilityMeasure, _Continuous, dirac)

MeasureOrTransform = Union[ProbabilityMeasure, AnalyticTransform]


def _second_moment(mu: ProbabilityMeasure) -> float:
    s = mu.moments().second_moment
    if s is None:
        raise PreconditionError("second moment required")
    return s


# --------------------------------------------------------------------------
# square bias and its inverse

def square_bias(mu: ProbabilityMeasure) -> ProbabilityMeasure:
    """Reweight the law by ``x**2 / E[X**2]``."""
    e2 = _second_moment(mu)
    if e2 == 0:
        return dirac(0.0)
    if isinstance(mu, Atomic):
        x, w = mu.locations, mu.weights * mu.locations ** 2
        keep = w > 0
        return Atomic(x[keep], w[keep] / w[keep].sum())
    if isinstance(mu, GridDensity):
        return GridDensity.normalized(mu.grid, mu.grid ** 2 * mu.values, mu.mass_tol)
    if isinstance(mu, Mixture):
        pairs = [(a, c, _second_moment(c)) for a, c in zip(mu.weights, mu.components)]
        pairs = [(a * s, c) for a, c, s in pairs if s > 0]
        total = math.fsum(a for a, _ in pairs)
        if len(pairs) == 1:
            return square_bias(pairs[0][1])
        return Mixture(tuple(a / total for a, _ in pairs),
                       tuple(square_bias(c) for _, c in pairs))
    if isinstance(mu, FreePoisson) and mu.atom_mass > 0:
        return _square_bias_free_poisson_with_atom(mu, e2)
    if isinstance(mu, _Continuous):
        g = mu.to_grid()
        return GridDensity.normalized(g.grid, g.grid ** 2 * g.values)
    raise PreconditionError(f"square bias not available for {type(mu).__name__}")


def _square_bias_free_poisson_with_atom(mu: FreePoisson, e2: float):
    lo, hi = mu.edges()
    x = np.linspace(lo, hi, 4097)
    cont = GridDensity.normalized(x, x ** 2 * mu.density(x))
    atom_part = mu.atom_mass * mu.offset ** 2 / e2
    if atom_part == 0:
        return cont
    return Mixture((atom_part, 1 - atom_part), (dirac(mu.offset), cont))


def _inverse_second_moment(mu: ProbabilityMeasure) -> float:
    if isinstance(mu, Atomic):
        if np.any(mu.locations == 0):
            raise PreconditionError("inverse second moment infinite: atom at 0")
        return float(np.dot(mu.weights, mu.locations ** -2.0))
    if isinstance(mu, GridDensity):
        _reject_density_at_zero(mu)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.where(mu.values > 0, mu.values / mu.grid ** 2, 0.0)
        return float(np.trapezoid(f, mu.grid))
    if isinstance(mu, Mixture):
        return math.fsum(a * _inverse_second_moment(c) for a, c in zip(mu.weights, mu.components))
    lo, hi = mu.support_hull()
    if lo <= 0 <= hi:
        raise PreconditionError("inverse second moment infinite: support contains 0")
    return _inverse_second_moment(mu.to_grid())


def _reject_density_at_zero(mu: GridDensity):
    g, v = mu.grid, mu.values
    if g[0] < 0 < g[-1] or 0 in g:
        i = np.searchsorted(g, 0.0)
        near = v[max(i - 1, 0):i + 1]
        if np.any(near > 0):
            raise PreconditionError("inverse second moment infinite: density positive near 0")


def inverse_square_bias(mu: ProbabilityMeasure) -> ProbabilityMeasure:
    """Reweight the law by ``x**-2 / E[X**-2]``; right inverse of :func:`square_bias`."""
    if isinstance(mu, Atomic):
        if mu.locations.size == 1 and mu.locations[0] == 0:
            return mu
        e = _inverse_second_moment(mu)
        return Atomic(mu.locations, mu.weights / mu.locations ** 2 / e)
    if isinstance(mu, GridDensity):
        _reject_density_at_zero(mu)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.where(mu.values > 0, mu.values / mu.grid ** 2, 0.0)
        return GridDensity.normalized(mu.grid, f, mu.mass_tol)
    if isinstance(mu, Mixture):
        pairs = [(a * _inverse_second_moment(c), c) for a, c in zip(mu.weights, mu.components)]
        total = math.fsum(a for a, _ in pairs)
        return Mixture(tuple(a / total for a, _ in pairs),
                       tuple(inverse_square_bias(c) for _, c in pairs))
    _inverse_second_moment(mu)
    return inverse_square_bias(mu.to_grid())


def square_bias_cauchy(mu: MeasureOrTransform, mean: Optional[float] = None,
                       second_moment: Optional[float] = None) -> AnalyticTransform:
    """Cauchy transform of the square bias straight from ``G``:
    ``(z**2 G(z) - E[X] - z) / E[X**2]``.
    """
    mean, e2 = _moments_for(mu, mean, second_moment, want="second")
    if e2 == 0:
        raise PreconditionError("zero second moment")
    g = as_cauchy(mu).evaluator
    return AnalyticTransform(lambda z: (z * z * g(z) - mean - z) / e2, TransformKind.CAUCHY,
                             "square bias (from G)")


# --------------------------------------------------------------------------
# transforms defined through G

def _moments_for(mu, mean, second, want):
    """Fill in mean and variance (``want='variance'``) or second moment."""
    if isinstance(mu, ProbabilityMeasure):
        mom = mu.moments()
        if mom.mean is None:
            raise PreconditionError("finite second moment required")
        mean = mom.mean if mean is None else mean
        if second is None:
            second = mom.variance if want == "variance" else mom.second_moment
    if mean is None or second is None:
        raise PreconditionError(f"mean and {want} must be given for a bare transform")
    return float(mean), float(second)


def el_gordo(mu: MeasureOrTransform) -> AnalyticTransform:
    """``z -> -sqrt(G(z) / z)``."""
    g = as_cauchy(mu).evaluator
    return AnalyticTransform(lambda z: -principal_sqrt(g(z) / z), TransformKind.CAUCHY,
                             "el gordo")


def flat_combine(mu: MeasureOrTransform, nu: MeasureOrTransform) -> AnalyticTransform:
    """Geometric mean ``sqrt(G_mu) sqrt(G_nu)`` of two Cauchy transforms."""
    g1, g2 = as_cauchy(mu).evaluator, as_cauchy(nu).evaluator
    return AnalyticTransform(lambda z: principal_sqrt(g1(z)) * principal_sqrt(g2(z)),
                             TransformKind.CAUCHY, "flat combination")


def free_zero_bias(mu: MeasureOrTransform, mean: Optional[float] = None,
                   variance: Optional[float] = None) -> AnalyticTransform:
    """Free zero bias.

    For mean ``m`` and variance ``s2`` the transform is
    ``-sqrt(((z - m) G(z) - 1) / s2)``: the centered formula, translated by ``m``.
    """
    m, s2 = _moments_for(mu, mean, variance, want="variance")
    if not s2 > 0 or not math.isfinite(s2):
        raise PreconditionError("free zero bias needs finite nonzero variance")
    g = as_cauchy(mu).evaluator
    return AnalyticTransform(lambda z: -principal_sqrt(((z - m) * g(z) - 1) / s2),
                             TransformKind.CAUCHY, "free zero bias")


def box_flat_raw(mu: MeasureOrTransform, mean: Optional[float] = None,
                 second_moment: Optional[float] = None) -> AnalyticTransform:
    """El Gordo of the square bias, ``-sqrt((z G - E[X]/z - 1) / E[X**2])``.

    Coincides with :func:`free_zero_bias` only for centered laws.
    """
    m, e2 = _moments_for(mu, mean, second_moment, want="second")
    if not e2 > 0:
        raise PreconditionError("zero second moment")
    g = as_cauchy(mu).evaluator
    return AnalyticTransform(lambda z: -principal_sqrt((z * g(z) - m / z - 1) / e2),
                             TransformKind.CAUCHY, "el gordo of square bias")


# --------------------------------------------------------------------------
# classical zero bias

def _tail_first_moment_nodes(mu: ProbabilityMeasure, span: float):
    """Nodes at which ``t -> E[X 1{X > t}]`` must be sampled to be exact under
    linear interpolation (up to jumps of width ``1e-10 span``)."""
    if isinstance(mu, Atomic):
        d = 1e-10 * span
        return np.concatenate([mu.locations - d, mu.locations])
    if isinstance(mu, GridDensity):
        return mu.grid
    if isinstance(mu, Mixture):
        return np.concatenate([_tail_first_moment_nodes(c, span) for c in mu.components])
    raise TypeError


def _tail_first_moment(mu: ProbabilityMeasure, t: np.ndarray) -> np.ndarray:
    """``E[X 1{X > t}]``."""
    if isinstance(mu, Atomic):
        above = mu.locations[None, :] > t[:, None]
        return above @ (mu.weights * mu.locations)
    if isinstance(mu, GridDensity):
        g, v = mu.grid, mu.values
        s = np.diff(v) / np.diff(g)
        c0 = v[:-1] - s * g[:-1]

        def prim(x, i):
            # antiderivative of x (c0 + s x) on cell i
            return c0[i] * x * x / 2 + s[i] * x ** 3 / 3

        cells = prim(g[1:], np.arange(g.size - 1)) - prim(g[:-1], np.arange(g.size - 1))
        suffix = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        i = np.clip(np.searchsorted(g, t, side="right") - 1, 0, g.size - 2)
        tc = np.clip(t, g[0], g[-1])
        partial = prim(g[i + 1], i) - prim(tc, i)
        out = suffix[i + 1] + partial
        out = np.where(t < g[0], suffix[0], out)
        return np.where(t >= g[-1], 0.0, out)
    if isinstance(mu, Mixture):
        return sum(a * _tail_first_moment(c, t) for a, c in zip(mu.weights, mu.components))
    raise TypeError


def _gridable(mu: ProbabilityMeasure) -> ProbabilityMeasure:
    if isinstance(mu, (Atomic, GridDensity)):
        return mu
    if isinstance(mu, Mixture):
        return Mixture(mu.weights, tuple(_gridable(c) for c in mu.components))
    if isinstance(mu, CauchyLaw):
        raise PreconditionError("classical zero bias needs finite variance")
    return mu.to_grid()


def classical_zero_bias(mu: ProbabilityMeasure) -> GridDensity:
    """Law of ``U X□`` with ``U`` uniform on [0, 1]: density ``E[X 1{X > t}] / s2``.

    A law with nonzero mean is centered first and the result shifted back.
    """
    mom = mu.moments()
    if mom.variance is None or not mom.variance > 0:
        raise PreconditionError("classical zero bias needs finite nonzero variance")
    m = mom.mean
    base = _gridable(mu.shift(-m) if m != 0 else mu)
    lo, hi = base.support_hull()
    lo, hi = min(lo, 0.0), max(hi, 0.0)
    span = hi - lo
    nodes = np.concatenate([_tail_first_moment_nodes(base, span), np.linspace(lo, hi, 9)])
    nodes = np.unique(nodes)
    dens = _tail_first_moment(base, nodes) / mom.variance
    out = GridDensity.normalized(nodes, np.clip(dens, 0.0, None))
    return out.shift(m) if m != 0 else out


# --------------------------------------------------------------------------
# step chains

STEP_NAMES = ("square_bias", "inverse_square_bias", "el_gordo", "free_zero_bias",
              "classical_zero_bias", "shift", "scale", "flat")


@dataclass(frozen=True)
class Step:
    name: str
    arg: object = None

    def __str__(self):
        if self.name in ("shift", "scale"):
            return f"{self.name}:{self.arg:g}"
        if self.name == "flat":
            return "flat"
        return self.name


@dataclass
class BiasChainRecord:
    input: ProbabilityMeasure
    steps: list = field(default_factory=list)
    output: Optional[MeasureOrTransform] = None
    hull: tuple = (0.0, 0.0)  # interval containing the support of the output


def apply_chain(mu: ProbabilityMeasure, steps: Sequence[Step],
                materialize: Callable[[AnalyticTransform, tuple], ProbabilityMeasure],
                moments_of: Callable[[AnalyticTransform, tuple], tuple]
                ) -> BiasChainRecord:
    """Apply ``steps`` left to right.

    ``materialize(transform, hull)`` turns an intermediate transform into a
    measure whenever the next step needs one; ``hull`` bounds its support.
    ``moments_of(transform, hull)`` returns ``(mean, variance)`` of a
    transform, so that free zero bias can act on transforms directly.
    """
    if not steps:
        raise PreconditionError("empty step chain")
    cur: MeasureOrTransform = mu
    hull = mu.support_hull()
    for step in steps:
        if step.name in ("el_gordo", "flat"):
            if step.name == "el_gordo":
                cur = el_gordo(cur)
                hull = (min(hull[0], 0.0), max(hull[1], 0.0))
            else:
                cur = flat_combine(cur, step.arg)
                other = step.arg.support_hull()
                hull = (min(hull[0], other[0]), max(hull[1], other[1]))
            continue
        if step.name == "free_zero_bias":
            if isinstance(cur, AnalyticTransform):
                m, s2 = moments_of(cur, hull)
                cur = free_zero_bias(cur, mean=m, variance=s2)
            else:
                cur = free_zero_bias(cur)
            continue
        if isinstance(cur, AnalyticTransform):
            cur = materialize(cur, hull)
        if step.name == "square_bias":
            cur = square_bias(cur)
        elif step.name == "inverse_square_bias":
            cur = inverse_square_bias(cur)
        elif step.name == "classical_zero_bias":
            cur = classical_zero_bias(cur)
        elif step.name == "shift":
            cur = cur.shift(step.arg)
        elif step.name == "scale":
            cur = cur.scale(step.arg)
        else:
            raise PreconditionError(f"unknown step {step.name!r}")
        hull = cur.support_hull()
    return BiasChainRecord(mu, list(steps), cur, hull)
