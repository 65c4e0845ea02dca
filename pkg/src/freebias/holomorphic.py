"""Complex-analytic kernel.

Principal roots with the argument taken in ``[0, 2*pi)``, truncated cones,
and the :class:`AnalyticTransform` wrapper used for Cauchy transforms and
everything built from them.

All evaluators are vectorized: they accept a complex array of points in the
open upper half plane and return an array of the same shape.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import singledispatch
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .measure import (Arcsine, Atomic, CauchyLaw, FreePoisson, GridDensity,
                      Mixture, ProbabilityMeasure, Semicircle)

_DEBUG = os.environ.get("FREEBIAS_DEBUG", "") not in ("", "0")

#: points per chunk in bulk evaluation; fixed so results do not depend on threads
BULK_CHUNK = 512


def _like(out, ref):
    return out.item() if np.ndim(ref) == 0 else out


def principal_sqrt(zeta):
    """Square root with image in the closed upper half plane.

    For ``zeta = r exp(i theta)`` with ``theta`` in ``[0, 2 pi)`` this is
    ``sqrt(r) exp(i theta / 2)``. The branch cut is ``[0, inf)``.
    """
    s = np.sqrt(np.asarray(zeta, dtype=complex))
    return _like(np.where(s.imag < 0, -s, s), zeta)


def principal_cbrt(zeta):
    """Cube root ``r**(1/3) exp(i theta / 3)`` with ``theta`` in ``[0, 2 pi)``."""
    z = np.asarray(zeta, dtype=complex)
    theta = np.angle(z)
    theta = np.where(theta < 0, theta + 2 * np.pi, theta)
    return _like(np.cbrt(np.abs(z)) * np.exp(1j * theta / 3), zeta)


@dataclass(frozen=True)
class TruncatedCone:
    """``{z : alpha Im z > |Re z|, |z| > beta}``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("cone parameters must be positive")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.alpha * z.imag > np.abs(z.real)) & (np.abs(z) > self.beta)


class TransformKind(str, enum.Enum):
    CAUCHY = "CauchyG"
    RECIPROCAL = "ReciprocalF"
    VOICULESCU = "Voiculescu"
    R_TRANSFORM = "RTransform"
    DERIVED = "Derived"


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FREEBIAS_THREADS", "1")))
    except ValueError:
        return 1


class AnalyticTransform:
    """A holomorphic function on the upper half plane.

    ``evaluator`` maps a complex ndarray to a complex ndarray elementwise.
    ``derivative`` is optional; without it a fourth-order central difference
    along the real direction is used.
    """

    def __init__(self, evaluator: Callable[[np.ndarray], np.ndarray],
                 kind: TransformKind = TransformKind.DERIVED,
                 provenance: str = "",
                 derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None):
        self.evaluator = evaluator
        self.kind = TransformKind(kind)
        self.provenance = provenance
        self._derivative = derivative

    def __repr__(self):
        return f"AnalyticTransform({self.kind.value}: {self.provenance})"

    def __call__(self, z):
        pts = np.asarray(z, dtype=complex)
        if not np.all(pts.imag > 0):
            raise DomainError("transforms are evaluated on the open upper half plane only")
        out = np.asarray(self.evaluator(pts), dtype=complex)
        if _DEBUG:
            _check_postcondition(self.kind, pts, out)
        return _like(out, z)

    def derivative(self, z):
        pts = np.asarray(z, dtype=complex)
        return _like(self.raw_derivative(pts), z)

    def raw_derivative(self, pts):
        if self._derivative is not None:
            return self._derivative(pts)
        f = self.evaluator
        h = 1e-3 * np.minimum(pts.imag, 1.0)
        return (8 * (f(pts + h) - f(pts - h)) - (f(pts + 2 * h) - f(pts - 2 * h))) / (12 * h)

    def evaluate_bulk(self, points, threads: Optional[int] = None) -> np.ndarray:
        """Evaluate on many points, optionally across threads.

        Points are cut into fixed-size chunks, so the output is bit-identical
        for every thread count.
        """
        pts = np.ravel(np.asarray(points, dtype=complex))
        if not np.all(pts.imag > 0):
            raise DomainError("transforms are evaluated on the open upper half plane only")
        chunks = [pts[i:i + BULK_CHUNK] for i in range(0, pts.size, BULK_CHUNK)]
        n = threads if threads is not None else _thread_count()
        if n > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=n) as pool:
                parts = list(pool.map(self.evaluator, chunks))
        else:
            parts = [self.evaluator(c) for c in chunks]
        if not parts:
            return np.zeros(0, dtype=complex)
        return np.concatenate(parts).reshape(np.shape(points))


def _check_postcondition(kind, z, out):
    if kind is TransformKind.CAUCHY:
        ok = (out.imag <= 0) & (np.abs(out) <= (1 + 1e-9) / z.imag)
        if not np.all(ok):
            raise AssertionError("Cauchy transform left the lower half plane or broke |G| <= 1/Im z")
    elif kind is TransformKind.RECIPROCAL:
        if not np.all(out.imag >= z.imag * (1 - 1e-9)):
            raise AssertionError("reciprocal transform violates Im F >= Im z")


def as_cauchy(obj) -> AnalyticTransform:
    """Accept a measure or an already built Cauchy transform."""
    if isinstance(obj, AnalyticTransform):
        return obj
    if isinstance(obj, ProbabilityMeasure):
        return cauchy_transform(obj)
    raise TypeError(f"expected a measure or AnalyticTransform, got {type(obj).__name__}")


def reciprocal_transform(g: AnalyticTransform) -> AnalyticTransform:
    """``F = 1 / G`` with ``F' = -G' / G**2``."""
    gv = g.evaluator

    def deriv(z):
        val = gv(z)
        return -g.raw_derivative(z) / (val * val)

    return AnalyticTransform(lambda z: 1.0 / gv(z), TransformKind.RECIPROCAL,
                             f"1/({g.provenance})", deriv)


def tail_normalization_check(g: AnalyticTransform, y_max: float = 1e3) -> float:
    """``|i y G(i y) - 1|`` at ``y = y_max``; a mass-one diagnostic."""
    if y_max < 100:
        raise ValueError("y_max must be at least 100")
    z = 1j * y_max
    return float(abs(z * g(z) - 1.0))


# --------------------------------------------------------------------------
# Cauchy transforms of the measure variants

@singledispatch
def cauchy_transform(mu: ProbabilityMeasure) -> AnalyticTransform:
    raise TypeError(f"no Cauchy transform for {type(mu).__name__}")


@cauchy_transform.register
def _(mu: Atomic):
    x, w = mu.locations, mu.weights

    def g(z):
        return np.sum(w / (z[..., None] - x), axis=-1)

    def dg(z):
        d = z[..., None] - x
        return -np.sum(w / (d * d), axis=-1)

    return AnalyticTransform(g, TransformKind.CAUCHY, repr(mu), dg)


@cauchy_transform.register
def _(mu: Semicircle):
    m, s2 = mu.mean, mu.variance

    def g(z):
        w = z - m
        # rationalized form of (w - sqrt(w^2 - 4 s2)) / (2 s2); no cancellation at large |w|
        return 2.0 / (w + principal_sqrt(w * w - 4 * s2))

    return AnalyticTransform(g, TransformKind.CAUCHY, repr(mu))


@cauchy_transform.register
def _(mu: Arcsine):
    a, b = mu.left, mu.right
    return AnalyticTransform(lambda z: 1.0 / principal_sqrt((z - a) * (z - b)),
                             TransformKind.CAUCHY, repr(mu))


@cauchy_transform.register
def _(mu: FreePoisson):
    lam, a, s = mu.rate, mu.jump, mu.offset

    def g(z):
        y = z - s
        root = principal_sqrt((y - (1 + lam) * a) ** 2 - 4 * a * a * lam)
        return 2.0 / (y + (1 - lam) * a + root)

    return AnalyticTransform(g, TransformKind.CAUCHY, repr(mu))


@cauchy_transform.register
def _(mu: CauchyLaw):
    loc, hw = mu.location, mu.half_width
    return AnalyticTransform(lambda z: 1.0 / (z - loc + 1j * hw), TransformKind.CAUCHY,
                             repr(mu), lambda z: -1.0 / (z - loc + 1j * hw) ** 2)


@cauchy_transform.register
def _(mu: Mixture):
    parts = [(w, cauchy_transform(c)) for w, c in zip(mu.weights, mu.components)]

    def g(z):
        return sum(w * t.evaluator(z) for w, t in parts)

    def dg(z):
        return sum(w * t.raw_derivative(z) for w, t in parts)

    return AnalyticTransform(g, TransformKind.CAUCHY, "mixture", dg)


def _log1p_pair(u):
    """Return ``log(1 + u)`` and ``log(1 + u) - u`` accurately for small ``u``."""
    small = np.abs(u) < 0.1
    big_log = np.log(1 + np.where(small, 0.5, u))
    us = np.where(small, u, 0.0)
    # series of log(1+u) - u = sum_{k>=2} (-1)^{k+1} u^k / k
    acc = np.zeros_like(us)
    for k in range(24, 1, -1):
        acc = acc * us + (-1.0) ** (k + 1) / k
    rem_small = acc * us * us
    rem = np.where(small, rem_small, big_log - u)
    return np.where(small, us + rem_small, big_log), rem


_GRID_BLOCK = 1 << 20


@cauchy_transform.register
def _(mu: GridDensity):
    # Exact integral of the piecewise-linear density against 1/(z - t),
    # cell by cell. Cells with zero density at both ends are skipped.
    g, v = mu.grid, mu.values
    keep = (v[1:] > 0) | (v[:-1] > 0)
    t1 = g[1:][keep]
    h = np.diff(g)[keep]
    r1 = v[1:][keep]
    slope = (v[1:] - v[:-1])[keep] / h
    ncell = max(t1.size, 1)

    def cells(z, fn):
        flat = np.ravel(z)
        out = np.empty(flat.shape, dtype=complex)
        step = max(1, _GRID_BLOCK // ncell)
        for i in range(0, flat.size, step):
            out[i:i + step] = fn(flat[i:i + step, None] - t1)
        return out.reshape(np.shape(z))

    def value(d1):
        u = h / d1
        log_ratio, rem = _log1p_pair(u)
        return np.sum(r1 * log_ratio + slope * d1 * rem, axis=-1)

    def deriv(d1):
        # d/dz of r1 L + s d1 (L - u) with dL/dz = -h / (d0 d1), d0 = d1 + h
        u = h / d1
        log_ratio, rem = _log1p_pair(u)
        dl = -h / ((d1 + h) * d1)
        du = -h / (d1 * d1)
        return np.sum(r1 * dl + slope * (rem + d1 * (dl - du)), axis=-1)

    return AnalyticTransform(lambda z: cells(z, value), TransformKind.CAUCHY, "grid density",
                             lambda z: cells(z, deriv))


def conjugate_reflection(g: AnalyticTransform, z):
    """``G(conj z) = conj G(z)``: the value below the axis for ``z`` in the upper half plane."""
    return np.conj(g(z))


__all__ = [
    "principal_sqrt", "principal_cbrt", "TruncatedCone", "TransformKind",
    "AnalyticTransform", "cauchy_transform", "reciprocal_transform",
    "tail_normalization_check", "as_cauchy", "conjugate_reflection",
]
