"""Free additive convolution by subordination, convolution roots, and the
Voiculescu and R-transforms via inversion of ``F = 1/G``.

Inputs may be measures or Cauchy transforms (:class:`AnalyticTransform`),
so results chain, e.g. ``free_convolve(mu, free_convolve(mu, mu))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._solve import fixed_point, newton
from .errors import DomainError, PreconditionError, SolverError
from .holomorphic import (AnalyticTransform, TransformKind, TruncatedCone,
                          as_cauchy, reciprocal_transform)
from .measure import ProbabilityMeasure
from .transforms import free_zero_bias

SOLVER_TOL = 1e-12
MAX_ITER = 10_000
NEWTON_AFTER = 200
ROOT_RESIDUAL = 1e-9

Law = Union[ProbabilityMeasure, AnalyticTransform]


class ConeWarning(UserWarning):
    """Evaluation point lies outside the estimated cone of univalence."""


def _F(law: Law) -> AnalyticTransform:
    return reciprocal_transform(as_cauchy(law))


def _points(z) -> np.ndarray:
    pts = np.asarray(z, dtype=complex)
    if not np.all(pts.imag > 0):
        raise DomainError("points must lie in the open upper half plane")
    return pts


def _like(out, ref):
    out = np.asarray(out).reshape(np.shape(ref))
    return out.item() if np.ndim(ref) == 0 else out


# --------------------------------------------------------------------------
# subordination

def _omega(fm: AnalyticTransform, fn: AnalyticTransform, z: np.ndarray,
           tol: float, max_iter: int) -> np.ndarray:
    """Fixed point of ``w -> z + h_nu(z + h_mu(w))`` with ``h(w) = F(w) - w``."""

    def step(w, zz):
        inner = zz + fm.evaluator(w) - w
        return zz + fn.evaluator(inner) - inner

    def dstep(w, zz):
        inner = zz + fm.evaluator(w) - w
        return (fn.raw_derivative(inner) - 1.0) * (fm.raw_derivative(w) - 1.0)

    return fixed_point(step, z, z, tol, max_iter, NEWTON_AFTER, dstep, "subordination")


def subordinator(mu: Law, nu: Law, z, tol: float = SOLVER_TOL,
                 max_iter: int = MAX_ITER):
    """``omega_{mu,nu}(z)``, characterized by ``G_{mu+nu}(z) = G_mu(omega(z))``."""
    if not tol > 0:
        raise PreconditionError("tol must be positive")
    pts = _points(z)
    return _like(_omega(_F(mu), _F(nu), np.ravel(pts), tol, max_iter), z)


@dataclass(frozen=True)
class SubordinatorPair:
    omega_left: AnalyticTransform
    omega_right: AnalyticTransform
    mu: Law
    nu: Law


def subordinator_pair(mu: Law, nu: Law, tol: float = SOLVER_TOL,
                      max_iter: int = MAX_ITER) -> SubordinatorPair:
    """Both subordination functions; the right one is ``z + h_mu(omega_left(z))``."""
    fm, fn = _F(mu), _F(nu)

    def left(z):
        return _omega(fm, fn, np.ravel(z), tol, max_iter).reshape(np.shape(z))

    def right(z):
        w = left(z)
        return z + fm.evaluator(w) - w

    return SubordinatorPair(AnalyticTransform(left, TransformKind.DERIVED, "omega left"),
                            AnalyticTransform(right, TransformKind.DERIVED, "omega right"),
                            mu, nu)


def free_convolve(mu: Law, nu: Law, tol: float = SOLVER_TOL,
                  max_iter: int = MAX_ITER) -> AnalyticTransform:
    """Cauchy transform of the free additive convolution, ``G_mu(omega_{mu,nu}(z))``."""
    gm = as_cauchy(mu)
    fm, fn = _F(mu), _F(nu)

    def g(z):
        return gm.evaluator(_omega(fm, fn, np.ravel(z), tol, max_iter)).reshape(np.shape(z))

    return AnalyticTransform(g, TransformKind.CAUCHY, "free convolution")


def free_power(mu: Law, n: int, tol: float = SOLVER_TOL,
               max_iter: int = MAX_ITER) -> AnalyticTransform:
    """``mu`` convolved with itself ``n`` times, built by repeated convolution."""
    if n < 1 or int(n) != n:
        raise PreconditionError("power must be a positive integer")
    out = as_cauchy(mu)
    for _ in range(int(n) - 1):
        out = free_convolve(mu, out, tol, max_iter)
    return out


# --------------------------------------------------------------------------
# inversion of F

def inverse_F(law: Law, zeta, tol: float = SOLVER_TOL, max_iter: int = 200,
              seed=None):
    """Solve ``F(w) = zeta`` by damped Newton seeded at ``seed`` (default ``zeta``)."""
    f = _F(law)
    pts = _points(zeta)
    p = np.ravel(pts)
    w0 = p if seed is None else np.ravel(np.asarray(seed, dtype=complex))
    w = newton(lambda w, q: f.evaluator(w) - q, lambda w, q: f.raw_derivative(w),
               p, w0, tol, max_iter, "F inversion")
    return _like(w, zeta)


@dataclass(frozen=True)
class ConeEstimate:
    cone: TruncatedCone
    basis: str

    def __post_init__(self):
        if self.cone.beta < 1:
            raise ValueError("cone beta must be at least 1")


def default_cone(variance: float) -> ConeEstimate:
    sigma = math.sqrt(variance)
    return ConeEstimate(TruncatedCone(1.0, max(10 * sigma, 10.0)),
                        "beta = max(10 sigma, 10) from the bound |phi(w)| <= 2 sigma^2 / Im w")


def _variance_of(law: Law, variance: Optional[float]) -> Optional[float]:
    if variance is not None:
        return variance
    if isinstance(law, ProbabilityMeasure):
        return law.moments().variance
    return None


def voiculescu_transform(law: Law, z, cone: Optional[ConeEstimate] = None,
                         variance: Optional[float] = None, tol: float = SOLVER_TOL,
                         max_iter: int = 200):
    """``phi(z) = F^{-1}(z) - z``.

    Points outside the cone (default: :func:`default_cone` of the variance)
    raise a :class:`ConeWarning` but are still evaluated.
    """
    pts = _points(z)
    if cone is None:
        var = _variance_of(law, variance)
        cone = default_cone(var) if var is not None else None
    if cone is not None and not np.all(cone.cone.contains(pts)):
        warnings.warn("Voiculescu transform evaluated outside the cone of univalence",
                      ConeWarning, stacklevel=2)
    w = np.asarray(inverse_F(law, pts, tol, max_iter))
    return _like(w - pts, z)


def voiculescu(law: Law, cone: Optional[ConeEstimate] = None,
               variance: Optional[float] = None) -> AnalyticTransform:
    """:func:`voiculescu_transform` wrapped as a transform."""
    def phi(z):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConeWarning)
            return voiculescu_transform(law, z, cone, variance)
    return AnalyticTransform(phi, TransformKind.VOICULESCU, "phi")


def r_transform(law: Law, z_small, cone: Optional[ConeEstimate] = None,
                variance: Optional[float] = None):
    """``R(z) = phi(1/z)``; ``1/z_small`` must lie in the upper half plane."""
    zs = np.asarray(z_small, dtype=complex)
    return voiculescu_transform(law, 1.0 / zs, cone, variance)


# --------------------------------------------------------------------------
# convolution roots

def _descend(fun, dfun, p: np.ndarray, tol: float, max_iter: int, what: str,
             steps_per_decade: int = 8) -> np.ndarray:
    """Newton for ``fun(z, p) = 0`` continued down from high above each ``p``.

    At height ``H = 10 max(1, |p|)`` the root is close to ``p`` and Newton
    seeded there is safe; the height is then lowered geometrically to
    ``Im p``, each solve seeded by the previous one.
    """
    top = 10.0 * np.maximum(1.0, np.abs(p))
    decades = np.log10(top / p.imag)
    k = int(np.ceil(max(decades.max(), 0.0) * steps_per_decade))
    z = p.real + 1j * top
    for j in range(k + 1):
        frac = 1.0 - j / k if k else 0.0
        q = p.real + 1j * p.imag * (top / p.imag) ** frac
        z = newton(fun, dfun, q, z, tol if j == k else max(tol, 1e-8), max_iter, what)
    # damping can pin an iterate against the real axis, where Newton stalls
    # without solving; that happens when the true root lies below the axis
    res = np.abs(fun(z, p))
    bad = ~(res <= ROOT_RESIDUAL * np.maximum(1.0, np.abs(p)))
    if bad.any():
        worst = int(np.argmax(np.where(bad, res, -1.0)))
        raise SolverError(f"{what}: {int(bad.sum())} point(s) have no solution in the upper "
                          f"half plane (worst residual {res[worst]:.3g})",
                          iterate=complex(z[worst]), residual=float(res[worst]))
    return z


def convolution_root_solve(law: Law, n: float, y, tol: float = SOLVER_TOL,
                           max_iter: int = 200):
    """Return ``(z, F(z))`` with ``z/n + (1 - 1/n) F(z) = y``."""
    if not n >= 1:
        raise PreconditionError("root order must be at least 1")
    f = _F(law)
    pts = _points(y)
    p = np.ravel(pts)
    if n == 1:
        return _like(p, y), _like(f.evaluator(p), y)
    a = 1.0 / n
    z = _descend(lambda z, q: a * z + (1 - a) * f.evaluator(z) - q,
                 lambda z, q: a + (1 - a) * f.raw_derivative(z),
                 p, tol, max_iter, "convolution root")
    return _like(z, y), _like(f.evaluator(z), y)


def convolution_root_F(law: Law, n: float, y, tol: float = SOLVER_TOL,
                       max_iter: int = 200):
    """``F_nu(y)`` for the law ``nu`` whose ``n``-fold free power is ``law``.

    Solves ``z/n + (1 - 1/n) F(z) = y`` for ``z`` by damped Newton, starting
    from ``z = y`` high above the axis and continuing down to ``y``, and
    returns ``F(z)``.
    """
    return convolution_root_solve(law, n, y, tol, max_iter)[1]


def root_transform(law: Law, n: float, tol: float = SOLVER_TOL) -> AnalyticTransform:
    """``1 / F_nu`` for the ``n``-th root, as an evaluator.

    It is a Cauchy transform only when the root exists as a probability law.
    """
    def g(y):
        return 1.0 / np.asarray(convolution_root_F(law, n, y, tol))

    return AnalyticTransform(g, TransformKind.DERIVED, f"root of order {n}")


def root_support_bound(mu: ProbabilityMeasure) -> tuple[float, float]:
    """Interval containing the supports of all free convolution roots of ``mu``."""
    lo, hi = mu.support_hull()
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise PreconditionError("root support bound needs compact support")
    mom = mu.moments()
    m, s2 = mom.mean, mom.variance
    r = max(abs(lo - m), abs(hi - m))
    return (m - r - s2 - 1, m + r + s2 + 1)


def replace_one_check(mu: Law, n: int, z, mean: Optional[float] = None,
                      variance: Optional[float] = None) -> np.ndarray:
    """``|G_{S_n o}(z) - G_{X o}(omega_{X, S_{n-1}}(z))|`` for iid summands.

    ``S_n`` is the ``n``-fold free power of the mean-zero law ``mu``.
    """
    if n < 2:
        raise PreconditionError("replace-one needs n >= 2")
    if isinstance(mu, ProbabilityMeasure):
        mom = mu.moments()
        mean, variance = mom.mean, mom.variance
    if variance is None or not variance > 0:
        raise PreconditionError("replace-one needs finite nonzero variance")
    if abs(mean) > 1e-12 * max(1.0, math.sqrt(variance)):
        raise PreconditionError("replace-one needs a mean-zero law")
    pts = _points(z)
    rest = free_power(mu, n - 1)
    total = free_convolve(mu, rest)
    lhs = free_zero_bias(total, mean=0.0, variance=n * variance)(pts)
    omega = subordinator(mu, rest, pts)
    rhs = free_zero_bias(mu, mean=0.0, variance=variance)(omega)
    return np.abs(np.asarray(lhs) - np.asarray(rhs))
