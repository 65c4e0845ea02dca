"""Freely infinitely divisible laws with finite variance.

A law ``X`` with mean ``m`` and variance ``s2 > 0`` is freely infinitely
divisible iff ``phi_X(z) = m + s2 * G_Y(z)`` for a probability law ``Y``,
its Levy measure. This module goes both ways between ``X`` and ``(m, s2, Y)``
and carries closed-form examples used as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._solve import fixed_point
from .errors import DomainError, PreconditionError, SolverError
from .freeconv import (NEWTON_AFTER, SOLVER_TOL, MAX_ITER, convolution_root_solve,
                       voiculescu_transform)
from .holomorphic import (AnalyticTransform, TransformKind, cauchy_transform,
                          principal_cbrt, principal_sqrt, tail_normalization_check)
from .measure import ProbabilityMeasure
from .transforms import square_bias

#: largest allowed residual of ``(z - m) G - 1 = s2 G G_Y(1/G)``
LK_RESIDUAL = 1e-9
TAIL_TOL = 1e-3
#: height of the unit-mass check on a recovered Levy measure; high enough
#: that a Levy measure's mean (|iyG - 1| ~ |E Y| / y) does not register
TAIL_HEIGHT = 1e5


@dataclass(frozen=True)
class LevyTriple:
    mean: float
    variance: float
    levy: ProbabilityMeasure

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise PreconditionError("mean and variance must be finite")
        if not self.variance > 0:
            raise PreconditionError("variance must be positive")
        if not isinstance(self.levy, ProbabilityMeasure):
            raise PreconditionError("Levy measure must be a probability measure")


def phi_from_levy(t: LevyTriple, z):
    """``m + s2 * G_Y(z)``."""
    pts = np.asarray(z, dtype=complex)
    if not np.all(pts.imag > 0):
        raise DomainError("points must lie in the open upper half plane")
    out = t.mean + t.variance * cauchy_transform(t.levy).evaluator(pts)
    return out.item() if np.ndim(z) == 0 else out


def lk_residual(t: LevyTriple, z, g) -> np.ndarray:
    """``|(z - m) G - 1 - s2 G G_Y(1/G)|`` for candidate values ``g`` of ``G_X(z)``."""
    z = np.asarray(z, dtype=complex)
    g = np.asarray(g, dtype=complex)
    gy = cauchy_transform(t.levy).evaluator(1.0 / g)
    return np.abs((z - t.mean) * g - 1.0 - t.variance * g * gy)


def cauchy_from_levy(t: LevyTriple, tol: float = SOLVER_TOL,
                     max_iter: int = MAX_ITER) -> AnalyticTransform:
    """Cauchy transform of the law with Levy triple ``t``.

    ``F_X(z)`` is the fixed point of ``w -> z - phi(w)``, iterated from
    ``w = z``; problems still moving after a few hundred steps are finished
    by damped Newton on ``w + phi(w) - z``. Every value is checked against
    the defining functional equation before it is returned.
    """
    gy = cauchy_transform(t.levy)
    m, s2 = t.mean, t.variance

    def step(w, z):
        return z - m - s2 * gy.evaluator(w)

    def dstep(w, z):
        return -s2 * gy.raw_derivative(w)

    def g(z):
        flat = np.ravel(z)
        w = fixed_point(step, flat, flat, tol, max_iter, NEWTON_AFTER, dstep,
                        "Levy-Khintchine solve")
        out = 1.0 / w
        res = lk_residual(t, flat, out)
        bad = ~(res <= LK_RESIDUAL * np.maximum(1.0, np.abs(flat)))
        if bad.any():
            i = int(np.argmax(np.where(bad, res, -1.0)))
            raise SolverError(f"Levy-Khintchine solve: residual {res[i]:.3g} at z = {flat[i]}",
                              iterate=complex(w[i]), residual=float(res[i]))
        return out.reshape(np.shape(z))

    return AnalyticTransform(g, TransformKind.CAUCHY, f"LK({m:g}, {s2:g}, {t.levy!r})")


def levy_from_measure(mu, mean: Optional[float] = None,
                      variance: Optional[float] = None) -> AnalyticTransform:
    """``G_Y = (phi_mu - m) / s2`` as an evaluator.

    Raises :class:`PreconditionError` if the result fails the unit-mass tail
    check, i.e. ``mu`` is not consistent with free infinite divisibility at
    the tested scale. Evaluate it inside a cone where ``F_mu`` is invertible.
    """
    if isinstance(mu, ProbabilityMeasure):
        mom = mu.moments()
        mean = mom.mean if mean is None else mean
        variance = mom.variance if variance is None else variance
    if mean is None or variance is None:
        raise PreconditionError("mean and variance are needed for a transform input")
    if not variance > 0:
        raise PreconditionError("variance must be positive")

    def gy(z):
        return (voiculescu_transform(mu, z, variance=variance) - mean) / variance

    out = AnalyticTransform(gy, TransformKind.CAUCHY, "Levy measure")
    tail = tail_normalization_check(out, TAIL_HEIGHT)
    if not tail <= TAIL_TOL:
        raise PreconditionError("not consistent with free infinite divisibility at tested scale "
                                f"(tail check {tail:.3g} > {TAIL_TOL:g})")
    return out


def compound_free_poisson(rate: float, jump: ProbabilityMeasure) -> LevyTriple:
    """Triple ``(rate E[U], rate E[U^2], law of U squared-biased)`` for jump law ``U``."""
    if not rate > 0:
        raise PreconditionError("rate must be positive")
    mom = jump.moments()
    if mom.second_moment is None or not math.isfinite(mom.second_moment):
        raise PreconditionError("jump law needs a finite second moment")
    if not mom.second_moment > 0:
        raise PreconditionError("jump law has zero second moment")
    return LevyTriple(rate * mom.mean, rate * mom.second_moment, square_bias(jump))


def levy_from_roots(mu: ProbabilityMeasure, n: int, w, tol: float = SOLVER_TOL):
    """Cauchy transform of the square-biased ``n``-th free root of centered ``mu`` at ``w``.

    With ``F_n`` the root's reciprocal Cauchy transform and ``z`` the point
    where ``F_mu(z) = F_n(w)``, the value is ``(w / s2) (z / F_n(w) - 1)``.
    It tends to ``G_Y(w)`` as ``n`` grows.
    """
    if n < 1 or int(n) != n:
        raise PreconditionError("root order must be a positive integer")
    mom = mu.moments()
    if mom.variance is None or not mom.variance > 0:
        raise PreconditionError("levy_from_roots needs finite positive variance")
    centered = mu.shift(-mom.mean) if mom.mean != 0 else mu
    pts = np.asarray(w, dtype=complex)
    z, f = convolution_root_solve(centered, n, pts, tol)
    out = pts / mom.variance * (np.asarray(z) / np.asarray(f) - 1.0)
    return out.item() if np.ndim(w) == 0 else out


# --------------------------------------------------------------------------
# closed-form gallery

def gallery_semicircle_levy_cauchy(variance: float, t: float, z):
    """Mean zero, variance ``variance``, Levy measure ``Semicircle(0, t)``."""
    s2 = variance
    z = np.asarray(z, dtype=complex)
    root = principal_sqrt(z * z - 4 * (s2 + t))
    # minus branch, rationalized: numerator times (2t + s2) z + s2 root
    # equals 4 (s2 + t) (t z^2 + s2^2)
    return 2 * (s2 + t) / ((2 * t + s2) * z + s2 * root)


def gallery_semicircle_levy_density(variance: float, t: float, x):
    s2 = variance
    x = np.asarray(x, dtype=float)
    inside = 4 * (s2 + t) - x * x
    out = s2 * np.sqrt(np.clip(inside, 0, None)) / (2 * np.pi * (t * x * x + s2 * s2))
    out = np.where(inside >= 0, out, 0.0)
    return out.item() if out.ndim == 0 else out


_XI = np.exp(2j * np.pi / 3)
AZADI_EDGE = 1.5 * math.sqrt(3)


def azadi_candidates(z) -> list:
    """The three roots ``xi^k r + 1/(3 xi^k r)``, ``k = 0, 1, -1``, of ``w^3 - w + 1/z``."""
    z = np.asarray(z, dtype=complex)
    r = principal_cbrt(-1 / (2 * z) + principal_sqrt(1 / (4 * z * z) - 1 / 27))
    return [_XI ** k * r + 1 / (3 * _XI ** k * r) for k in (0, 1, -1)]


def _azadi_index() -> int:
    cands = [lambda z, k=k: azadi_candidates(z)[k] for k in range(3)]
    return polynomial_root_select(cands)


def gallery_azadi_cauchy(z):
    """Cauchy transform of the law with Levy triple ``(0, 1, Rademacher)``."""
    return azadi_candidates(z)[_azadi_index()]


def gallery_azadi_density(x):
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("the closed-form density is not defined at 0")
    a = 1 / (2 * np.abs(x))
    b = np.sqrt(np.clip(a * a - 1 / 27, 0, None))
    out = math.sqrt(3) / (2 * math.pi) * (np.cbrt(a + b) - np.cbrt(a - b))
    out = np.where(np.abs(x) <= AZADI_EDGE, out, 0.0)
    return out.item() if out.ndim == 0 else out


def gallery_cauchy_levy(variance: float, z):
    """Mean zero, variance ``variance``, Levy measure the standard Cauchy law."""
    s2 = variance
    z = np.asarray(z, dtype=complex)
    root = principal_sqrt((z + 1j) ** 2 - 4 * s2)
    # (z - i - root) / (2 (s2 - i z)) with the numerator rationalized:
    # (z - i)^2 - root^2 = 4 (s2 - i z)
    return 2.0 / (z - 1j + root)


def gallery_cauchy_levy_density(variance: float, x):
    s2 = variance
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    a = x * x - 1 - 4 * s2
    b = x * x + 1 + 4 * s2
    s = np.sqrt(a * a + 4 * x * x)
    # s - b and s - a in cancellation-free form
    s_minus_b = -16 * s2 * x * x / (s + b)
    s_minus_a = np.where(a > 0, 4 * x * x / np.where(a > 0, s + a, 1.0), s - a)
    b0 = np.sqrt(s_minus_a / 2)
    a0 = np.sqrt((s + a) / 2)
    # |x| a0 - x^2 = |x| (a0^2 - x^2) / (a0 + |x|), with 2 (a0^2 - x^2) = s - b
    head = ax * (s_minus_b / 2) / (a0 + ax)
    out = (head + s2 * (b0 + 1)) / (2 * math.pi * (s2 * s2 + x * x))
    return out.item() if out.ndim == 0 else out


def polynomial_root_select(candidates: Sequence[Callable], heights=(1e2, 1e3),
                           threshold: float = 0.1) -> int:
    """Index of the one candidate ``w`` with ``i y w(i y) -> 1``.

    The decision is made at the largest height. Raises
    :class:`PreconditionError` if no candidate is within ``threshold`` of 1
    or if two are.
    """
    if len(candidates) < 2:
        raise PreconditionError("need at least two candidates")
    y = max(heights)
    dist = [abs(1j * y * complex(np.asarray(c(np.array([1j * y]))).ravel()[0]) - 1)
            for c in candidates]
    close = [i for i, d in enumerate(dist) if d <= threshold]
    if len(close) != 1:
        detail = ", ".join(f"{d:.3g}" for d in dist)
        raise PreconditionError(("no" if not close else "ambiguous") +
                                f" candidate root behaves like 1/z (distances {detail})")
    return close[0]


__all__ = [
    "LevyTriple", "phi_from_levy", "cauchy_from_levy", "lk_residual", "levy_from_measure",
    "compound_free_poisson", "levy_from_roots", "gallery_semicircle_levy_cauchy",
    "gallery_semicircle_levy_density", "azadi_candidates", "gallery_azadi_cauchy",
    "gallery_azadi_density", "gallery_cauchy_levy", "gallery_cauchy_levy_density",
    "polynomial_root_select", "AZADI_EDGE",
]
