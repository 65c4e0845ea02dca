"""Vectorized per-point fixed-point and Newton solvers on the upper half plane.

Solvers work on a batch of independent problems. Problem ``k`` has the
parameter ``p[k]`` (usually the evaluation point ``z``); the maps receive
the iterates and the matching parameters of the still-active problems.
Each problem is frozen once it meets the tolerance, so its result never
depends on the rest of the batch.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import SolverError

Map = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _moved(delta, w, tol):
    return np.abs(delta) > tol * np.maximum(1.0, np.abs(w))


def _fail(what, count, steps, w, res):
    worst = int(np.argmax(res))
    raise SolverError(f"{what}: {count} point(s) did not converge in {steps} steps "
                      f"(worst residual {res[worst]:.3g})",
                      iterate=complex(w[worst]), residual=float(res[worst]))


def newton(fun: Map, dfun: Map, p: np.ndarray, w0: np.ndarray, tol: float = 1e-12,
           max_iter: int = 200, what: str = "Newton solve") -> np.ndarray:
    """Damped Newton for ``fun(w, p) = 0``.

    A step is halved while it would leave the open upper half plane.
    """
    p = np.ravel(np.asarray(p, dtype=complex))
    w = np.array(np.broadcast_to(w0, p.shape), dtype=complex)
    active = np.arange(w.size)
    for _ in range(max_iter):
        if active.size == 0:
            return w
        wa, pa = w[active], p[active]
        step = fun(wa, pa) / dfun(wa, pa)
        step = np.where(np.isfinite(step), step, 0.0)
        new = wa - step
        for _ in range(60):
            out = ~(new.imag > 0)
            if not out.any():
                break
            step[out] *= 0.5
            new[out] = wa[out] - step[out]
        w[active] = new
        active = active[_moved(new - wa, new, tol)]
    if active.size:
        _fail(what, active.size, max_iter, w[active], np.abs(fun(w[active], p[active])))
    return w


def fixed_point(step: Map, p: np.ndarray, w0: np.ndarray, tol: float = 1e-12,
                max_iter: int = 10_000, newton_after: Optional[int] = None,
                dstep: Optional[Map] = None, what: str = "fixed-point iteration") -> np.ndarray:
    """Iterate ``w <- step(w, p)`` until ``|dw| <= tol * max(1, |w|)``.

    With ``newton_after`` and ``dstep`` given, problems still moving after
    that many iterations are finished by damped Newton on ``w - step(w, p)``.
    """
    p = np.ravel(np.asarray(p, dtype=complex))
    w = np.array(np.broadcast_to(w0, p.shape), dtype=complex)
    active = np.arange(w.size)
    plain = max_iter if (newton_after is None or dstep is None) else min(newton_after, max_iter)
    for _ in range(plain):
        if active.size == 0:
            return w
        wa = w[active]
        new = step(wa, p[active])
        w[active] = new
        active = active[_moved(new - wa, new, tol)]
    if active.size == 0:
        return w
    if plain < max_iter:
        w[active] = newton(lambda v, q: v - step(v, q), lambda v, q: 1.0 - dstep(v, q),
                           p[active], w[active], tol, max(max_iter - plain, 50), what)
        return w
    _fail(what, active.size, max_iter, w[active], np.abs(step(w[active], p[active]) - w[active]))
