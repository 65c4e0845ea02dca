"""Densities, supports and moments recovered from Cauchy transforms.

The density is read off the imaginary part of ``G`` slightly above the real
axis, ``rho_eps(x) = -Im G(x + i eps) / pi``, at two heights and extrapolated
to ``eps = 0``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FreeBiasError, MassDeficitError, PreconditionError
from .holomorphic import AnalyticTransform
from .measure import MASS_TOL, GridDensity

DEFAULT_EPS = (1e-2, 5e-3)
DEFAULT_GRID_POINTS = 2049
DEFAULT_PAD = 0.1
NEGATIVITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    eps_used: np.ndarray
    mass: float
    failed: np.ndarray  # points where the evaluator raised
    min_raw: float = 0.0  # most negative value before clamping

    @property
    def ok(self) -> bool:
        return not self.failed.any()


def default_grid(hull: tuple[float, float], n: int = DEFAULT_GRID_POINTS,
                 pad: float = DEFAULT_PAD) -> np.ndarray:
    lo, hi = hull
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise PreconditionError("unbounded support: give an explicit grid")
    width = hi - lo if hi > lo else 1.0
    return np.linspace(lo - pad * width, hi + pad * width, n)


def _im_along(t: AnalyticTransform, x: np.ndarray, eps: float):
    """``-Im t(x + i eps) / pi``; points where the evaluator raises become NaN."""
    z = np.asarray(x, dtype=float) + 1j * eps
    try:
        return -np.asarray(t.evaluate_bulk(z)).imag / np.pi, np.zeros(z.shape, bool)
    except FreeBiasError:
        pass
    out = np.full(z.shape, np.nan)
    bad = np.zeros(z.shape, bool)

    # failures cluster, so halving the failing batch isolates them cheaply
    def solve(lo, hi):
        try:
            out[lo:hi] = -np.asarray(t.evaluator(z[lo:hi])).imag / np.pi
        except FreeBiasError:
            if hi - lo == 1:
                bad[lo] = True
            else:
                mid = (lo + hi) // 2
                solve(lo, mid)
                solve(mid, hi)

    solve(0, z.size)
    return out, bad


def stieltjes_density(t: AnalyticTransform, grid: Sequence[float],
                      eps_schedule: Sequence[float] = DEFAULT_EPS) -> DensityCurve:
    """Density on ``grid`` by Stieltjes inversion with Richardson extrapolation.

    Only the last two heights of ``eps_schedule`` enter the result; the
    extrapolation assumes an error linear in ``eps``.
    """
    x = np.asarray(grid, dtype=float)
    eps = [float(e) for e in eps_schedule]
    if x.ndim != 1 or np.any(np.diff(x) <= 0):
        raise PreconditionError("grid must be strictly ascending")
    if len(eps) < 2 or any(e <= 0 for e in eps) or any(np.diff(eps) >= 0):
        raise PreconditionError("eps schedule must be positive, strictly descending, length >= 2")
    e1, e2 = eps[-2], eps[-1]
    r1, bad1 = _im_along(t, x, e1)
    r2, bad2 = _im_along(t, x, e2)
    raw = (e1 * r2 - e2 * r1) / (e1 - e2)
    failed = bad1 | bad2
    min_raw = float(np.nanmin(raw)) if np.any(~failed) else 0.0
    vals = np.where(failed, np.nan, np.clip(raw, 0.0, None))
    mass = float(np.trapezoid(np.nan_to_num(vals), x))
    return DensityCurve(x, vals, np.full(x.shape, e2), mass, failed, min_raw)


def support_detect(t: AnalyticTransform, scan_interval: tuple[float, float],
                   eps: float = 1e-4, threshold: float = 1e-3,
                   n: int = 2001) -> list[tuple[float, float]]:
    """Maximal intervals where ``-Im t(x + i eps) / pi > threshold``.

    Each endpoint is bisected between the neighbouring scan points. Points
    where the evaluator fails count as outside.
    """
    if not (eps > 0 and threshold > 0):
        raise PreconditionError("eps and threshold must be positive")
    x = np.linspace(scan_interval[0], scan_interval[1], n)

    def above(pts):
        rho, _ = _im_along(t, np.atleast_1d(pts), eps)
        return rho > threshold

    mask = above(x)
    d = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1) - 1

    def refine(inside, outside):
        a, b = x[inside], x[outside]
        for _ in range(40):
            mid = 0.5 * (a + b)
            if above(mid)[0]:
                a = mid
            else:
                b = mid
        return float(a)

    out = []
    for s, e in zip(starts, ends):
        lo = x[s] if s == 0 else refine(s, s - 1)
        hi = x[e] if e == n - 1 else refine(e, e + 1)
        out.append((float(lo), float(hi)))
    return out


def curve_moment(c: DensityCurve, k: int) -> float:
    v = np.nan_to_num(c.values)
    return float(np.trapezoid(c.grid ** k * v, c.grid))


def curve_cdf(c: DensityCurve):
    """Nondecreasing CDF by cumulative trapezoid, linear between grid points."""
    v = np.nan_to_num(c.values)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(c.grid))])
    return lambda x: np.interp(x, c.grid, cum, left=0.0, right=cum[-1])


def measure_from_curve(c: DensityCurve, mass_tol: float = MASS_TOL) -> GridDensity:
    """Promote a curve to a measure, renormalizing a mass error within ``mass_tol``."""
    if not c.ok:
        raise PreconditionError(f"curve has {int(c.failed.sum())} failed points")
    if abs(c.mass - 1.0) > mass_tol:
        raise MassDeficitError(
            f"curve mass {c.mass:.10g} differs from 1 by more than {mass_tol:g}", c.mass)
    return GridDensity.normalized(c.grid, c.values, mass_tol)


def curve_summary(c: DensityCurve, threshold: float = 1e-3) -> dict:
    m0 = c.mass
    m1 = curve_moment(c, 1) / m0 if m0 > 0 else float("nan")
    m2 = curve_moment(c, 2) / m0 if m0 > 0 else float("nan")
    pos = np.flatnonzero(np.nan_to_num(c.values) > threshold)
    support = [float(c.grid[pos[0]]), float(c.grid[pos[-1]])] if pos.size else [None, None]
    return {"mass": m0, "mean": m1, "variance": m2 - m1 * m1, "support": support}


def write_curve_csv(c: DensityCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "rho", "eps"])
        for x, r, e in zip(c.grid, c.values, c.eps_used):
            w.writerow([f"{x:.17g}", f"{r:.17g}", f"{e:.17g}"])


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def transform_moments(g: AnalyticTransform, hull: tuple[float, float],
                      kmax: int = 2, n: int = 256) -> np.ndarray:
    """Moments ``E[X**k]``, ``k = 0..kmax``, of the law behind ``g``.

    Uses the Laurent coefficients of ``G`` on a circle around the support;
    the lower half of the circle is filled in with ``G(conj z) = conj G(z)``.
    ``hull`` must contain the support.
    """
    lo, hi = hull
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
    rad = 2 * r + 1.0
    theta = (np.arange(n) + 0.5) * 2 * np.pi / n
    z = c + rad * np.exp(1j * theta)
    upper = z.imag > 0
    vals = np.empty(n, dtype=complex)
    vals[upper] = g.evaluator(z[upper])
    vals[~upper] = np.conj(g.evaluator(np.conj(z[~upper])))
    # central moments E[(X - c)^k] are Laurent coefficients of G around c
    central = np.array([np.mean(rad ** (k + 1) * np.exp(1j * (k + 1) * theta) * vals).real
                        for k in range(kmax + 1)])
    # convert to raw moments via the binomial expansion of (Y + c)^k
    raw = np.array([sum(math.comb(k, j) * central[j] * c ** (k - j) for j in range(k + 1))
                    for k in range(kmax + 1)])
    return raw
