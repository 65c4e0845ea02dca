"""Probability measures on the real line.

Every measure is an immutable value. The variants are

* :class:`Atomic` -- finitely many point masses,
* :class:`GridDensity` -- a density sampled on an ascending grid and
  linearly interpolated in between,
* the named laws :class:`Semicircle`, :class:`Arcsine`, :class:`FreePoisson`
  and :class:`CauchyLaw`,
* :class:`Mixture` -- a convex combination of other measures.

Each variant knows its moments, the convex hull of its support, and how it
transforms under ``x -> x + c`` and ``x -> a x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import InvalidMeasure, PreconditionError

#: default tolerance on the trapezoid mass of a :class:`GridDensity`
MASS_TOL = 1e-6
ATOM_MASS_TOL = 1e-12


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MomentSummary:
    """First moments of a law. ``None`` marks an undefined moment."""

    mean: Optional[float]
    variance: Optional[float]
    second_moment: Optional[float]
    abs_first_moment: Optional[float]


@dataclass(frozen=True)
class Atom:
    location: float
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise InvalidMeasure(f"atom weight must be positive, got {self.weight}")


class ProbabilityMeasure:
    """Common interface of all measure variants."""

    def moments(self) -> MomentSummary:
        raise NotImplementedError

    def support_hull(self) -> tuple[float, float]:
        raise NotImplementedError

    def shift(self, c: float) -> "ProbabilityMeasure":
        raise NotImplementedError

    def scale(self, a: float) -> "ProbabilityMeasure":
        raise NotImplementedError

    def _check_scale(self, a):
        if a == 0 or not math.isfinite(a):
            raise PreconditionError("scale factor must be finite and nonzero")

    def centered(self) -> "ProbabilityMeasure":
        m = self.moments().mean
        if m is None:
            raise PreconditionError("mean required to center a measure")
        return self.shift(-m) if m != 0 else self


def _summary(mean, second, absm) -> MomentSummary:
    var = max(second - mean * mean, 0.0)
    return MomentSummary(float(mean), float(var), float(second), float(absm))


# --------------------------------------------------------------------------
# atomic

@dataclass(frozen=True, eq=False)
class Atomic(ProbabilityMeasure):
    """Finite sum of point masses, stored sorted by location."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if x.ndim != 1 or x.shape != w.shape or x.size == 0:
            raise InvalidMeasure("atomic measure needs matching, nonempty locations and weights")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise InvalidMeasure("atom locations and weights must be finite")
        if np.any(w <= 0):
            raise InvalidMeasure("atom weights must be positive")
        if abs(w.sum() - 1.0) > ATOM_MASS_TOL:
            raise InvalidMeasure(f"atom weights sum to {w.sum():.15g}, not 1")
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        if np.any(np.diff(x) == 0):
            raise InvalidMeasure("atom locations must be distinct")
        object.__setattr__(self, "locations", _frozen_array(x))
        object.__setattr__(self, "weights", _frozen_array(w))

    @classmethod
    def from_atoms(cls, atoms: Sequence) -> "Atomic":
        pairs = [a if isinstance(a, Atom) else Atom(float(a[0]), float(a[1])) for a in atoms]
        return cls([a.location for a in pairs], [a.weight for a in pairs])

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(float(x), float(w)) for x, w in zip(self.locations, self.weights)]

    def moments(self):
        x, w = self.locations, self.weights
        return _summary(np.dot(w, x), np.dot(w, x * x), np.dot(w, np.abs(x)))

    def support_hull(self):
        return float(self.locations[0]), float(self.locations[-1])

    def shift(self, c):
        return Atomic(self.locations + c, self.weights)

    def scale(self, a):
        self._check_scale(a)
        return Atomic(self.locations * a, self.weights)

    def __repr__(self):
        body = ", ".join(f"{x:g}:{w:g}" for x, w in zip(self.locations, self.weights))
        return f"Atomic({body})"


def dirac(a: float = 0.0) -> Atomic:
    return Atomic([a], [1.0])


def rademacher() -> Atomic:
    return Atomic([-1.0, 1.0], [0.5, 0.5])


def two_point(a: float, b: float) -> Atomic:
    """Mean-zero law on {-a, b} with a, b > 0."""
    if not (a > 0 and b > 0):
        raise InvalidMeasure("two_point needs a, b > 0")
    return Atomic([-a, b], [b / (a + b), a / (a + b)])


# --------------------------------------------------------------------------
# grid density

@dataclass(frozen=True, eq=False)
class GridDensity(ProbabilityMeasure):
    """Piecewise-linear density through ``(grid[i], values[i])``, zero outside."""

    grid: np.ndarray
    values: np.ndarray
    mass_tol: float = field(default=MASS_TOL, compare=False)

    def __post_init__(self):
        x = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise InvalidMeasure("grid and values must be 1-d arrays of equal length")
        if x.size < 8:
            raise InvalidMeasure("grid density needs at least 8 points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise InvalidMeasure("grid and values must be finite")
        if np.any(np.diff(x) <= 0):
            raise InvalidMeasure("grid must be strictly ascending")
        if np.any(v < 0):
            raise InvalidMeasure("density values must be nonnegative")
        mass = np.trapezoid(v, x)
        if abs(mass - 1.0) > self.mass_tol:
            raise InvalidMeasure(f"grid density has mass {mass:.12g}, outside tolerance {self.mass_tol:g}")
        object.__setattr__(self, "grid", _frozen_array(x))
        object.__setattr__(self, "values", _frozen_array(v))

    @classmethod
    def normalized(cls, grid, values, mass_tol: float = MASS_TOL) -> "GridDensity":
        """Build from unnormalized samples, dividing by their trapezoid mass."""
        x = np.asarray(grid, dtype=float)
        v = np.clip(np.asarray(values, dtype=float), 0.0, None)
        mass = np.trapezoid(v, x)
        if not mass > 0:
            raise InvalidMeasure("grid samples carry no mass")
        return cls(x, v / mass, mass_tol)

    def density(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def cdf(self, x):
        """Exact CDF of the linear interpolant."""
        g, v = self.grid, self.values
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(g))])
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(g, x, side="right") - 1, 0, g.size - 2)
        h = np.clip(x - g[i], 0.0, g[i + 1] - g[i])
        slope = (v[i + 1] - v[i]) / (g[i + 1] - g[i])
        out = cum[i] + v[i] * h + 0.5 * slope * h * h
        out = np.where(x < g[0], 0.0, out)
        return np.where(x >= g[-1], cum[-1], out)

    def moments(self):
        g, v = self.grid, self.values
        mass = np.trapezoid(v, g)
        mean = np.trapezoid(g * v, g) / mass
        second = np.trapezoid(g * g * v, g) / mass
        absm = np.trapezoid(np.abs(g) * v, g) / mass
        return _summary(mean, second, absm)

    def support_hull(self):
        nz = np.flatnonzero(self.values > 0)
        lo = max(nz[0] - 1, 0)
        hi = min(nz[-1] + 1, self.grid.size - 1)
        return float(self.grid[lo]), float(self.grid[hi])

    def shift(self, c):
        return GridDensity(self.grid + c, self.values, self.mass_tol)

    def scale(self, a):
        self._check_scale(a)
        g, v = self.grid * a, self.values / abs(a)
        if a < 0:
            g, v = g[::-1], v[::-1]
        return GridDensity(g, v, self.mass_tol)


# --------------------------------------------------------------------------
# named laws

class _Continuous(ProbabilityMeasure):
    """Named laws with an absolutely continuous part given by ``density``."""

    def density(self, x):
        raise NotImplementedError

    def _quad_abs(self, lo, hi):
        pts = [0.0] if lo < 0 < hi else None
        val, _ = integrate.quad(lambda t: abs(t) * float(self.density(t)), lo, hi,
                                points=pts, limit=200)
        return val

    def to_grid(self, n: int = 4097) -> GridDensity:
        """Sample the density on a uniform grid over the hull and renormalize.

        Integrable edge singularities are replaced by the neighbouring value.
        """
        lo, hi = self.support_hull()
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise PreconditionError("cannot grid a law with unbounded support")
        x = np.linspace(lo, hi, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.asarray(self.density(x), dtype=float)
        bad = ~np.isfinite(v)
        if bad.any():
            v[bad] = np.interp(x[bad], x[~bad], v[~bad])
        # edge values are set so the trapezoid on each edge cell carries the
        # exact cell mass; this keeps integrable edge singularities' mass
        h = x[1] - x[0]
        for i, j in ((0, 1), (n - 1, n - 2)):
            a, b = sorted((x[i], x[j]))
            cell, _ = integrate.quad(lambda t: float(self.density(t)), a, b, limit=200)
            v[i] = max(2 * cell / h - v[j], 0.0)
        return GridDensity.normalized(x, v)


@dataclass(frozen=True)
class Semicircle(_Continuous):
    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise InvalidMeasure("semicircle variance must be positive")

    def density(self, x):
        x = np.asarray(x, dtype=float) - self.mean
        s2 = self.variance
        return np.sqrt(np.clip(4 * s2 - x * x, 0.0, None)) / (2 * np.pi * s2)

    def moments(self):
        m, s2 = self.mean, self.variance
        lo, hi = self.support_hull()
        if lo >= 0 or hi <= 0:
            absm = abs(m)
        else:
            absm = self._quad_abs(lo, hi)
        return MomentSummary(m, s2, s2 + m * m, absm)

    def support_hull(self):
        r = 2 * math.sqrt(self.variance)
        return self.mean - r, self.mean + r

    def shift(self, c):
        return Semicircle(self.mean + c, self.variance)

    def scale(self, a):
        self._check_scale(a)
        return Semicircle(self.mean * a, self.variance * a * a)


@dataclass(frozen=True)
class Arcsine(_Continuous):
    left: float
    right: float

    def __post_init__(self):
        if not self.left < self.right:
            raise InvalidMeasure("arcsine needs left < right")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.left) & (x < self.right)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = 1.0 / (np.pi * np.sqrt((x - self.left) * (self.right - x)))
        return np.where(inside, v, 0.0)

    def moments(self):
        a, b = self.left, self.right
        c, h = 0.5 * (a + b), 0.5 * (b - a)
        # x = c + h cos(theta), theta uniform on [0, pi]
        pts = [math.acos(-c / h)] if a < 0 < b else None
        absm, _ = integrate.quad(lambda t: abs(c + h * math.cos(t)), 0, math.pi, points=pts)
        return MomentSummary(c, h * h / 2, c * c + h * h / 2, absm / math.pi)

    def support_hull(self):
        return self.left, self.right

    def shift(self, c):
        return Arcsine(self.left + c, self.right + c)

    def scale(self, a):
        self._check_scale(a)
        lo, hi = sorted((self.left * a, self.right * a))
        return Arcsine(lo, hi)


@dataclass(frozen=True)
class FreePoisson(_Continuous):
    """Free Poisson law with rate ``rate`` and jump size ``jump``, translated by ``offset``.

    For ``rate < 1`` there is an atom of mass ``1 - rate`` at ``offset``.
    """

    rate: float
    jump: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidMeasure("free Poisson rate must be positive")
        if self.jump == 0 or not math.isfinite(self.jump):
            raise InvalidMeasure("free Poisson jump must be finite and nonzero")

    @property
    def atom_mass(self) -> float:
        return max(1.0 - self.rate, 0.0)

    def edges(self) -> tuple[float, float]:
        lam, a = self.rate, self.jump
        e = sorted(((1 - math.sqrt(lam)) ** 2 * a, (1 + math.sqrt(lam)) ** 2 * a))
        return e[0] + self.offset, e[1] + self.offset

    def density(self, x):
        """Absolutely continuous part only."""
        lam, a = self.rate, self.jump
        y = np.asarray(x, dtype=float) - self.offset
        disc = 4 * lam * a * a - (y - (1 + lam) * a) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.sqrt(np.clip(disc, 0.0, None)) / (2 * np.pi * abs(a) * np.abs(y))
        return np.where(disc > 0, v, 0.0)

    def moments(self):
        lam, a, s = self.rate, self.jump, self.offset
        mean = lam * a + s
        var = lam * a * a
        lo, hi = self.edges()
        absm = self.atom_mass * abs(s) + self._quad_abs(lo, hi)
        return MomentSummary(mean, var, var + mean * mean, absm)

    def support_hull(self):
        lo, hi = self.edges()
        if self.atom_mass > 0:
            lo, hi = min(lo, self.offset), max(hi, self.offset)
        return lo, hi

    def shift(self, c):
        return FreePoisson(self.rate, self.jump, self.offset + c)

    def scale(self, a):
        self._check_scale(a)
        return FreePoisson(self.rate, self.jump * a, self.offset * a)

    def to_grid(self, n: int = 4097) -> GridDensity:
        if self.atom_mass > 0:
            raise PreconditionError("free Poisson law with rate < 1 has an atom; no grid form")
        return super().to_grid(n)


@dataclass(frozen=True)
class CauchyLaw(_Continuous):
    location: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise InvalidMeasure("Cauchy scale must be positive")

    def density(self, x):
        y = (np.asarray(x, dtype=float) - self.location) / self.half_width
        return 1.0 / (np.pi * self.half_width * (1 + y * y))

    def moments(self):
        return MomentSummary(None, None, None, None)

    def support_hull(self):
        return -math.inf, math.inf

    def shift(self, c):
        return CauchyLaw(self.location + c, self.half_width)

    def scale(self, a):
        self._check_scale(a)
        return CauchyLaw(self.location * a, self.half_width * abs(a))


# --------------------------------------------------------------------------
# mixture

@dataclass(frozen=True, eq=False)
class Mixture(ProbabilityMeasure):
    weights: tuple
    components: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not comps:
            raise InvalidMeasure("mixture needs matching, nonempty weights and components")
        if any(not x > 0 for x in w):
            raise InvalidMeasure("mixture weights must be positive")
        if abs(math.fsum(w) - 1.0) > ATOM_MASS_TOL:
            raise InvalidMeasure(f"mixture weights sum to {math.fsum(w):.15g}, not 1")
        if not all(isinstance(c, ProbabilityMeasure) for c in comps):
            raise InvalidMeasure("mixture components must be probability measures")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    def moments(self):
        parts = [c.moments() for c in self.components]
        if any(p.mean is None for p in parts):
            return MomentSummary(None, None, None, None)
        mean = sum(w * p.mean for w, p in zip(self.weights, parts))
        second = sum(w * p.second_moment for w, p in zip(self.weights, parts))
        absm = sum(w * p.abs_first_moment for w, p in zip(self.weights, parts))
        return _summary(mean, second, absm)

    def support_hull(self):
        hulls = [c.support_hull() for c in self.components]
        return min(h[0] for h in hulls), max(h[1] for h in hulls)

    def shift(self, c):
        return Mixture(self.weights, tuple(m.shift(c) for m in self.components))

    def scale(self, a):
        self._check_scale(a)
        return Mixture(self.weights, tuple(m.scale(a) for m in self.components))


# module-level spellings of the methods

def moments(mu: ProbabilityMeasure) -> MomentSummary:
    return mu.moments()


def support_hull(mu: ProbabilityMeasure) -> tuple[float, float]:
    return mu.support_hull()


def shift(mu: ProbabilityMeasure, c: float) -> ProbabilityMeasure:
    return mu.shift(c)


def scale(mu: ProbabilityMeasure, a: float) -> ProbabilityMeasure:
    return mu.scale(a)
