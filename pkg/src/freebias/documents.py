"""JSON documents describing measures and Levy triples.

A measure document is an object with a ``"type"`` field:

=================  =============================================
type               fields
=================  =============================================
``atomic``         ``atoms``: list of ``[location, weight]``
``dirac``          ``at`` (optional, default 0)
``rademacher``     none
``grid``           ``grid``, ``values``
``semicircle``     ``mean``, ``variance``
``arcsine``        ``left``, ``right``
``free_poisson``   ``lambda``, ``alpha``, ``offset`` (optional)
``cauchy``         ``location``, ``scale``
``mixture``        ``weights``, ``components`` (measure documents)
=================  =============================================

A triple document is ``{"mean": m, "variance": s2, "levy": <measure>}``.
Unknown or missing fields are errors.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import ParseError, PreconditionError
from .infdiv import LevyTriple
from .measure import (Arcsine, Atomic, CauchyLaw, FreePoisson, GridDensity, Mixture,
                      ProbabilityMeasure, Semicircle, dirac, rademacher)

_FIELDS = {
    "atomic": ({"atoms"}, set()),
    "dirac": (set(), {"at"}),
    "rademacher": (set(), set()),
    "grid": ({"grid", "values"}, set()),
    "semicircle": ({"mean", "variance"}, set()),
    "arcsine": ({"left", "right"}, set()),
    "free_poisson": ({"lambda", "alpha"}, {"offset"}),
    "cauchy": ({"location", "scale"}, set()),
    "mixture": ({"weights", "components"}, set()),
}


def _finite(v) -> bool:
    return not isinstance(v, bool) and isinstance(v, (int, float)) and math.isfinite(v)


def _number(doc, key, where):
    v = doc[key]
    if not _finite(v):
        raise ParseError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def _numbers(doc, key, where):
    v = doc[key]
    if not isinstance(v, list) or not v:
        raise ParseError(f"{where}.{key}: expected a non-empty list of numbers")
    for i, x in enumerate(v):
        if not _finite(x):
            raise ParseError(f"{where}.{key}[{i}]: expected a finite number, got {x!r}")
    return [float(x) for x in v]


def _atoms(doc, where):
    v = doc["atoms"]
    if not isinstance(v, list) or not v:
        raise ParseError(f"{where}.atoms: expected a non-empty list of [location, weight] pairs")
    for i, pair in enumerate(v):
        if not (isinstance(pair, list) and len(pair) == 2 and all(_finite(x) for x in pair)):
            raise ParseError(f"{where}.atoms[{i}]: expected [location, weight], got {pair!r}")
    return [(float(x), float(w)) for x, w in v]


def _check_fields(doc, required, optional, where):
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected an object")
    keys = set(doc)
    unknown = keys - required - optional
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    missing = required - keys
    if missing:
        raise ParseError(f"{where}: missing field(s) {', '.join(sorted(missing))}")


def measure_from_doc(doc, where: str = "measure") -> ProbabilityMeasure:
    if not isinstance(doc, dict) or "type" not in doc:
        raise ParseError(f"{where}: expected an object with a 'type' field")
    kind = doc["type"]
    if kind not in _FIELDS:
        raise ParseError(f"{where}.type: unknown measure type {kind!r} "
                         f"(expected one of {', '.join(sorted(_FIELDS))})")
    required, optional = _FIELDS[kind]
    body = {k: v for k, v in doc.items() if k != "type"}
    _check_fields(body, required, optional, where)
    num = lambda k: _number(body, k, where)  # noqa: E731
    try:
        if kind == "atomic":
            return Atomic.from_atoms(_atoms(body, where))
        if kind == "dirac":
            return dirac(num("at") if "at" in body else 0.0)
        if kind == "rademacher":
            return rademacher()
        if kind == "grid":
            return GridDensity(_numbers(body, "grid", where), _numbers(body, "values", where))
        if kind == "semicircle":
            return Semicircle(num("mean"), num("variance"))
        if kind == "arcsine":
            return Arcsine(num("left"), num("right"))
        if kind == "free_poisson":
            return FreePoisson(num("lambda"), num("alpha"), num("offset") if "offset" in body else 0.0)
        if kind == "cauchy":
            return CauchyLaw(num("location"), num("scale"))
        comps = body["components"]
        if not isinstance(comps, list):
            raise ParseError(f"{where}.components: expected a list")
        parts = tuple(measure_from_doc(c, f"{where}.components[{i}]") for i, c in enumerate(comps))
        return Mixture(tuple(_numbers(body, "weights", where)), parts)
    except PreconditionError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def triple_from_doc(doc, where: str = "triple") -> LevyTriple:
    _check_fields(doc, {"mean", "variance", "levy"}, set(), where)
    levy = measure_from_doc(doc["levy"], f"{where}.levy")
    try:
        return LevyTriple(_number(doc, "mean", where), _number(doc, "variance", where), levy)
    except PreconditionError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_json(path) -> object:
    """Read a JSON file; syntax errors become :class:`ParseError` with line and column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_measure(path) -> ProbabilityMeasure:
    return measure_from_doc(load_json(path), str(path))


def load_triple(path) -> LevyTriple:
    return triple_from_doc(load_json(path), str(path))


def measure_to_doc(mu: ProbabilityMeasure) -> dict:
    """Inverse of :func:`measure_from_doc` for echoing results."""
    if isinstance(mu, Atomic):
        return {"type": "atomic",
                "atoms": [[x, w] for x, w in zip(mu.locations.tolist(), mu.weights.tolist())]}
    if isinstance(mu, GridDensity):
        return {"type": "grid", "grid": mu.grid.tolist(), "values": mu.values.tolist()}
    if isinstance(mu, Semicircle):
        return {"type": "semicircle", "mean": mu.mean, "variance": mu.variance}
    if isinstance(mu, Arcsine):
        return {"type": "arcsine", "left": mu.left, "right": mu.right}
    if isinstance(mu, FreePoisson):
        return {"type": "free_poisson", "lambda": mu.rate, "alpha": mu.jump, "offset": mu.offset}
    if isinstance(mu, CauchyLaw):
        return {"type": "cauchy", "location": mu.location, "scale": mu.half_width}
    if isinstance(mu, Mixture):
        return {"type": "mixture", "weights": list(mu.weights),
                "components": [measure_to_doc(c) for c in mu.components]}
    raise TypeError(type(mu).__name__)
