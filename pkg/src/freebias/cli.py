"""Command line interface.

Exit codes: 0 success, 2 malformed input, 3 solver failure, 4 violated
precondition, 5 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import verify
from .documents import load_measure, load_triple, measure_to_doc
from .errors import FreeBiasError, ParseError, PreconditionError, VerificationError
from .freeconv import (ConeWarning, default_cone, free_convolve, root_support_bound,
                       root_transform, voiculescu_transform)
from .holomorphic import AnalyticTransform, cauchy_transform, tail_normalization_check
from .infdiv import TAIL_HEIGHT, cauchy_from_levy, levy_from_measure, lk_residual
from .inversion import (DEFAULT_EPS, DEFAULT_GRID_POINTS, DEFAULT_PAD, DensityCurve,
                        curve_summary, default_grid, measure_from_curve, stieltjes_density,
                        support_detect, transform_moments)
from .measure import MASS_TOL, ProbabilityMeasure
from .transforms import STEP_NAMES, Step, apply_chain


@dataclass
class RunConfig:
    grid_points: int = DEFAULT_GRID_POINTS
    eps_schedule: tuple = DEFAULT_EPS
    mass_tol: float = MASS_TOL
    solver_tol: float = 1e-12
    max_iter: int = 10_000
    pad_fraction: float = DEFAULT_PAD
    output_path: Optional[str] = None
    output_format: str = "both"
    grid_range: Optional[tuple] = None

    def __post_init__(self):
        if self.grid_points < 9:
            raise ParseError("--grid must be at least 9")
        eps = tuple(self.eps_schedule)
        if len(eps) < 2 or any(not e > 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ParseError("--eps must be positive and strictly descending, at least two values")
        for name in ("mass_tol", "solver_tol"):
            if not getattr(self, name) > 0:
                raise ParseError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ParseError("--max-iter must be positive")
        if self.pad_fraction < 0:
            raise ParseError("--pad must be nonnegative")
        if self.output_format not in ("csv", "json", "both"):
            raise ParseError("--format must be csv, json or both")
        if self.grid_range is not None and not self.grid_range[0] < self.grid_range[1]:
            raise ParseError("--range needs a < b")

    def grid(self, hull) -> np.ndarray:
        if self.grid_range is not None:
            return np.linspace(self.grid_range[0], self.grid_range[1], self.grid_points)
        return default_grid(hull, self.grid_points, self.pad_fraction)


# --------------------------------------------------------------------------
# output

@dataclass
class Output:
    """What a command produced: a table for CSV and a report for JSON."""

    header: list
    rows: list = field(default_factory=list)
    report: dict = field(default_factory=dict)


def _fmt(v) -> str:
    return f"{v:.17g}"


def _csv_text(out: Output) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(out.header)
    for row in out.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v).__name__)


def _clean(v):
    """NaN and infinities are not valid JSON; report them as null."""
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (float, np.floating)) and not math.isfinite(v):
        return None
    return v


def emit(out: Output, cfg: RunConfig) -> None:
    report = _clean(out.report)
    fmt = cfg.output_format
    if cfg.output_path is None:
        if fmt in ("csv", "both") and out.header:
            sys.stdout.write(_csv_text(out))
        if fmt in ("json", "both"):
            sys.stdout.write(_json_text(report))
        return
    path = Path(cfg.output_path)
    if fmt == "both" and out.header:
        path.with_suffix(".csv").write_text(_csv_text(out))
        path.with_suffix(".json").write_text(_json_text(report))
    elif fmt == "csv" and out.header:
        path.write_text(_csv_text(out))
    else:
        path.write_text(_json_text(report))


def curve_output(c: DensityCurve, report: dict) -> Output:
    rows = list(zip(c.grid, c.values, c.eps_used))
    summary = curve_summary(c)
    summary["failed_points"] = int(c.failed.sum())
    summary["min_raw_density"] = c.min_raw
    return Output(["x", "rho", "eps"], rows, {**report, "summary": summary})


def config_report(cfg: RunConfig) -> dict:
    return {"grid_points": cfg.grid_points, "eps_schedule": list(cfg.eps_schedule),
            "mass_tol": cfg.mass_tol, "solver_tol": cfg.solver_tol, "max_iter": cfg.max_iter,
            "pad_fraction": cfg.pad_fraction}


def format_complex(v: complex) -> str:
    return f"{v.real:.17g}{v.imag:+.17g}i"


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParseError(f"cannot parse complex number {text!r}") from None


def _point(t: AnalyticTransform, z: complex) -> str:
    return format_complex(complex(t(z)))


# --------------------------------------------------------------------------
# commands

def cmd_density(mu: ProbabilityMeasure, cfg: RunConfig, z=None):
    g = cauchy_transform(mu)
    if z is not None:
        return _point(g, z)
    c = stieltjes_density(g, cfg.grid(mu.support_hull()), cfg.eps_schedule)
    return curve_output(c, {"command": "density", "input": measure_to_doc(mu),
                            "config": config_report(cfg)})


def parse_step(text: str) -> Step:
    name, _, arg = text.partition(":")
    if name not in STEP_NAMES:
        raise ParseError(f"unknown step {text!r} (expected one of {', '.join(STEP_NAMES)})")
    if name in ("shift", "scale"):
        if not arg:
            raise ParseError(f"step {name} needs a number, e.g. {name}:2")
        try:
            return Step(name, float(arg))
        except ValueError:
            raise ParseError(f"step {text!r}: {arg!r} is not a number") from None
    if name == "flat":
        if not arg:
            raise ParseError("step flat needs a document path, e.g. flat:other.json")
        return Step(name, load_measure(arg))
    if arg:
        raise ParseError(f"step {name} takes no argument")
    return Step(name)


def cmd_transform(mu: ProbabilityMeasure, steps: list, cfg: RunConfig, z=None):
    def materialize(t, hull):
        c = stieltjes_density(t, cfg.grid(hull), cfg.eps_schedule)
        return measure_from_curve(c, cfg.mass_tol)

    def moments_of(t, hull):
        m0, m1, m2 = transform_moments(t, hull)
        return m1 / m0, m2 / m0 - (m1 / m0) ** 2

    rec = apply_chain(mu, steps, materialize, moments_of)
    out = rec.output
    g = cauchy_transform(out) if isinstance(out, ProbabilityMeasure) else out
    if z is not None:
        return _point(g, z)
    report = {"command": "transform", "input": measure_to_doc(mu),
              "steps": [str(s) for s in rec.steps], "config": config_report(cfg)}
    if isinstance(out, ProbabilityMeasure):
        report["output"] = measure_to_doc(out)
    c = stieltjes_density(g, cfg.grid(rec.hull), cfg.eps_schedule)
    return curve_output(c, report)


def _levy_hull(t) -> tuple:
    lo, hi = t.levy.support_hull()
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise PreconditionError("Levy measure has unbounded support: give --range")
    reach = max(abs(lo), abs(hi))
    r = 3 * math.sqrt(t.variance) + reach
    return (t.mean - r, t.mean + r)


def cmd_infdiv(t, cfg: RunConfig, z=None):
    g = cauchy_from_levy(t, cfg.solver_tol, cfg.max_iter)
    if z is not None:
        return _point(g, z)
    grid = cfg.grid(None if cfg.grid_range else _levy_hull(t))
    c = stieltjes_density(g, grid, cfg.eps_schedule)
    zs = grid + 1j * cfg.eps_schedule[-1]
    res = lk_residual(t, zs, g.evaluate_bulk(zs))
    return curve_output(c, {"command": "infdiv", "config": config_report(cfg),
                            "input": {"mean": t.mean, "variance": t.variance,
                                      "levy": measure_to_doc(t.levy)},
                            "residual": {"max": float(res.max()),
                                         "median": float(np.median(res))}})


def cmd_levy(mu: ProbabilityMeasure, cfg: RunConfig, z=None):
    """Cauchy transform of the Levy measure, tabulated on a horizontal segment in the cone."""
    gy = levy_from_measure(mu)
    if z is not None:
        return _point(gy, z)
    cone = default_cone(mu.moments().variance).cone
    height = 1.5 * cone.beta
    x = np.linspace(-0.5 * height, 0.5 * height, cfg.grid_points)
    zs = x + 1j * height
    vals = np.asarray(gy(zs))
    rows = list(zip(zs.real, zs.imag, vals.real, vals.imag))
    report = {"command": "levy", "input": measure_to_doc(mu), "config": config_report(cfg),
              "tail_check": tail_normalization_check(gy, TAIL_HEIGHT),
              "cone": {"alpha": cone.alpha, "beta": cone.beta}}
    return Output(["re_z", "im_z", "re_g", "im_g"], rows, report)


def cmd_convolve(mu: ProbabilityMeasure, nu: ProbabilityMeasure, cfg: RunConfig, z=None):
    g = free_convolve(mu, nu, cfg.solver_tol, cfg.max_iter)
    if z is not None:
        return _point(g, z)
    (a, b), (c0, d) = mu.support_hull(), nu.support_hull()
    c = stieltjes_density(g, cfg.grid((a + c0, b + d)), cfg.eps_schedule)
    return curve_output(c, {"command": "convolve", "config": config_report(cfg),
                            "inputs": [measure_to_doc(mu), measure_to_doc(nu)]})


def cmd_root(mu: ProbabilityMeasure, n: float, cfg: RunConfig, z=None):
    """``1 / F`` of the ``n``-th root, inverted where the root equation is solvable."""
    g = root_transform(mu, n, cfg.solver_tol)
    if z is not None:
        return _point(g, z)
    bound = root_support_bound(mu)
    c = stieltjes_density(g, cfg.grid(bound), cfg.eps_schedule)
    runs = support_detect(g, (float(c.grid[0]), float(c.grid[-1])))
    return curve_output(c, {"command": "root", "n": n, "input": measure_to_doc(mu),
                            "config": config_report(cfg), "support_bound": list(bound),
                            "detected_support": [list(r) for r in runs]})


def cmd_phi(mu: ProbabilityMeasure, cfg: RunConfig, z=None):
    if z is None:
        raise ParseError("phi needs --z")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConeWarning)
        v = voiculescu_transform(mu, z, tol=cfg.solver_tol)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return format_complex(complex(v))


def cmd_verify(suite: str, cfg: RunConfig):
    if suite not in verify.SUITES:
        raise ParseError(f"unknown suite {suite!r} (expected one of {', '.join(verify.SUITES)})")
    checks = verify.run_suite(suite)
    report = {"suite": suite, "passed": all(c.passed for c in checks),
              "checks": [c.as_dict() for c in checks]}
    return Output([], [], report)


# --------------------------------------------------------------------------
# argument parsing

def _eps(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps schedule {text!r}") from None


def _range(text: str) -> tuple:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected a,b") from None
    return (a, b)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=DEFAULT_GRID_POINTS, help="grid points")
    common.add_argument("--eps", type=_eps, default=DEFAULT_EPS,
                        help="descending inversion heights, e.g. 1e-2,5e-3")
    common.add_argument("--tol", type=float, default=1e-12, help="solver tolerance")
    common.add_argument("--max-iter", type=int, default=10_000, help="solver iteration cap")
    common.add_argument("--mass-tol", type=float, default=MASS_TOL)
    common.add_argument("--pad", type=float, default=DEFAULT_PAD,
                        help="grid padding as a fraction of the support width")
    common.add_argument("--range", type=_range, default=None, dest="grid_range",
                        help="explicit grid interval a,b")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json", "both"), default="both")
    common.add_argument("--z", type=parse_complex, default=None,
                        help="evaluate at one point a+bi and print the value")

    p = argparse.ArgumentParser(prog="freebias",
                                description="Free probability transforms and their densities.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("density", parents=[common], help="density of a measure by inversion")
    s.add_argument("measure")
    s = sub.add_parser("transform", parents=[common], help="apply a chain of bias transforms")
    s.add_argument("measure")
    s.add_argument("steps", nargs="+", metavar="step",
                   help="square_bias, inverse_square_bias, el_gordo, free_zero_bias, "
                        "classical_zero_bias, shift:c, scale:a, flat:<path>")
    s = sub.add_parser("infdiv", parents=[common], help="law of a Levy triple")
    s.add_argument("triple")
    s = sub.add_parser("levy", parents=[common], help="Levy measure transform of a law")
    s.add_argument("measure")
    s = sub.add_parser("convolve", parents=[common], help="free additive convolution")
    s.add_argument("measure")
    s.add_argument("other")
    s = sub.add_parser("root", parents=[common], help="free convolution root")
    s.add_argument("measure")
    s.add_argument("--n", type=float, required=True, help="root order")
    s = sub.add_parser("phi", parents=[common], help="Voiculescu transform at --z")
    s.add_argument("measure")
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", help=", ".join(verify.SUITES))
    return p


def _dispatch(args, cfg: RunConfig):
    z = args.z
    if args.command == "density":
        return cmd_density(load_measure(args.measure), cfg, z)
    if args.command == "transform":
        mu = load_measure(args.measure)
        return cmd_transform(mu, [parse_step(s) for s in args.steps], cfg, z)
    if args.command == "infdiv":
        return cmd_infdiv(load_triple(args.triple), cfg, z)
    if args.command == "levy":
        return cmd_levy(load_measure(args.measure), cfg, z)
    if args.command == "convolve":
        return cmd_convolve(load_measure(args.measure), load_measure(args.other), cfg, z)
    if args.command == "root":
        return cmd_root(load_measure(args.measure), args.n, cfg, z)
    if args.command == "phi":
        return cmd_phi(load_measure(args.measure), cfg, z)
    return cmd_verify(args.suite, cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.grid, args.eps, args.mass_tol, args.tol, args.max_iter, args.pad,
                        args.out, args.format, args.grid_range)
        result = _dispatch(args, cfg)
        if isinstance(result, str):
            print(result)
            return 0
        emit(result, cfg)
        if args.command == "verify" and not result.report["passed"]:
            failed = [c for c in result.report["checks"] if not c["passed"]]
            detail = "; ".join(f"{c['name']}: measured {c['measured']:.3g}, "
                               f"required {c['required']:.3g}" for c in failed)
            raise VerificationError(f"{len(failed)} check(s) failed: {detail}")
    except FreeBiasError as exc:
        extra = ""
        if getattr(exc, "residual", None) is not None:
            extra = f" [residual {exc.residual:.3g}, iterate {exc.iterate}]"
        print(f"error: {exc}{extra}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
