"""Command-line interface: ``planar-elastica <subcommand> ...``.

Exit codes: 0 success, 1 bad input file or path, 2 numerical failure,
3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .curves import (
    DiscreteCurve,
    Verdict,
    WindingAmbiguityError,
    elastic_energy,
    fenchel_example,
    length,
    liyau_check,
    total_curvature,
    winding_number,
)
from .elastica_zoo import ElasticaPrototype, Kind, complete_K, eval_point, figure_eight_curve, prototype_curve
from .elliptic import DEFAULT_ROOT_TOL, RootNotBracketedError, compute_constants, constants
from .flow import FlowConfig, FlowMode, StepFailure, ZeroEnergyError, run
from .shapes import lens_curve, perturbed_figure_eights

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_INVARIANT = 3

LENGTH_DRIFT_BUDGET = 1e-3
TRACE_KEYS = ("step", "time", "energy", "length", "product", "lambda", "embedded", "circle_residual", "radius", "sup_velocity")

NUMERIC_ERRORS = (StepFailure, ZeroEnergyError, RootNotBracketedError, WindingAmbiguityError, FloatingPointError)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(obj, as_json: bool, text: str) -> None:
    print(json.dumps(obj, indent=2) if as_json else text)


def _check_out_file(path) -> Path:
    p = Path(path)
    if not p.parent.exists() and str(p.parent) not in ("", "."):
        raise CliError(f"output directory {p.parent} does not exist", EXIT_INPUT)
    return p


def _read_curve(path):
    try:
        return io.read_csv(path)
    except io.CurveFileError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def _workers(threads: int) -> int:
    if threads == 0:
        return os.cpu_count() or 1
    return max(1, threads)


# --------------------------------------------------------------------------
# constants


def cmd_constants(args) -> int:
    if not args.tol > 0:
        raise CliError("--tol must be positive", EXIT_INPUT)
    k = compute_constants(args.tol)
    if args.json:
        print(json.dumps(k.as_dict(), indent=2))
    else:
        print(f"m_star = {io.fmt(k.m_star)}")
        print(f"E_star = {io.fmt(k.E_star)}")
        print(f"L_star = {io.fmt(k.L_star)}")
        print(f"c_star = {io.fmt(k.c_star)}")
    return EXIT_OK


# --------------------------------------------------------------------------
# curve


def _open_span(kind: Kind, m: float, alpha: float) -> float:
    """One curvature period for the non-closed families; the sampled arc is
    closed by a chord when written out."""
    if kind is Kind.WAVELIKE:
        return 4 * complete_K(m) / alpha
    if kind is Kind.ORBITLIKE:
        return 2 * complete_K(m) / alpha
    return 8.0 / alpha


def build_curve(kind: str, n: int, m: float | None = None, alpha: float = 1.0, covers: int = 1):
    if n < 3:
        raise ValueError("--n must be at least 3")
    if covers < 1:
        raise ValueError("--covers must be positive")
    if kind == "figure-eight":
        return figure_eight_curve(n, covers=covers)
    k = Kind(kind)
    if k is Kind.CIRCULAR:
        return prototype_curve(ElasticaPrototype(k, alpha=alpha), n, covers=covers)
    m = 0.5 if m is None else m
    span = _open_span(k, m, alpha)
    if k is Kind.BORDERLINE:
        p = ElasticaPrototype(k, alpha=alpha)
        s = -span / 2 + np.arange(n) * (covers * span / n)
        return DiscreteCurve(eval_point(p, s))
    return prototype_curve(ElasticaPrototype(k, m=m, alpha=alpha), n, s_max=span, covers=covers)


def cmd_curve(args) -> int:
    out = _check_out_file(args.out)
    svg = _check_out_file(args.svg) if args.svg else None
    try:
        c = build_curve(args.kind, args.n, args.m, args.alpha, args.covers)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    io.write_csv(c, out)
    if svg is not None:
        io.write_svg(c, svg)
    _emit({"out": str(out), "n": c.n}, args.json, f"wrote {c.n} vertices to {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# analyze


def analyze_curve(c) -> dict:
    res = liyau_check(c)
    return {
        "length": length(c),
        "energy": elastic_energy(c),
        "product": res.product,
        "total_curvature": total_curvature(c),
        "winding": winding_number(c),
        "intersections": [
            dict(ev.as_dict(), multiplicity=_multiplicity_near(res.report, ev.point)) for ev in res.report.events
        ],
        "embedded": res.embedded,
        "verdict": res.verdict.value,
    }


def _multiplicity_near(report, point) -> int:
    best = min(report.multiplicity, key=lambda q: math.dist(q, point))
    return report.multiplicity[best]


def cmd_analyze(args) -> int:
    c = _read_curve(args.file)
    rep = analyze_curve(c)
    lines = [
        f"length           {io.fmt(rep['length'])}",
        f"energy           {io.fmt(rep['energy'])}",
        f"product          {io.fmt(rep['product'])}",
        f"total_curvature  {io.fmt(rep['total_curvature'])}",
        f"winding          {rep['winding']}",
        f"intersections    {len(rep['intersections'])}",
    ]
    for ev in rep["intersections"]:
        px, py = ev["point"]
        lines.append(f"  at ({px:.6g}, {py:.6g})  det={ev['det']:.6g}  multiplicity={ev['multiplicity']}")
    lines.append(f"verdict          {rep['verdict']}")
    _emit(rep, args.json, "\n".join(lines))
    return EXIT_OK


# --------------------------------------------------------------------------
# liyau-sweep


def sweep_curves(family: str, samples: int, seed: int, n: int | None = None):
    """Yield ``(index, parameter, curve)`` for a sweep family in input order."""
    if family == "fenchel":
        n = n or 2000
        for k in range(samples):
            beta = 0.5 * math.pi * (k + 1) / (samples + 1)
            yield k, beta, fenchel_example(beta, n)
    elif family == "figure-eight-perturbed":
        for k, amp, c in perturbed_figure_eights(samples, seed, n=n or 400):
            yield k, amp, c
    elif family == "lens":
        rng = np.random.default_rng(seed)
        for k in range(samples):
            b = 1.0 + float(rng.uniform(0.05, 2.0))
            yield k, b, lens_curve(n or 600, b)
    else:
        raise ValueError(f"unknown family {family!r}")


def _sweep_row(item) -> dict:
    k, param, c = item
    res = liyau_check(c)
    return {
        "index": k,
        "parameter": param,
        "product": res.product,
        "total_curvature": total_curvature(c),
        "embedded": res.embedded,
        "verdict": res.verdict.value,
    }


def liyau_sweep(family: str, samples: int, seed: int, n: int | None = None, threads: int = 1) -> dict:
    if samples < 1:
        raise ValueError("--samples must be at least 1")
    items = list(sweep_curves(family, samples, seed, n))
    with ThreadPoolExecutor(max_workers=_workers(threads)) as pool:
        rows = list(pool.map(_sweep_row, items))
    c_star = constants().c_star
    crossed = [r["product"] for r in rows if not r["embedded"]]
    summary = {
        "samples": len(rows),
        "non_embedded": len(crossed),
        "min_product_non_embedded": min(crossed) if crossed else None,
        "c_star": c_star,
        "violations": sum(r["verdict"] == Verdict.VIOLATION.value for r in rows),
    }
    return {"family": family, "seed": seed, "rows": rows, "summary": summary}


def cmd_liyau_sweep(args) -> int:
    try:
        rep = liyau_sweep(args.family, args.samples, args.seed, args.n, args.threads)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    lines = [f"{'index':>5} {'parameter':>12} {'product':>14} {'total_curv':>12} {'embedded':>8}  verdict"]
    for r in rep["rows"]:
        lines.append(
            f"{r['index']:>5d} {r['parameter']:>12.6f} {r['product']:>14.6f} {r['total_curvature']:>12.6f} "
            f"{str(r['embedded']):>8}  {r['verdict']}"
        )
    s = rep["summary"]
    mp = "n/a" if s["min_product_non_embedded"] is None else f"{s['min_product_non_embedded']:.6f}"
    lines.append(f"summary: min product over non-embedded = {mp}  (c* = {s['c_star']:.6f}), violations = {s['violations']}")
    _emit(rep, args.json, "\n".join(lines))
    return EXIT_NUMERIC if s["violations"] else EXIT_OK


# --------------------------------------------------------------------------
# flow


def cmd_flow(args) -> int:
    out_dir = Path(args.out_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise CliError(f"{out_dir} is not a directory", EXIT_INPUT)
    c0 = _read_curve(args.input)
    try:
        config = FlowConfig(
            mode=args.mode,
            lam=args.lam,
            dt=args.dt,
            max_steps=args.steps,
            record_every=args.record,
            monitor_every=min(args.record, 10) if args.monitor is None else args.monitor,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "trace.jsonl", "w") as fh:

        def record(state, diag):
            d = diag.as_dict()
            io.append_jsonl({k: d[k] for k in TRACE_KEYS}, fh)
            io.write_csv(state.curve, out_dir / f"snap_{diag.step}.csv")

        state = run(c0, config, callback=record)
    first, last = state.initial, state.final
    drift = abs(last.length - first.length) / first.length
    summary = {
        "steps": state.step,
        "time": state.time,
        "converged": state.converged,
        "length_drift": drift,
        "final_radius": last.radius,
        "final_circle_residual": last.circle_residual,
        "violations": state.violations,
    }
    _emit(
        summary,
        args.json,
        f"{state.step} steps, t={state.time:.6g}, length drift {drift:.3g}, radius {last.radius:.6g}, "
        f"circle residual {last.circle_residual:.3g}",
    )
    if state.violations:
        log.error("crossing detected under the embeddedness hypothesis at steps %s", state.violations)
        return EXIT_INVARIANT
    if config.mode is FlowMode.PRESERVE and drift > LENGTH_DRIFT_BUDGET:
        log.error("length drift %.3g exceeds budget %.3g", drift, LENGTH_DRIFT_BUDGET)
        return EXIT_INVARIANT
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads; 0 picks the CPU count")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="planar-elastica", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[common], help="print m*, E*, L*, c*")
    p.add_argument("--tol", type=float, default=DEFAULT_ROOT_TOL)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("curve", parents=[common], help="sample an elastica to CSV")
    p.add_argument("--kind", required=True, choices=["wavelike", "orbitlike", "borderline", "circular", "figure-eight"])
    p.add_argument("--m", type=float, default=None)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--covers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("analyze", parents=[common], help="functionals and crossings of a CSV curve")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("liyau-sweep", parents=[common], help="check energy-length products over a curve family")
    p.add_argument("--family", required=True, choices=["fenchel", "figure-eight-perturbed", "lens"])
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--n", type=int, default=None, help="vertices per curve")
    p.set_defaults(func=cmd_liyau_sweep)

    p = sub.add_parser("flow", parents=[common], help="run an elastic flow from a CSV curve")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", required=True, choices=["preserve", "penalized"])
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--record", type=int, default=100)
    p.add_argument("--monitor", type=int, default=None, help="steps between embeddedness checks")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_flow)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
