"""Command-line interface.

Subcommands: validate, green, pathpdf, genfun, invert, simulate, verify.
Every run takes a JSON chain configuration (--config), writes records as CSV
or JSON lines (--format) to stdout or --out, and maps every failure class to
its own exit code with a single machine-parsable error record on stderr.
Identical request + config + seed produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import errors
from .chain import Chain, build_chain
from .config import ChainSpec, parse_config
from .laplace import green as green_op
from .pathpdf import generating_function, path_pdf_recursive
from .timedomain import (GaverStehfest, GreenEstimator, PathPdfEstimator,
                         Talbot, invert_laplace, walk_ensemble)
from .verify import run_verification

EXIT_OK = 0
EXIT_INTERNAL = 1
# argparse reserves 2 for usage errors.
EXIT_CODES: dict[type, int] = {
    errors.ParseError: 3,
    errors.SchemaError: 4,
    errors.NormalizationError: 5,
    errors.TopologyError: 6,
    errors.ParamError: 7,
    errors.DomainError: 8,
    errors.ModelError: 9,
    errors.OrderError: 10,
    errors.SingularError: 11,
    errors.FallbackRequired: 12,
    errors.NonConvergence: 13,
    errors.BudgetError: 14,
    errors.MethodError: 15,
    OverflowError: 16,
    errors.EmptyInput: 17,
}
EXIT_VERIFY_FAILED = 18
EXIT_ACCURACY = 19


@dataclass
class RunRequest:
    """One fully-resolved command invocation (chain config travels separately)."""

    command: str
    out_path: str | None
    out_format: str
    threads: int
    seed: int
    allow_warn: bool
    options: dict = field(default_factory=dict)


def _fmt_number(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def _emit(rows, fieldnames: list[str], fmt: str, sink) -> None:
    if fmt == "csv":
        sink.write(",".join(fieldnames) + "\n")
        for row in rows:
            sink.write(",".join(
                _fmt_number(row[k]) if not isinstance(row[k], str)
                else row[k] for k in fieldnames) + "\n")
    else:
        for row in rows:
            parts = []
            for k in fieldnames:
                v = row[k]
                parts.append(f"{json.dumps(k)}: "
                             f"{json.dumps(v) if isinstance(v, str) else _fmt_number(v)}")
            sink.write("{" + ", ".join(parts) + "}\n")


def _parse_complex(token: str) -> complex:
    try:
        value = complex(token)
    except ValueError as exc:
        raise errors.SchemaError(f"cannot parse {token!r} as a complex number") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise errors.SchemaError(f"non-finite value {token!r}")
    return value


def _map_points(fn, points, threads: int):
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, points))
    return [fn(p) for p in points]


def _run_green(chain: Chain, req: RunRequest):
    i, j = req.options["to"], req.options["from"]
    s_points = req.options["s"]

    def one(s: complex) -> dict:
        g = green_op(chain, i, j, s)
        return {"s_re": s.real, "s_im": s.imag, "g_re": g.real, "g_im": g.imag}

    return ["s_re", "s_im", "g_re", "g_im"], _map_points(one, s_points, req.threads)


def _run_pathpdf(chain: Chain, req: RunRequest):
    n_max = req.options["n"]
    method = req.options["method"]
    s_points = req.options["s"]

    def one(s: complex) -> list[dict]:
        if method == "explicit":
            from .pathpdf import path_pdf_explicit
            values = [path_pdf_explicit(chain, n, s) for n in range(n_max + 1)]
        else:
            values = list(path_pdf_recursive(chain, n_max, s).values)
        return [{"s_re": s.real, "s_im": s.imag, "n": n,
                 "w_re": w.real, "w_im": w.imag}
                for n, w in enumerate(values)]

    nested = _map_points(one, s_points, req.threads)
    return (["s_re", "s_im", "n", "w_re", "w_im"],
            [row for group in nested for row in group])


def _run_genfun(chain: Chain, req: RunRequest):
    points = [(s, z) for s in req.options["s"] for z in req.options["z"]]

    def one(sz) -> dict:
        s, z = sz
        v = generating_function(chain, z, s)
        return {"s_re": s.real, "s_im": s.imag, "z_re": z.real, "z_im": z.imag,
                "value_re": v.real, "value_im": v.imag}

    return (["s_re", "s_im", "z_re", "z_im", "value_re", "value_im"],
            _map_points(one, points, req.threads))


def _run_invert(chain: Chain, req: RunRequest):
    i, j = req.options["to"], req.options["from"]
    t_points = req.options["t"]
    if req.options["method"] == "stehfest":
        method = GaverStehfest(order=req.options["order"])
    else:
        method = Talbot(nodes=req.options["nodes"])

    def evaluator(s: complex) -> complex:
        return green_op(chain, i, j, s)

    def one(t: float) -> dict:
        return {"t": t, "value": invert_laplace(evaluator, t, method)}

    return ["t", "value"], _map_points(one, t_points, req.threads)


def _run_simulate(chain: Chain, req: RunRequest):
    opts = req.options
    j0, i = opts["start"], opts["observe"]
    walkers, horizon = opts["walkers"], opts["horizon"]
    threads = max(1, req.threads)

    def make_estimator():
        if opts["n"] is None:
            import numpy as np
            grid = np.linspace(opts["t_max"] / opts["points"], opts["t_max"],
                               opts["points"])
            return GreenEstimator(i, grid)
        import numpy as np
        edges = np.linspace(0.0, opts["t_max"], opts["bins"] + 1)
        return PathPdfEstimator(i, j0, opts["n"], edges)

    bounds = [walkers * w // threads for w in range(threads + 1)]
    chunks = [(bounds[w], bounds[w + 1] - bounds[w]) for w in range(threads)
              if bounds[w + 1] > bounds[w]]

    def run_chunk(chunk):
        first, count = chunk
        acc = make_estimator()
        for trajectory in walk_ensemble(chain, j0, horizon, req.seed, count,
                                        first_walker=first):
            acc.add(trajectory)
        return acc

    accs = _map_points(run_chunk, chunks, threads)
    total = accs[0]
    for acc in accs[1:]:
        total.merge(acc)
    estimate = total.result()
    rows = [{"t_lo": lo, "t_hi": hi, "density": float(d), "stderr": float(e)}
            for (lo, hi), d, e in zip(estimate.intervals(), estimate.density,
                                      estimate.stderr)]
    return ["t_lo", "t_hi", "density", "stderr"], rows


def _run_verify(chain: Chain, req: RunRequest):
    results = run_verification(chain, n_max=req.options["n_max"])
    rows = [{"check": r.name, "tolerance": r.tolerance,
             "max_deviation": r.max_deviation, "status": r.status,
             "points": r.points, "note": r.note} for r in results]
    failed = any(r.status == "fail" for r in results)
    return (["check", "tolerance", "max_deviation", "status", "points", "note"],
            rows, failed)


def run(request: RunRequest, spec: ChainSpec) -> int:
    """Execute one request against one chain; returns the process exit code."""
    chain = build_chain(spec)
    failed_verify = False
    if request.command == "validate":
        fieldnames = ["L", "transitions", "valid"]
        rows = [{"L": chain.length, "transitions": len(spec.transitions),
                 "valid": True}]
    elif request.command == "green":
        fieldnames, rows = _run_green(chain, request)
    elif request.command == "pathpdf":
        fieldnames, rows = _run_pathpdf(chain, request)
    elif request.command == "genfun":
        fieldnames, rows = _run_genfun(chain, request)
    elif request.command == "invert":
        fieldnames, rows = _run_invert(chain, request)
    elif request.command == "simulate":
        fieldnames, rows = _run_simulate(chain, request)
    elif request.command == "verify":
        fieldnames, rows, failed_verify = _run_verify(chain, request)
    else:  # pragma: no cover - argparse limits the choices
        raise ValueError(f"unknown command {request.command}")

    if request.out_path is None:
        _emit(rows, fieldnames, request.out_format, sys.stdout)
    else:
        with open(request.out_path, "w", encoding="utf-8", newline="") as sink:
            _emit(rows, fieldnames, request.out_format, sink)
    return EXIT_VERIFY_FAILED if failed_verify else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semimarkov1d",
        description="Green's functions and path statistics of semi-Markovian "
                    "walks on one-dimensional chains")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", required=True, help="JSON chain description")
    shared.add_argument("--out", default=None, help="output file (default stdout)")
    shared.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    shared.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--allow-warn", action="store_true",
                        help="do not fail on accuracy warnings")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[shared])

    p = sub.add_parser("green", parents=[shared])
    p.add_argument("--from", dest="from_state", type=int, required=True,
                   help="start state j")
    p.add_argument("--to", dest="to_state", type=int, required=True,
                   help="observed state i")
    p.add_argument("--s", nargs="+", required=True,
                   help="Laplace points (e.g. 1.0 or 1+2j)")

    p = sub.add_parser("pathpdf", parents=[shared])
    p.add_argument("--n", type=int, required=True, help="highest class order")
    p.add_argument("--s", nargs="+", required=True)
    p.add_argument("--method", choices=("recursive", "explicit"),
                   default="recursive")

    p = sub.add_parser("genfun", parents=[shared])
    p.add_argument("--s", nargs="+", required=True)
    p.add_argument("--z", nargs="+", required=True)

    p = sub.add_parser("invert", parents=[shared])
    p.add_argument("--from", dest="from_state", type=int, required=True)
    p.add_argument("--to", dest="to_state", type=int, required=True)
    p.add_argument("--t", nargs="+", type=float, required=True)
    p.add_argument("--method", choices=("talbot", "stehfest"), default="talbot")
    p.add_argument("--nodes", type=int, default=32)
    p.add_argument("--order", type=int, default=14)

    p = sub.add_parser("simulate", parents=[shared])
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--observe", type=int, required=True)
    p.add_argument("--n", type=int, default=None,
                   help="path-class order; omit for occupancy estimation")
    p.add_argument("--walkers", type=int, default=10000)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--bins", type=int, default=20)

    p = sub.add_parser("verify", parents=[shared])
    p.add_argument("--n-max", type=int, default=4)

    return parser


def _request_from_args(args: argparse.Namespace) -> tuple[RunRequest, ChainSpec]:
    with open(args.config, "r", encoding="utf-8") as fh:
        spec = parse_config(fh.read())
    options: dict = {}

    def check_state(value: int, flag: str) -> int:
        if not 1 <= value <= spec.length:
            raise errors.SchemaError(
                f"{flag}: state {value} outside 1..{spec.length}")
        return value

    if args.command in ("green", "invert"):
        options["from"] = check_state(args.from_state, "--from")
        options["to"] = check_state(args.to_state, "--to")
    if args.command in ("green", "pathpdf", "genfun"):
        options["s"] = [_parse_complex(tok) for tok in args.s]
    if args.command == "pathpdf":
        options["n"] = args.n
        options["method"] = args.method
    if args.command == "genfun":
        options["z"] = [_parse_complex(tok) for tok in args.z]
    if args.command == "invert":
        t = list(args.t)
        if any(b <= a for a, b in zip(t, t[1:])):
            raise errors.SchemaError("--t grid must be strictly increasing")
        options["t"] = t
        options["method"] = args.method
        options["nodes"] = args.nodes
        options["order"] = args.order
    if args.command == "simulate":
        horizon = args.horizon if args.horizon is not None else args.t_max
        if horizon < args.t_max:
            raise errors.SchemaError(
                f"--horizon {horizon} is shorter than --t-max {args.t_max}")
        if args.walkers < 1:
            raise errors.SchemaError("--walkers must be >= 1")
        options.update(start=check_state(args.start, "--start"),
                       observe=check_state(args.observe, "--observe"),
                       n=args.n, walkers=args.walkers, horizon=horizon,
                       t_max=args.t_max, points=args.points, bins=args.bins)
    if args.command == "verify":
        options["n_max"] = args.n_max
    request = RunRequest(command=args.command, out_path=args.out,
                         out_format=args.format, threads=max(1, args.threads),
                         seed=args.seed, allow_warn=args.allow_warn,
                         options=options)
    return request, spec


def _error_record(exc: BaseException, code: int) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc),
                       "exit_code": code})


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        request, spec = _request_from_args(args)
    except OSError as exc:
        print(_error_record(exc, EXIT_INTERNAL), file=sys.stderr)
        return EXIT_INTERNAL
    except (errors.SemiMarkovError, OverflowError) as exc:
        code = EXIT_CODES.get(type(exc), EXIT_INTERNAL)
        print(_error_record(exc, code), file=sys.stderr)
        return code

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = run(request, spec)
        except (errors.SemiMarkovError, OverflowError) as exc:
            code = EXIT_CODES.get(type(exc), EXIT_INTERNAL)
            print(_error_record(exc, code), file=sys.stderr)
            return code
        except (IndexError, ValueError, OSError, ZeroDivisionError) as exc:
            print(_error_record(exc, EXIT_INTERNAL), file=sys.stderr)
            return EXIT_INTERNAL
    for w in caught:
        print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
    if not request.allow_warn and any(
            issubclass(w.category, errors.AccuracyWarning) for w in caught):
        exc = RuntimeError("accuracy warnings were raised; rerun with "
                           "--allow-warn to accept them")
        print(_error_record(exc, EXIT_ACCURACY), file=sys.stderr)
        return EXIT_ACCURACY
    return code


if __name__ == "__main__":
    sys.exit(main())
