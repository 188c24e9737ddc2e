"""Command-line entry point: ``orthreflect {solve,generate,experiment,check,export-series}``.

Exit codes: 0 success, 1 audit failure, 2 validation error, 3 convergence error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import analysis
from .errors import ConvergenceError, ValidationError
from .experiments import load_config, report_series, report_to_json, run_experiment
from .mmatrix import load_matrix
from .paths import format_float, path_from_csv, path_to_csv, solution_from_csv, solution_to_csv, uniform_grid
from .processes import Fixture, generate, spec_from_dict
from .skorohod import DEFAULT_TOL, audit_solution, reflect_general

EXIT_OK, EXIT_AUDIT, EXIT_INVALID, EXIT_CONVERGENCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def _vec(v) -> str:
    return "[" + ", ".join(format_float(float(x)) for x in np.ravel(v)) + "]"


def _say(args, *parts, err=False):
    if not args.quiet:
        print(*parts, file=sys.stderr if err else sys.stdout)


def _write_text(dest, text):
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(dest, "w", newline="") as fh:
            fh.write(text)


def cmd_solve(args) -> int:
    X = path_from_csv(args.path)
    P = load_matrix(args.matrix)
    if P.n != X.n:
        raise ValidationError(f"path has dimension {X.n} but the routing matrix is {P.n}x{P.n}")
    tol = DEFAULT_TOL if args.tol is None else args.tol
    sol = reflect_general(X, P, tol, args.algorithm)
    to_stdout = args.out in (None, "-")
    _write_text(args.out, solution_to_csv(sol.W, sol.L))
    _say(
        args,
        f"algorithm={args.algorithm} points={len(X)} n={X.n} residual={format_float(sol.residual)} "
        f"terminal_W={_vec(sol.W.values[-1])} terminal_L={_vec(sol.L.values[-1])}",
        err=to_stdout,
    )
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        with open(args.spec) as fh:
            spec = spec_from_dict(json.load(fh))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"spec is not valid JSON: {exc}") from None
    grid = uniform_grid(args.horizon, args.step)
    X = generate(spec, grid, 0 if args.seed is None else args.seed)
    to_stdout = args.out in (None, "-")
    _write_text(args.out, path_to_csv(X))
    if not isinstance(spec, Fixture):
        rho = analysis.mean_drift(spec)
        _say(args, f"mean_drift={_vec(rho)}", err=to_stdout)
        if args.routing:
            P = load_matrix(args.routing)
            stable, margins = analysis.stability_check(rho, P)
            _say(args, f"stable={str(stable).lower()} margins={_vec(margins)}", err=to_stdout)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed_base = args.seed
    report = run_experiment(cfg, threads=args.threads)
    _write_text(args.out, report_to_json(report))
    if args.out not in (None, "-"):
        _say(args, f"kind={cfg.kind} seeds={cfg.seed_count} report={args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    W, L = solution_from_csv(args.solution)
    X = path_from_csv(args.path)
    P = load_matrix(args.matrix)
    tol = 1e-9 if args.tol is None else args.tol
    rep = audit_solution(X, W, L, P, tol)
    if args.out not in (None, "-"):
        with open(args.out, "w") as fh:
            json.dump(rep.to_dict(), fh, indent=1, sort_keys=True)
    if rep.passed:
        _say(args, f"ok residual={format_float(rep.residual)}")
        return EXIT_OK
    for v in rep.violations:
        print(
            f"violation check={v['check']} index={v['index']} t={format_float(float(X.times[v['index']]))} "
            f"coordinate={v['coordinate'] + 1} value={format_float(v['value'])}"
        )
    print(f"FAILED {len(rep.violations)} violation(s) residual={format_float(rep.residual)}", file=sys.stderr)
    return EXIT_AUDIT


def cmd_export_series(args) -> int:
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"report is not valid JSON: {exc}") from None
    rows = []
    for seed, j, name, ts, vals in report_series(report):
        rows.extend((name, seed, j, t, v) for t, v in zip(ts, vals))
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series", "seed", "a_index", "t", "value"])
        for name, seed, j, t, v in rows:
            w.writerow([name, seed, j, format_float(t), "" if v is None else format_float(v)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    if not rows:
        _say(args, "report carries no series", err=True)
    return EXIT_OK


def _global_flags(default=None) -> argparse.ArgumentParser:
    def d(value):
        return value if default is None else default

    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--tol", type=float, default=d(None), help="numerical tolerance")
    g.add_argument("--seed", type=int, default=d(None), help="random seed (experiment: overrides seeds.base)")
    g.add_argument("--out", default=d(None), help="output file (default: standard output)")
    g.add_argument("--quiet", action="store_true", default=d(False), help="suppress summaries")
    return g


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="orthreflect", description="Reflection maps on the nonnegative orthant.", parents=[_global_flags()]
    )
    # flags may also follow the subcommand; SUPPRESS keeps them from resetting earlier values
    common = _global_flags(argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="reflect a path CSV")
    s.add_argument("path")
    s.add_argument("matrix")
    s.add_argument("--algorithm", choices=("step", "fixedpoint"), default="step")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("generate", parents=[common], help="sample a process spec on a uniform grid")
    g.add_argument("spec")
    g.add_argument("--horizon", type=float, required=True)
    g.add_argument("--step", type=float, required=True)
    g.add_argument("--routing", default=None, help="routing matrix for the stability verdict")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("experiment", parents=[common], help="run an experiment config")
    e.add_argument("config")
    e.add_argument("--threads", type=int, default=None, help="overrides REFLECT_THREADS")
    e.set_defaults(func=cmd_experiment)

    c = sub.add_parser("check", parents=[common], help="audit a solution CSV")
    c.add_argument("solution")
    c.add_argument("path")
    c.add_argument("matrix")
    c.set_defaults(func=cmd_check)

    x = sub.add_parser("export-series", parents=[common], help="flatten report series to CSV")
    x.add_argument("report")
    x.set_defaults(func=cmd_export_series)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input ({type(exc).__name__}: {exc})", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
