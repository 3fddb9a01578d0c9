"""Command-line surface.

Subcommands: eval, check-ci, sweep, sample, optimize.

Exit codes: 0 success, 2 validation failure, 3 runtime/sweep failure,
4 optimizer budget exhausted (result still printed).

Angles are radians by default; --deg switches parameter input to degrees.
PPSM_THREADS caps the worker count (0 = auto); the current implementation
runs a single worker, which respects any cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Optional

from . import generators, io, montecarlo, polytope
from .model import (
    CoefficientVector,
    DegenerateModel,
    DomainError,
    PositivityViolation,
    ProbabilityTable,
    ci_report,
    shift_report,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_BUDGET = 4

GENERATORS = ("qs", "qw", "cd", "cmax", "boxes")


def _worker_cap() -> int:
    raw = os.environ.get("PPSM_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"PPSM_THREADS must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise DomainError("PPSM_THREADS must be >= 0")
    return cap


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--gen", choices=GENERATORS, help="named model family")
    src.add_argument("--model", metavar="FILE", help="ppsm-v1 JSON model file")
    parser.add_argument("--theta", type=float, help="angle parameter (radians)")
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="weakness / bias parameter")
    parser.add_argument("--delta", type=float, help="disturbance parameter")
    parser.add_argument("--deg", action="store_true",
                        help="interpret --theta in degrees")


def _build_generator(name: str, theta: Optional[float], lam: Optional[float],
                     delta: Optional[float]) -> io.Model:
    def need(value, flag):
        if value is None:
            raise DomainError(f"generator {name!r} requires {flag}")
        return value

    if name == "qs":
        return generators.quantum_strong(need(theta, "--theta"))
    if name == "qw":
        return generators.quantum_weak(need(theta, "--theta"), need(lam, "--lambda"))
    if name == "cd":
        return generators.classical_disturbance(need(lam, "--lambda"),
                                                need(delta, "--delta"))
    if name == "cmax":
        return generators.classical_maximal()
    if name == "boxes":
        return generators.box_world_model()
    raise DomainError(f"unknown generator {name!r}")


def _resolve_model(args) -> io.Model:
    if args.model is not None:
        return io.load_model(args.model)
    theta = args.theta
    if theta is not None and args.deg:
        theta = math.radians(theta)
    return _build_generator(args.gen, theta, args.lam, args.delta)


def _print_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_eval(args) -> int:
    model = _resolve_model(args)
    table = io.as_table(model)
    out: dict = {}
    want_shift = args.shift or not (args.ci or args.emit_model)
    if want_shift:
        out["shift"] = shift_report(table).to_dict()
    if args.ci:
        out["ci"] = ci_report(table).to_dict()
    if args.emit_model:
        out["model"] = io.model_to_dict(model)
    _print_json(out)
    return EXIT_OK


def cmd_check_ci(args) -> int:
    table = io.as_table(_resolve_model(args))
    _print_json(ci_report(table).to_dict())
    return EXIT_OK


SWEEP_OUTPUTS = ("pre", "post", "margin", "z_w", "ci_residuals", "min_slack")


def _sweep_columns(outputs: list[str]) -> list[str]:
    cols = []
    for name in outputs:
        if name == "pre":
            cols.append("pre_psi_p1")
        elif name == "post":
            cols.append("post_psi_p1_phi_m1")
        elif name == "margin":
            cols.append("margin_psi_p1_phi_m1")
        elif name == "z_w":
            cols.append("z_w")
        elif name == "ci_residuals":
            cols.extend(["ci_residual_sphi", "ci_residual_psisphi"])
        elif name == "min_slack":
            cols.append("min_slack")
        else:
            raise DomainError(f"unknown sweep output {name!r}; "
                              f"choose from {', '.join(SWEEP_OUTPUTS)}")
    return cols


def _grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise DomainError("range step must be > 0")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-12:
            break
        values.append(v)
        k += 1
    if not values:
        raise DomainError("empty parameter range")
    return values


def _sweep_row(args, params: dict[str, float], outputs: list[str]) -> list:
    theta = params.get("theta")
    if theta is not None and args.deg:
        theta = math.radians(theta)
    model = _build_generator(args.gen, theta, params.get("lambda"),
                             params.get("delta"))
    coeffs = io.as_coefficients(model)
    table = io.as_table(model)
    shifts = shift_report(table)

    def fmt(v):
        return "" if v is None else repr(v)

    row: list = []
    for name in outputs:
        if name == "pre":
            row.append(fmt(shifts.pre[1]))
        elif name == "post":
            row.append(fmt(shifts.post[(1, -1)]))
        elif name == "margin":
            row.append(fmt(shifts.margin[(1, -1)]))
        elif name == "z_w":
            row.append(fmt(1.0 / math.cos(theta) if theta is not None else None))
        elif name == "ci_residuals":
            r1, r2 = ci_report(table).coefficient_residuals
            row.extend([repr(r1), repr(r2)])
        elif name == "min_slack":
            row.append(repr(polytope.min_slack(coeffs)))
    return row


def cmd_sweep(args) -> int:
    if args.gen is None:
        raise DomainError("sweep requires --gen")
    outputs = [s.strip() for s in args.outputs.split(",") if s.strip()]
    header = _sweep_columns(outputs)
    ranges = {name: _grid(start, stop, step)
              for name, start, stop, step in
              ((r[0], float(r[1]), float(r[2]), float(r[3]))
               for r in args.range or [])}
    if not ranges:
        raise DomainError("sweep requires at least one --range")

    names = list(ranges)
    grids: list[dict[str, float]] = [{}]
    for name in names:
        grids = [dict(g, **{name: v}) for g in grids for v in ranges[name]]

    # All rows are computed before anything is written: a failing grid
    # point must not leave a partial file behind.
    rows = []
    for point in grids:
        rows.append([repr(point[n]) for n in names] + _sweep_row(args, point, outputs))

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + header)
        writer.writerows(rows)
    return EXIT_OK


def cmd_sample(args) -> int:
    table = io.as_table(_resolve_model(args))
    batch = montecarlo.sample(table, args.n, args.seed)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            montecarlo.write_batch_csv(batch, fh)
    _print_json(montecarlo.estimate(batch).to_dict())
    return EXIT_OK


def cmd_optimize(args) -> int:
    _worker_cap()
    constraint = "require_ci" if args.require_ci else "none"
    code = EXIT_OK
    try:
        result = polytope.maximize_margin(
            constraint=constraint, restarts=args.budget,
            max_evals=args.max_evals, seed=args.seed)
    except polytope.BudgetExhausted as exc:
        result = exc.result
        code = EXIT_BUDGET
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "margin"])
            writer.writerows(result.trace)
    _print_json(result.to_dict())
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppsm",
        description="Pre/post-selected statistics of three dichotomous events")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="shift / CI reports for one model")
    _add_model_args(p_eval)
    p_eval.add_argument("--shift", action="store_true", help="print the shift report")
    p_eval.add_argument("--ci", action="store_true", help="print the CI report")
    p_eval.add_argument("--emit-model", action="store_true",
                        help="echo the model in ppsm-v1 form")
    p_eval.set_defaults(func=cmd_eval)

    p_ci = sub.add_parser("check-ci", help="conditional-independence report")
    _add_model_args(p_ci)
    p_ci.set_defaults(func=cmd_check_ci)

    p_sweep = sub.add_parser("sweep", help="CSV sweep over generator parameters")
    p_sweep.add_argument("--gen", choices=GENERATORS, required=True)
    p_sweep.add_argument("--range", nargs=4, action="append",
                         metavar=("NAME", "START", "STOP", "STEP"),
                         help="parameter grid (repeatable)")
    p_sweep.add_argument("--outputs", default="pre,post,margin",
                         help=f"comma list of {', '.join(SWEEP_OUTPUTS)}")
    p_sweep.add_argument("--deg", action="store_true")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.set_defaults(func=cmd_sweep)

    p_sample = sub.add_parser("sample", help="draw samples and estimate shifts")
    _add_model_args(p_sample)
    p_sample.add_argument("-n", type=int, required=True, help="sample count")
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", help="write per-cell counts CSV")
    p_sample.set_defaults(func=cmd_sample)

    p_opt = sub.add_parser("optimize", help="maximize the anomalous-shift margin")
    p_opt.add_argument("--require-ci", action="store_true",
                       help="restrict to conditionally independent models")
    p_opt.add_argument("--budget", type=int, default=polytope.DEFAULT_RESTARTS,
                       help="number of restarts")
    p_opt.add_argument("--max-evals", type=int, default=polytope.DEFAULT_MAX_EVALS,
                       help="objective evaluations per restart")
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--out", help="write the improvement trace CSV")
    p_opt.set_defaults(func=cmd_optimize)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PositivityViolation, DomainError, DegenerateModel) as exc:
        if args.command == "sweep":
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if args.command != "sweep" else EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
