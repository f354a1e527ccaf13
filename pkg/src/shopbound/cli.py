"""Command-line entry point: ``shopbound solve|verify|bounds|gantt``.

Exit codes: 0 success or feasible, 1 verification failed or SAT infeasible,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .gantt import InfeasibleScheduleRejected, emit_gantt
from .instance import InstanceFormatError, InvalidInstance, load_instance
from .registry import (GapNotClosed, InvariantViolation, ZeroGap, diff_registries, diff_report, lookup,
                       registry_load, registry_report)
from .schedule import (CyclicOrders, InvalidOrders, Schedule, ScheduleError, machine_end_times, parse_orders,
                       report_dict, semi_active, verify)
from .solver import InvalidConfig, Mode, SolveConfig, Status, solve

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class CommandOutcome:
    exit_code: int
    stdout: str = ""
    stderr: str = ""


class _UsageError(Exception):
    pass


def _instance(args):
    try:
        return load_instance(args.instance, getattr(args, "instance_format", None) or "auto")
    except OSError as exc:
        raise _UsageError(f"cannot read instance: {exc}") from None
    except (InstanceFormatError, InvalidInstance) as exc:
        raise _UsageError(f"{args.instance}: {exc}") from None


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None


def _load_solution(path, inst) -> Schedule:
    """Solution JSON, or a machine-order file turned into its semi-active schedule."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            return Schedule.from_json(json.loads(text))
        except (json.JSONDecodeError, ScheduleError) as exc:
            raise _UsageError(f"{path}: {exc}") from None
    return semi_active(inst, parse_orders(text, Path(path).stem))


def trace_csv(trace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["elapsed_s", "lb", "ub"])
    for elapsed, lb, ub in trace:
        writer.writerow([f"{elapsed:.6f}", lb, "" if ub is None else ub])
    return buf.getvalue()


def cmd_solve(args) -> CommandOutcome:
    inst = _instance(args)
    try:
        cfg = SolveConfig(mode=args.mode, timeout=args.timeout_s, threshold=args.threshold,
                          workers=args.workers, seed=args.seed)
    except InvalidConfig as exc:
        raise _UsageError(str(exc)) from None
    report = solve(inst, cfg)
    if args.out and report.best_schedule is not None:
        Path(args.out).write_text(report.best_schedule.dumps(), encoding="utf-8")
    if args.trace:
        Path(args.trace).write_text(trace_csv(report.trace), encoding="utf-8")
    payload = json.dumps(report.summary()) + "\n"
    code = EXIT_FAILED if report.status is Status.INFEASIBLE else EXIT_OK
    return CommandOutcome(code, payload)


def cmd_verify(args) -> CommandOutcome:
    inst = _instance(args)
    published = None
    if args.solution:
        text = _read(args.solution)
        try:
            sched = Schedule.from_json(json.loads(text))
        except (json.JSONDecodeError, ScheduleError) as exc:
            raise _UsageError(f"{args.solution}: {exc}") from None
    else:
        text = _read(args.orders)
        try:
            orders = parse_orders(text, Path(args.orders).stem)
        except InvalidOrders as exc:
            raise _UsageError(f"{args.orders}: {exc}") from None
        published = orders.end_times
        try:
            sched = semi_active(inst, orders)
        except (CyclicOrders, InvalidOrders) as exc:
            out = {"feasible": False, "error": type(exc).__name__, "detail": str(exc)}
            return CommandOutcome(EXIT_FAILED, json.dumps(out) + "\n")
    try:
        report = verify(inst, sched)
    except ScheduleError as exc:
        out = {"feasible": False, "error": type(exc).__name__, "detail": str(exc)}
        return CommandOutcome(EXIT_FAILED, json.dumps(out) + "\n")
    out = report_dict(report)
    out["machine_end_times"] = machine_end_times(sched, inst.machine_count)
    if published is not None:
        out["published_end_times"] = published
    return CommandOutcome(EXIT_OK if report.feasible else EXIT_FAILED, json.dumps(out) + "\n")


def cmd_bounds(args) -> CommandOutcome:
    try:
        records = registry_load(args.registry)
        if args.diff:
            reductions = diff_registries(registry_load(args.diff), records)
            return CommandOutcome(EXIT_OK, diff_report(reductions))
    except OSError as exc:
        raise _UsageError(f"cannot read registry: {exc}") from None
    except (InvariantViolation, GapNotClosed, ZeroGap) as exc:
        raise _UsageError(str(exc)) from None
    if args.instance:
        rec = lookup(records, args.instance)
        if rec is None:
            raise _UsageError(f"{args.instance} not in registry")
        return CommandOutcome(EXIT_OK, f"{rec.lb} {rec.ub} {'optimal' if rec.optimal else 'open'}\n")
    return CommandOutcome(EXIT_OK, registry_report(records))


def cmd_gantt(args) -> CommandOutcome:
    inst = _instance(args)
    try:
        sched = _load_solution(args.solution, inst)
        doc = emit_gantt(sched, args.format, inst=inst)
    except (InfeasibleScheduleRejected, ScheduleError) as exc:
        return CommandOutcome(EXIT_FAILED, "", f"{type(exc).__name__}: {exc}\n")
    if args.out:
        Path(args.out).write_text(doc, encoding="utf-8")
        return CommandOutcome(EXIT_OK)
    return CommandOutcome(EXIT_OK, doc)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shopbound", description="JSSP/FJSSP solving, verification and bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="branch and bound in OPT or SAT mode")
    p.add_argument("--instance", required=True)
    p.add_argument("--format", dest="instance_format", choices=["jssp", "fjssp"])
    p.add_argument("--mode", choices=["opt", "sat"], default="opt")
    p.add_argument("--threshold", type=int)
    p.add_argument("--timeout-s", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution or machine-order file")
    p.add_argument("--instance", required=True)
    p.add_argument("--format", dest="instance_format", choices=["jssp", "fjssp"])
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--solution")
    group.add_argument("--orders")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="query the bounds registry")
    p.add_argument("--registry", required=True)
    p.add_argument("--diff", metavar="OLD.csv")
    p.add_argument("--instance")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gantt", help="render a solution")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--format", choices=["svg", "text"], default="svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gantt)
    return parser


def run(argv=None) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandOutcome(EXIT_USAGE if exc.code else EXIT_OK)
    try:
        return args.func(args)
    except _UsageError as exc:
        return CommandOutcome(EXIT_USAGE, "", f"error: {exc}\n")


def main(argv=None) -> int:
    outcome = run(argv)
    sys.stdout.write(outcome.stdout)
    sys.stderr.write(outcome.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
