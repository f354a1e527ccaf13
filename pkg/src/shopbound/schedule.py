"""Schedules, the feasibility checker and semi-active reconstruction.

Intervals are half-open: an operation ending at t and another starting at t
on the same machine do not overlap.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict, deque
from dataclasses import asdict, dataclass, field

from .instance import Instance


class ScheduleError(ValueError):
    pass


class UnknownOperation(ScheduleError):
    pass


class DuplicateAssignment(ScheduleError):
    pass


class MissingAssignment(ScheduleError):
    pass


class InvalidOrders(ScheduleError):
    pass


class CyclicOrders(ScheduleError):
    """Job chains and machine sequences contain a cycle; ``cycle`` is the witness."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        path = " -> ".join(f"{j}.{o}" for j, o in self.cycle)
        super().__init__(f"CyclicOrders: {path}")


@dataclass(frozen=True, order=True)
class Assignment:
    job: int
    op: int
    machine: int
    start: int
    end: int


@dataclass
class Schedule:
    instance_name: str
    assignments: list[Assignment]

    @property
    def makespan(self) -> int:
        return max((a.end for a in self.assignments), default=0)

    def to_json(self) -> dict:
        return {
            "instance": self.instance_name,
            "makespan": self.makespan,
            "assignments": [
                {"job": a.job, "op": a.op, "machine": a.machine, "start": a.start, "end": a.end}
                for a in sorted(self.assignments, key=lambda a: (a.job, a.op))
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "Schedule":
        try:
            assignments = [
                Assignment(int(a["job"]), int(a["op"]), int(a["machine"]), int(a["start"]), int(a["end"]))
                for a in data["assignments"]
            ]
            return cls(str(data["instance"]), assignments)
        except (KeyError, TypeError) as exc:
            raise ScheduleError(f"malformed solution JSON: {exc}") from None


@dataclass(frozen=True)
class Violation:
    kind: str  # precedence | overlap | duration | machine | negative_start
    detail: str
    ops: tuple[tuple[int, int], ...] = ()


@dataclass
class VerificationReport:
    feasible: bool
    makespan: int
    violations: list[Violation] = field(default_factory=list)


def verify(inst: Instance, sched: Schedule) -> VerificationReport:
    by_op: dict[tuple[int, int], Assignment] = {}
    for a in sched.assignments:
        key = (a.job, a.op)
        if not (0 <= a.job < inst.job_count and 0 <= a.op < len(inst.jobs[a.job])):
            raise UnknownOperation(f"operation {a.job}.{a.op} is not in instance {inst.name!r}")
        if key in by_op:
            raise DuplicateAssignment(f"operation {a.job}.{a.op} assigned twice")
        by_op[key] = a
    missing = [(op.job_index, op.op_index) for op in inst.operations() if (op.job_index, op.op_index) not in by_op]
    if missing:
        j, o = missing[0]
        raise MissingAssignment(f"{len(missing)} operation(s) unassigned, first {j}.{o}")

    violations = []
    for a in sched.assignments:
        spec = inst.op(a.job, a.op)
        d = spec.duration_on(a.machine)
        if a.start < 0:
            violations.append(Violation("negative_start", f"{a.job}.{a.op} starts at {a.start}", ((a.job, a.op),)))
        if d is None:
            violations.append(Violation(
                "machine", f"{a.job}.{a.op} on machine {a.machine}, allowed {list(spec.machines)}", ((a.job, a.op),)))
        elif a.end != a.start + d:
            violations.append(Violation(
                "duration", f"{a.job}.{a.op} spans [{a.start},{a.end}) but needs {d}", ((a.job, a.op),)))

    for i, job in enumerate(inst.jobs):
        for k in range(1, len(job)):
            prev, cur = by_op[(i, k - 1)], by_op[(i, k)]
            if cur.start < prev.end:
                violations.append(Violation(
                    "precedence", f"{i}.{k} starts at {cur.start} before {i}.{k - 1} ends at {prev.end}",
                    ((i, k - 1), (i, k))))

    per_machine = defaultdict(list)
    for a in sched.assignments:
        per_machine[a.machine].append(a)
    for machine in sorted(per_machine):
        items = sorted(per_machine[machine], key=lambda a: (a.start, a.end, a.job, a.op))
        # Sweep keeps the furthest-reaching interval so nested overlaps are caught too.
        reach = None
        for a in items:
            if reach is not None and a.start < reach.end and a.end > a.start:
                violations.append(Violation(
                    "overlap",
                    f"machine {machine}: {reach.job}.{reach.op} [{reach.start},{reach.end}) "
                    f"overlaps {a.job}.{a.op} [{a.start},{a.end})",
                    ((reach.job, reach.op), (a.job, a.op))))
            if reach is None or a.end > reach.end:
                reach = a
    return VerificationReport(not violations, sched.makespan, violations)


def machine_end_times(sched: Schedule, machine_count: int | None = None) -> list[int]:
    if machine_count is None:
        machine_count = max((a.machine for a in sched.assignments), default=-1) + 1
    ends = [0] * machine_count
    for a in sched.assignments:
        ends[a.machine] = max(ends[a.machine], a.end)
    return ends


@dataclass
class MachineOrderSolution:
    """Per-machine operation sequences, rows normalized to 0-based machines.

    A token's ``op`` is None when the source listed only the job (Taillard
    style); :meth:`resolve` fills it in from the instance.
    """

    rows: list[list[tuple[int, int | None]]]
    name: str = ""
    end_times: list[int] | None = None

    def resolve(self, inst: Instance) -> "MachineOrderSolution":
        rows = []
        for machine, row in enumerate(self.rows):
            out = []
            for job, op in row:
                if op is None:
                    if not 0 <= job < inst.job_count:
                        raise InvalidOrders(f"machine {machine}: job {job} not in instance")
                    hits = [o.op_index for o in inst.jobs[job] if machine in o.machines]
                    if len(hits) != 1:
                        raise InvalidOrders(
                            f"machine {machine}: bare job token {job} matches {len(hits)} operations")
                    op = hits[0]
                out.append((job, op))
            rows.append(out)
        return MachineOrderSolution(rows, self.name, self.end_times)

    def check(self, inst: Instance) -> None:
        """Raise InvalidOrders unless every operation appears exactly once on an allowed machine."""
        if len(self.rows) > inst.machine_count:
            raise InvalidOrders(f"{len(self.rows)} machine rows for {inst.machine_count} machines")
        seen = {}
        for machine, row in enumerate(self.rows):
            last_op_of_job = {}
            for job, op in row:
                if op is None:
                    raise InvalidOrders("unresolved bare job token; call resolve() first")
                if not (0 <= job < inst.job_count and 0 <= op < len(inst.jobs[job])):
                    raise InvalidOrders(f"machine {machine}: unknown operation {job}.{op}")
                if (job, op) in seen:
                    raise InvalidOrders(f"operation {job}.{op} on machines {seen[(job, op)]} and {machine}")
                if inst.op(job, op).duration_on(machine) is None:
                    raise InvalidOrders(f"operation {job}.{op} cannot run on machine {machine}")
                if last_op_of_job.get(job, -1) > op:
                    raise InvalidOrders(f"machine {machine}: {job}.{op} after {job}.{last_op_of_job[job]}")
                last_op_of_job[job] = op
                seen[(job, op)] = machine
        if len(seen) != inst.operation_count:
            missing = next((o.job_index, o.op_index) for o in inst.operations() if (o.job_index, o.op_index) not in seen)
            raise InvalidOrders(f"{inst.operation_count - len(seen)} operation(s) missing, first {missing[0]}.{missing[1]}")


_TOKEN = re.compile(r"^(\d+)(?:\.(\d+))?$")


def parse_orders(text: str, name: str = "") -> MachineOrderSolution:
    """Read the machine-order text format.

    One non-comment line per machine holding ``job.task`` tokens separated by
    whitespace or commas (a bare ``job`` is accepted for JSSP). Comment lines
    start with ``#``; two are interpreted::

        # base: 1                 machine rows in the file are numbered from 1
        # end-times: 2169 ...     published last end time per row
    """
    rows = []
    end_times = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            key = key.strip().lower()
            if key == "end-times":
                end_times = [int(t) for t in value.split()]
            continue
        row = []
        for tok in re.split(r"[\s,]+", line):
            if not tok:
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise InvalidOrders(f"line {lineno}: bad token {tok!r}")
            row.append((int(m.group(1)), int(m.group(2)) if m.group(2) is not None else None))
        rows.append(row)
    # The base directive only documents the printed numbering; rows are positional.
    return MachineOrderSolution(rows, name, end_times)


def format_orders(orders: MachineOrderSolution, base: int = 0) -> str:
    lines = []
    if base:
        lines.append(f"# base: {base}")
    if orders.end_times:
        lines.append("# end-times: " + " ".join(map(str, orders.end_times)))
    for row in orders.rows:
        lines.append(" ".join(f"{j}" if o is None else f"{j}.{o}" for j, o in row))
    return "\n".join(lines) + "\n"


def _find_cycle(nodes, succ, indeg) -> list:
    remaining = {n for n in nodes if indeg[n] > 0}
    # Every remaining node has a remaining predecessor; walk backwards until a repeat.
    pred = defaultdict(list)
    for u in remaining:
        for v in succ[u]:
            if v in remaining:
                pred[v].append(u)
    node = min(remaining)
    seen = {}
    path = []
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = min(pred[node])
    cycle = path[seen[node]:]
    cycle.reverse()
    return cycle


def semi_active(inst: Instance, orders: MachineOrderSolution) -> Schedule:
    """Earliest-start schedule honouring job chains and the given machine sequences."""
    orders = orders.resolve(inst)
    orders.check(inst)
    machine_of = {}
    succ = defaultdict(list)
    indeg = defaultdict(int)
    nodes = [(o.job_index, o.op_index) for o in inst.operations()]
    for node in nodes:
        indeg[node] = 0
    for job in inst.jobs:
        for k in range(1, len(job)):
            a, b = (job[k - 1].job_index, k - 1), (job[k].job_index, k)
            succ[a].append(b)
            indeg[b] += 1
    for machine, row in enumerate(orders.rows):
        for job, op in row:
            machine_of[(job, op)] = machine
        for a, b in zip(row, row[1:]):
            succ[a].append(b)
            indeg[b] += 1

    start = dict.fromkeys(nodes, 0)
    queue = deque(n for n in nodes if indeg[n] == 0)
    assignments = []
    while queue:
        node = queue.popleft()
        machine = machine_of[node]
        end = start[node] + inst.op(*node).duration_on(machine)
        assignments.append(Assignment(node[0], node[1], machine, start[node], end))
        for nxt in succ[node]:
            if end > start[nxt]:
                start[nxt] = end
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                queue.append(nxt)
    if len(assignments) != len(nodes):
        raise CyclicOrders(_find_cycle(nodes, succ, indeg))
    assignments.sort(key=lambda a: (a.job, a.op))
    return Schedule(inst.name, assignments)


def orders_from_schedule(sched: Schedule, machine_count: int) -> MachineOrderSolution:
    rows = [[] for _ in range(machine_count)]
    for a in sorted(sched.assignments, key=lambda a: (a.start, a.end, a.job, a.op)):
        rows[a.machine].append((a.job, a.op))
    return MachineOrderSolution(rows, sched.instance_name, machine_end_times(sched, machine_count))


def report_dict(report: VerificationReport) -> dict:
    return {"feasible": report.feasible, "makespan": report.makespan,
            "violations": [asdict(v) for v in report.violations]}
