"""Depth-first branch and bound over active schedules.

Schedules are built by appending operations in non-decreasing start order
(ties by a rank fixed for each restart), each at the earliest time its job
and chosen machine allow. A child ``(o, m)`` is skipped when another ready
operation could be completed on ``m`` before ``o`` would start there; some
optimal schedule never needs such a child, so the enumeration stays complete.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from enum import Enum

from ..bounds import lb_best
from ..instance import Instance
from ..schedule import Assignment, Schedule, verify
from .state import PROPAGATION_LEVELS, Problem, Propagation, SearchState, propagate


class InvalidConfig(ValueError):
    pass


class Mode(str, Enum):
    OPT = "opt"
    SAT = "sat"


class Status(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNKNOWN = "Unknown"


@dataclass
class SolveConfig:
    mode: Mode | str = Mode.OPT
    timeout: float | None = None  # seconds of wall clock
    threshold: int | None = None  # SAT: decide makespan <= threshold
    workers: int = 1
    seed: int = 0
    propagation_level: str = "overload_check"
    restart_scale: int = 128
    node_limit: int | None = None  # per worker; exceeding it ends the search like a timeout

    def __post_init__(self):
        try:
            self.mode = Mode(self.mode)
        except ValueError:
            raise InvalidConfig(f"unknown mode {self.mode!r}") from None
        if self.mode is Mode.SAT and self.threshold is None:
            raise InvalidConfig("SAT mode requires a threshold")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise InvalidConfig("workers must be a positive integer")
        if self.propagation_level not in PROPAGATION_LEVELS:
            raise InvalidConfig(f"propagation_level must be one of {PROPAGATION_LEVELS}")
        if self.timeout is not None and self.timeout <= 0:
            raise InvalidConfig("timeout must be positive")
        if self.restart_scale < 1:
            raise InvalidConfig("restart_scale must be positive")


@dataclass
class SolveReport:
    status: Status
    best_lb: int
    best_ub: int | None
    best_schedule: Schedule | None
    trace: list[tuple[float, int, int | None]] = field(default_factory=list)
    nodes: int = 0
    failures: int = 0
    restarts: int = 0
    elapsed: float = 0.0

    def summary(self) -> dict:
        return {"status": self.status.value, "lb": self.best_lb, "ub": self.best_ub}


def luby(i: int) -> int:
    """i-th term (1-based) of the Luby sequence 1 1 2 1 1 2 4 1 1 2 ..."""
    if i < 1:
        raise ValueError("luby index starts at 1")
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class BoundsCell:
    """Monotone lb/ub shared by all workers; lb max-merges, ub min-merges."""

    def __init__(self, lb: int, t0: float):
        self._lock = threading.Lock()
        self.t0 = t0
        self.lb = lb
        self.ub: int | None = None
        self.schedule: Schedule | None = None
        self.proved = False
        self.stop = threading.Event()
        self.trace: list[tuple[float, int, int | None]] = [(0.0, lb, None)]

    def _record(self):
        self.trace.append((round(time.monotonic() - self.t0, 6), self.lb, self.ub))

    def raise_lb(self, value: int) -> None:
        with self._lock:
            if self.ub is not None:
                value = min(value, self.ub)
            if value > self.lb:
                self.lb = value
                self._record()
            if self.ub is not None and self.lb >= self.ub:
                self.proved = True
                self.stop.set()

    def offer(self, sched: Schedule) -> bool:
        with self._lock:
            if self.ub is not None and sched.makespan >= self.ub:
                return False
            self.ub = sched.makespan
            self.schedule = sched
            self._record()
            if self.lb >= self.ub:
                self.proved = True
                self.stop.set()
            return True


def _root_lower_bound(problem: Problem, level: str) -> tuple[int, bool]:
    """Largest T such that root propagation refutes makespan <= T-1; also flags outright refutation."""
    lo = lb_best(problem.inst)
    if lo > problem.horizon:
        return lo, True

    def refuted(t):
        return propagate(SearchState.root(problem), t, level) is Propagation.PRUNED

    if not refuted(lo):
        return lo, False
    hi = problem.horizon  # makespan <= horizon is always achievable
    # invariant: refuted(lo) and not refuted(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if refuted(mid):
            lo = mid
        else:
            hi = mid
    return hi, False


class _Worker:
    def __init__(self, problem: Problem, cfg: SolveConfig, cell: BoundsCell, seed: int, deadline):
        self.p = problem
        self.cfg = cfg
        self.cell = cell
        self.rng = random.Random(seed)
        self.deadline = deadline
        self.nodes = 0
        self.failures = 0
        self.restarts = 0
        self.exhausted = False
        self.found = False

    def _bound(self) -> int:
        if self.cfg.mode is Mode.SAT:
            ub = self.cfg.threshold
            if self.cell.ub is not None:
                ub = min(ub, self.cell.ub)
            return ub
        return self.p.horizon if self.cell.ub is None else self.cell.ub - 1

    def _out_of_budget(self) -> bool:
        if self.cell.stop.is_set():
            return True
        if self.deadline is not None and time.monotonic() >= self.deadline:
            return True
        return self.cfg.node_limit is not None and self.nodes >= self.cfg.node_limit

    def set_ranks(self, randomize: bool) -> None:
        """Static tie-break order for one run: larger min duration, then (job, op) or a seeded shuffle."""
        p = self.p
        noise = [self.rng.random() if randomize else 0.0 for _ in range(p.size)]
        order = sorted(range(p.size), key=lambda o: (-p.min_duration[o], noise[o], p.job_of[o], p.pos_of[o]))
        self.rank = [0] * p.size
        for r, o in enumerate(order):
            self.rank[o] = r

    def children(self, state: SearchState):
        rank = self.rank
        ready = state.ready_ops()
        est, lct, release = state.est, state.lct, state.release
        if state.frontier[1] >= 0:
            frontier = (state.frontier[0], rank[state.frontier[1]])
        else:
            frontier = (-1, -1)
        # Earliest completion of each ready op on each machine, for the dominance test.
        best_on = {}
        second_on = {}
        placements = []
        for o in ready:
            base = state.job_ready(o)
            if est[o] > base:
                base = est[o]
            for m, d in state.cand[o]:
                s = base if base > release[m] else release[m]
                if s + d > lct[o]:
                    continue
                placements.append((o, m, d, s))
                c = s + d
                if m not in best_on or c < best_on[m][0]:
                    second_on[m] = best_on.get(m, (None, None))
                    best_on[m] = (c, o)
                elif second_on.get(m, (None, None))[0] is None or c < second_on[m][0]:
                    second_on[m] = (c, o)
        op_start = {}
        kids = []
        for o, m, d, s in placements:
            if (s, rank[o]) <= frontier:
                continue
            c_best, o_best = best_on[m]
            rival = c_best if o_best != o else second_on.get(m, (None, None))[0]
            if rival is not None and rival <= s:
                continue
            kids.append((o, m, d, s))
            if o not in op_start or s < op_start[o]:
                op_start[o] = s
        # Op with the earliest start first; its machines cheapest first; later siblings
        # sequence a conflicting op ahead of it.
        kids.sort(key=lambda k: (op_start[k[0]], rank[k[0]], k[2], k[3], k[1]))
        return kids

    def to_schedule(self, state: SearchState) -> Schedule:
        p = self.p
        out = []
        for o in range(p.size):
            m, d = state.cand[o][0]
            s = state.start[o]
            out.append(Assignment(p.job_of[o], p.pos_of[o], m, s, s + d))
        return Schedule(p.inst.name, out)

    def run(self) -> None:
        cfg = self.cfg
        run_index = 0
        while not self._out_of_budget():
            run_index += 1
            limit = luby(run_index) * cfg.restart_scale
            self.set_ranks(randomize=run_index > 1)
            outcome = self._dfs(limit)
            if outcome == "exhausted":
                self.exhausted = True
                return
            if outcome == "stopped":
                return
            self.restarts += 1

    def _dfs(self, fail_limit: int) -> str:
        cfg = self.cfg
        level = cfg.propagation_level
        root = SearchState.root(self.p)
        fails = 0
        self.nodes += 1
        if propagate(root, self._bound(), level) is Propagation.PRUNED:
            self.failures += 1
            return "exhausted"
        stack = [[root, self.children(root), 0]]
        while stack:
            if self._out_of_budget():
                return "stopped"
            entry = stack[-1]
            state, kids, i = entry
            if i >= len(kids):
                stack.pop()
                continue
            entry[2] = i + 1
            o, m, _, s = kids[i]
            child = state.copy()
            child.commit(o, m, s)
            self.nodes += 1
            if propagate(child, self._bound(), level) is Propagation.PRUNED:
                fails += 1
                self.failures += 1
                if fails >= fail_limit:
                    return "restart"
                continue
            if child.complete:
                sched = self.to_schedule(child)
                report = verify(self.p.inst, sched)
                if not report.feasible:
                    raise AssertionError(f"solver produced an infeasible schedule: {report.violations[:3]}")
                self.found = True
                self.cell.offer(sched)
                if cfg.mode is Mode.SAT:
                    self.cell.stop.set()
                    return "stopped"
                continue
            grand = self.children(child)
            if not grand:
                fails += 1
                self.failures += 1
                if fails >= fail_limit:
                    return "restart"
                continue
            stack.append([child, grand, 0])
        return "exhausted"


def solve(inst: Instance, cfg: SolveConfig | None = None) -> SolveReport:
    cfg = cfg or SolveConfig()
    t0 = time.monotonic()
    deadline = None if cfg.timeout is None else t0 + cfg.timeout
    problem = Problem(inst)
    root_lb, refuted = _root_lower_bound(problem, cfg.propagation_level)
    cell = BoundsCell(root_lb, t0)

    if cfg.mode is Mode.SAT and (refuted or cfg.threshold < root_lb):
        cell.raise_lb(cfg.threshold + 1)
        return _report(cell, Status.INFEASIBLE, [], t0)

    workers = [_Worker(problem, cfg, cell, cfg.seed + k, deadline) for k in range(cfg.workers)]
    if cfg.workers == 1:
        workers[0].run()
    else:
        threads = [threading.Thread(target=w.run, daemon=True) for w in workers]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    exhausted = any(w.exhausted for w in workers)
    if cfg.mode is Mode.OPT:
        if exhausted and cell.ub is not None:
            cell.raise_lb(cell.ub)
        if cell.ub is not None and cell.lb >= cell.ub:
            status = Status.OPTIMAL
        elif cell.ub is not None:
            status = Status.FEASIBLE
        else:
            status = Status.UNKNOWN
    else:
        if cell.ub is not None and cell.ub <= cfg.threshold:
            status = Status.OPTIMAL if cell.lb >= cell.ub else Status.FEASIBLE
        elif exhausted:
            cell.raise_lb(cfg.threshold + 1)
            status = Status.INFEASIBLE
        else:
            status = Status.UNKNOWN
    return _report(cell, status, workers, t0)


def _report(cell: BoundsCell, status: Status, workers, t0: float) -> SolveReport:
    return SolveReport(
        status=status,
        best_lb=cell.lb,
        best_ub=cell.ub,
        best_schedule=cell.schedule,
        trace=list(cell.trace),
        nodes=sum(w.nodes for w in workers),
        failures=sum(w.failures for w in workers),
        restarts=sum(w.restarts for w in workers),
        elapsed=time.monotonic() - t0,
    )


@dataclass
class LadderResult:
    certified_lb: int
    feasible_threshold: int | None  # first threshold answered Feasible, None if the ladder stopped on Unknown
    schedule: Schedule | None
    trace: list[tuple[int, Status, float]]  # (threshold, answer, seconds)

    def __iter__(self):
        yield self.certified_lb
        yield self.trace


def sat_probe_ladder(inst: Instance, start_threshold: int, cfg: SolveConfig | None = None,
                     max_probes: int | None = None) -> LadderResult:
    """Probe makespan <= T for T = start, start+1, ... until one is not refuted."""
    base = cfg or SolveConfig()
    certified = lb_best(inst)
    trace = []
    t = start_threshold
    while max_probes is None or len(trace) < max_probes:
        probe = SolveConfig(mode=Mode.SAT, threshold=t, timeout=base.timeout, workers=base.workers,
                            seed=base.seed, propagation_level=base.propagation_level,
                            restart_scale=base.restart_scale, node_limit=base.node_limit)
        report = solve(inst, probe)
        trace.append((t, report.status, report.elapsed))
        if report.status is Status.INFEASIBLE:
            certified = max(certified, t + 1)
            t += 1
            continue
        if report.status in (Status.FEASIBLE, Status.OPTIMAL):
            return LadderResult(certified, t, report.best_schedule, trace)
        break
    return LadderResult(certified, None, None, trace)
