"""Search state and bound propagation for the disjunctive FJSSP model.

Each operation carries an earliest start ``est`` and latest completion ``lct``
plus the machines it may still use. Committed operations have a fixed start
and machine; committing appends the operation to its machine's sequence and
advances that machine's release time.
"""

from __future__ import annotations

import bisect
from enum import Enum

from ..instance import Instance, horizon


class Propagation(Enum):
    PRUNED = "pruned"
    FIXPOINT = "fixpoint"


PROPAGATION_LEVELS = ("basic", "overload_check")


class Problem:
    """Flattened, read-only view of an instance; operation ids run job by job."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.machine_count = inst.machine_count
        self.job_ops: list[list[int]] = []
        self.job_of: list[int] = []
        self.pos_of: list[int] = []
        self.alternatives: list[tuple[tuple[int, int], ...]] = []
        for i, job in enumerate(inst.jobs):
            ids = []
            for op in job:
                ids.append(len(self.job_of))
                self.job_of.append(i)
                self.pos_of.append(op.op_index)
                # Cheapest machine first; ties by machine index.
                self.alternatives.append(tuple(sorted(op.alternatives, key=lambda md: (md[1], md[0]))))
            self.job_ops.append(ids)
        self.size = len(self.job_of)
        self.min_duration = [alts[0][1] for alts in self.alternatives]
        self.horizon = horizon(inst)

    def op_id(self, job: int, op: int) -> int:
        return self.job_ops[job][op]


class SearchState:
    __slots__ = ("problem", "est", "lct", "cand", "start", "release", "sequences", "job_next",
                 "committed", "frontier")

    def __init__(self, problem: Problem):
        n, m = problem.size, problem.machine_count
        self.problem = problem
        self.est = [0] * n
        self.lct = [problem.horizon] * n
        self.cand = list(problem.alternatives)
        self.start: list[int | None] = [None] * n
        self.release = [0] * m
        self.sequences: list[tuple[int, ...]] = [()] * m
        self.job_next = [0] * len(problem.job_ops)
        self.committed = 0
        # (start, op id) of the latest commitment; the search appends in this order.
        self.frontier = (-1, -1)

    @classmethod
    def root(cls, inst_or_problem) -> "SearchState":
        problem = inst_or_problem if isinstance(inst_or_problem, Problem) else Problem(inst_or_problem)
        return cls(problem)

    def copy(self) -> "SearchState":
        s = SearchState.__new__(SearchState)
        s.problem = self.problem
        s.est = self.est[:]
        s.lct = self.lct[:]
        s.cand = self.cand[:]
        s.start = self.start[:]
        s.release = self.release[:]
        s.sequences = self.sequences[:]
        s.job_next = self.job_next[:]
        s.committed = self.committed
        s.frontier = self.frontier
        return s

    @property
    def complete(self) -> bool:
        return self.committed == self.problem.size

    def machine_of(self, o: int) -> int | None:
        return self.cand[o][0][0] if self.start[o] is not None else None

    def duration_of(self, o: int, machine: int) -> int:
        for m, d in self.problem.alternatives[o]:
            if m == machine:
                return d
        raise ValueError(f"operation {o} cannot run on machine {machine}")

    def job_ready(self, o: int) -> int:
        """End of the committed job predecessor (0 for a first operation)."""
        p = self.problem
        pos = p.pos_of[o]
        if pos == 0:
            return 0
        prev = p.job_ops[p.job_of[o]][pos - 1]
        if self.start[prev] is None:
            raise ValueError(f"operation {o} is not ready")
        return self.start[prev] + self.cand[prev][0][1]

    def ready_ops(self) -> list[int]:
        p = self.problem
        return [ops[k] for ops, k in zip(p.job_ops, self.job_next) if k < len(ops)]

    def commit(self, o: int, machine: int, start: int) -> None:
        p = self.problem
        job = p.job_of[o]
        if self.start[o] is not None:
            raise ValueError(f"operation {o} already committed")
        if self.job_next[job] != p.pos_of[o]:
            raise ValueError(f"operation {o} is not next in its job")
        if start < self.release[machine]:
            raise ValueError(f"start {start} before machine {machine} release {self.release[machine]}")
        d = self.duration_of(o, machine)
        self.cand[o] = ((machine, d),)
        self.start[o] = start
        if start > self.est[o]:
            self.est[o] = start
        self.release[machine] = start + d
        self.sequences[machine] = self.sequences[machine] + (o,)
        self.job_next[job] += 1
        self.committed += 1
        self.frontier = (start, o)


def propagate(state: SearchState, makespan_ub: int, level: str = "overload_check") -> Propagation:
    """Shrink domains to a fixpoint under ``makespan <= makespan_ub``.

    Rules: job-chain bounds in both directions, machine release times of the
    committed sequences, dropping machines an operation no longer fits on, and
    (``overload_check``) single-machine overload over mandatory operations.
    """
    p = state.problem
    est, lct, cand, start, release = state.est, state.lct, state.cand, state.start, state.release
    changed = True
    while changed:
        changed = False
        for ops in p.job_ops:
            t = 0
            for o in ops:
                s0 = start[o]
                if s0 is not None:
                    if s0 < t or s0 + cand[o][0][1] > lct[o]:
                        return Propagation.PRUNED
                    t = s0 + cand[o][0][1]
                    continue
                lo = est[o] if est[o] > t else t
                kept = []
                best_start = best_end = None
                for m, d in cand[o]:
                    s = lo if lo > release[m] else release[m]
                    if s + d <= lct[o]:
                        kept.append((m, d))
                        if best_start is None or s < best_start:
                            best_start = s
                        if best_end is None or s + d < best_end:
                            best_end = s + d
                if not kept:
                    return Propagation.PRUNED
                if len(kept) != len(cand[o]):
                    cand[o] = tuple(kept)
                    changed = True
                if best_start > est[o]:
                    est[o] = best_start
                    changed = True
                t = best_end
        for ops in p.job_ops:
            t = makespan_ub
            for o in reversed(ops):
                if lct[o] > t:
                    lct[o] = t
                    changed = True
                if start[o] is not None:
                    if start[o] + cand[o][0][1] > lct[o]:
                        return Propagation.PRUNED
                    t = start[o]
                else:
                    t = lct[o] - min(d for _, d in cand[o])
    if level == "overload_check" and _overloaded(state):
        return Propagation.PRUNED
    return Propagation.FIXPOINT


def _overloaded(state: SearchState) -> bool:
    """Some window [a, b] on a machine must hold more mandatory work than b - a."""
    windows = [[] for _ in range(state.problem.machine_count)]
    for o, s in enumerate(state.start):
        if s is None and len(state.cand[o]) == 1:
            m, d = state.cand[o][0]
            a = state.est[o] if state.est[o] > state.release[m] else state.release[m]
            windows[m].append((a, state.lct[o], d))
    for items in windows:
        if len(items) < 2:
            continue
        items.sort(reverse=True)
        by_lct: list[tuple[int, int]] = []
        i = 0
        while i < len(items):
            a = items[i][0]
            while i < len(items) and items[i][0] == a:
                bisect.insort(by_lct, (items[i][1], items[i][2]))
                i += 1
            load = 0
            for b, d in by_lct:
                load += d
                if a + load > b:
                    return True
    return False
