"""Analytic makespan lower bounds from relaxations."""

from __future__ import annotations

from .instance import Instance


def lb_job_chain(inst: Instance) -> int:
    """Drop machine capacities: the longest job, each op on its fastest machine."""
    return max(sum(op.min_duration for op in job) for job in inst.jobs)


def heads_and_tails(inst: Instance) -> tuple[dict, dict]:
    heads, tails = {}, {}
    for job in inst.jobs:
        acc = 0
        for op in job:
            heads[(op.job_index, op.op_index)] = acc
            acc += op.min_duration
        acc = 0
        for op in reversed(job):
            tails[(op.job_index, op.op_index)] = acc
            acc += op.min_duration
    return heads, tails


def lb_machine_load(inst: Instance) -> int:
    """One-machine relaxation: min head + mandatory load + min tail, maximized over machines.

    Only operations with a single alternative count towards a machine's load.
    """
    heads, tails = heads_and_tails(inst)
    load = [0] * inst.machine_count
    min_head = [None] * inst.machine_count
    min_tail = [None] * inst.machine_count
    for op in inst.operations():
        if len(op.alternatives) != 1:
            continue
        (m, d), = op.alternatives
        key = (op.job_index, op.op_index)
        load[m] += d
        min_head[m] = heads[key] if min_head[m] is None else min(min_head[m], heads[key])
        min_tail[m] = tails[key] if min_tail[m] is None else min(min_tail[m], tails[key])
    best = 0
    for m in range(inst.machine_count):
        if load[m]:
            best = max(best, min_head[m] + load[m] + min_tail[m])
    return best


def lb_best(inst: Instance) -> int:
    return max(lb_job_chain(inst), lb_machine_load(inst))
