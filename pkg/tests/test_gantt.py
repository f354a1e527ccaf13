import re
from pathlib import Path

import pytest

from conftest import FIXTURES, instance_or_skip
from shopbound.gantt import InfeasibleScheduleRejected, emit_gantt
from shopbound.instance import load_instance, make_instance
from shopbound.schedule import Assignment, Schedule, machine_end_times, parse_orders, semi_active

GOLDEN = Path(__file__).parent / "golden"


def rects(svg):
    return [dict(re.findall(r'data-(\w+)="(\d+)"', r)) for r in re.findall(r"<rect [^>]*>", svg)]


def rightmost_edges(svg, machines):
    edges = [0] * machines
    for r in rects(svg):
        m = int(r["machine"])
        edges[m] = max(edges[m], int(r["end"]))
    return edges


def test_single_bar_svg():
    inst = make_instance("one", 1, [[[(0, 4)]]])
    svg = emit_gantt(Schedule("one", [Assignment(0, 0, 0, 0, 4)]), "svg", inst=inst)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    (bar,) = rects(svg)
    assert (bar["start"], bar["end"], bar["machine"]) == ("0", "4", "0")


def test_text_golden():
    inst = make_instance("pair", 1, [[[(0, 4)]], [[(0, 6)]]])
    sched = Schedule("pair", [Assignment(0, 0, 0, 0, 4), Assignment(1, 0, 0, 5, 11)])
    text = emit_gantt(sched, "text", inst=inst)
    assert text == (GOLDEN / "gantt_1m2j.txt").read_text()
    assert emit_gantt(sched, "text", inst=inst) == text


def test_same_job_same_color():
    inst = make_instance("c", 2, [[[(0, 2)], [(1, 2)]], [[(1, 1)]]])
    sched = Schedule("c", [Assignment(0, 0, 0, 0, 2), Assignment(0, 1, 1, 2, 4), Assignment(1, 0, 1, 0, 1)])
    svg = emit_gantt(sched, "svg", inst=inst)
    fills = {}
    for tag in re.findall(r"<rect [^>]*>", svg):
        job = re.search(r'data-job="(\d+)"', tag).group(1)
        fills.setdefault(job, set()).add(re.search(r'fill="([^"]+)"', tag).group(1))
    assert all(len(f) == 1 for f in fills.values())
    assert fills["0"] != fills["1"]


def test_rejects_infeasible():
    inst = make_instance("pair", 1, [[[(0, 4)]], [[(0, 6)]]])
    bad = Schedule("pair", [Assignment(0, 0, 0, 0, 4), Assignment(1, 0, 0, 3, 9)])
    with pytest.raises(InfeasibleScheduleRejected):
        emit_gantt(bad, "svg", inst=inst)
    with pytest.raises(InfeasibleScheduleRejected):
        emit_gantt(bad, "text")
    with pytest.raises(ValueError):
        emit_gantt(Schedule("pair", bad.assignments[:1]), "pdf")


def test_ta45_svg_edges_match_end_times():
    inst = load_instance(FIXTURES / "instances" / "taillard" / "ta45.txt", "jssp")
    orders = parse_orders((FIXTURES / "paper_solutions" / "ta45.txt").read_text())
    svg = emit_gantt(semi_active(inst, orders), "svg", inst=inst)
    assert rightmost_edges(svg, inst.machine_count) == orders.end_times


def test_car5_svg_edges_match_end_times():
    inst = instance_or_skip("car5")
    orders = parse_orders((FIXTURES / "paper_solutions" / "car5.txt").read_text())
    sched = semi_active(inst, orders)
    svg = emit_gantt(sched, "svg", inst=inst)
    assert rightmost_edges(svg, inst.machine_count) == machine_end_times(sched, inst.machine_count) \
        == [4909, 4909, 4907, 4909, 4909, 4909]
