"""Gantt rendering of a verified schedule as SVG or plain text.

One row per machine, time running left to right. Bars of the same job share a
color (SVG) or glyph (text); idle time is left blank.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .instance import Instance
from .schedule import Schedule, machine_end_times, verify

GLYPHS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"

ROW_HEIGHT = 24
BAR_HEIGHT = 18
LEFT_MARGIN = 60
TOP_MARGIN = 20
PLOT_WIDTH = 800


class InfeasibleScheduleRejected(ValueError):
    pass


def job_color(job: int) -> str:
    # Golden-angle hue walk keeps neighbouring jobs apart.
    hue = (job * 137.508) % 360
    return f"hsl({hue:.1f},65%,60%)"


def _check(inst: Instance | None, sched: Schedule) -> None:
    if inst is not None:
        report = verify(inst, sched)
        if not report.feasible:
            first = report.violations[0]
            raise InfeasibleScheduleRejected(f"{len(report.violations)} violation(s), first: {first.detail}")
        return
    # Without an instance only intrinsic checks are possible.
    by_machine = {}
    for a in sched.assignments:
        if a.start < 0 or a.end < a.start:
            raise InfeasibleScheduleRejected(f"{a.job}.{a.op}: bad interval [{a.start},{a.end})")
        by_machine.setdefault(a.machine, []).append(a)
    for m, items in by_machine.items():
        items.sort(key=lambda a: (a.start, a.end))
        for x, y in zip(items, items[1:]):
            if y.start < x.end:
                raise InfeasibleScheduleRejected(f"machine {m}: {x.job}.{x.op} overlaps {y.job}.{y.op}")


def emit_gantt(sched: Schedule, format: str = "svg", inst: Instance | None = None,
               machine_count: int | None = None, width: int = PLOT_WIDTH) -> str:
    """Render ``sched``; pass ``inst`` to reject anything ``verify`` would reject."""
    _check(inst, sched)
    if machine_count is None:
        machine_count = inst.machine_count if inst is not None else len(machine_end_times(sched))
    if format == "svg":
        return _svg(sched, machine_count, width)
    if format == "text":
        return _text(sched, machine_count, width)
    raise ValueError(f"unknown gantt format {format!r}")


def _text(sched: Schedule, machine_count: int, width: int) -> str:
    span = sched.makespan
    # One column per time unit when it fits, otherwise scaled down.
    cols = span if span <= width else width
    label_w = len(f"M{max(machine_count - 1, 0)}")

    def col(t):
        return t if cols == span else (t * cols) // span

    rows = [[" "] * cols for _ in range(machine_count)]
    for a in sorted(sched.assignments, key=lambda a: (a.machine, a.start, a.job)):
        glyph = GLYPHS[a.job % len(GLYPHS)]
        lo, hi = col(a.start), max(col(a.end), col(a.start) + 1)
        for c in range(lo, min(hi, cols)):
            rows[a.machine][c] = glyph
    lines = [f"{sched.instance_name} makespan={span}"]
    for m, row in enumerate(rows):
        lines.append(f"{'M' + str(m):<{label_w}} |{''.join(row)}|")
    lines.append(f"{'':<{label_w}} 0{str(span):>{max(cols, 1)}}")
    return "\n".join(lines) + "\n"


def _svg(sched: Schedule, machine_count: int, width: int) -> str:
    span = max(sched.makespan, 1)
    scale = width / span
    height = TOP_MARGIN * 2 + ROW_HEIGHT * machine_count
    total_w = LEFT_MARGIN + width + 20
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height}" '
        f'viewBox="0 0 {total_w} {height}" data-makespan="{sched.makespan}">',
        f"<title>{escape(sched.instance_name)} makespan {sched.makespan}</title>",
    ]
    for m in range(machine_count):
        y = TOP_MARGIN + m * ROW_HEIGHT
        out.append(f'<text x="4" y="{y + BAR_HEIGHT - 4}" font-size="12">M{m}</text>')
    for a in sorted(sched.assignments, key=lambda a: (a.machine, a.start, a.job, a.op)):
        x = LEFT_MARGIN + a.start * scale
        w = (a.end - a.start) * scale
        y = TOP_MARGIN + a.machine * ROW_HEIGHT
        out.append(
            f'<rect x="{x:.3f}" y="{y}" width="{w:.3f}" height="{BAR_HEIGHT}" fill="{job_color(a.job)}" '
            f'stroke="black" stroke-width="0.5" data-job="{a.job}" data-op="{a.op}" '
            f'data-machine="{a.machine}" data-start="{a.start}" data-end="{a.end}">'
            f"<title>{a.job}.{a.op} [{a.start},{a.end})</title></rect>")
    axis_y = TOP_MARGIN + machine_count * ROW_HEIGHT + 12
    out.append(f'<text x="{LEFT_MARGIN}" y="{axis_y}" font-size="10">0</text>')
    out.append(f'<text x="{LEFT_MARGIN + width}" y="{axis_y}" font-size="10" '
               f'text-anchor="end">{sched.makespan}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
