"""Known lower/upper bounds per instance and gap-reduction bookkeeping.

Registry CSV header: ``instance,lb,ub,lb_source,ub_source,optimal``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

HEADER = ["instance", "lb", "ub", "lb_source", "ub_source", "optimal"]


class InvariantViolation(ValueError):
    pass


class GapNotClosed(ValueError):
    """New bounds are looser than the old ones."""


class ZeroGap(ZeroDivisionError):
    """The old bounds already coincide; there is no gap to reduce."""


@dataclass(frozen=True)
class BoundsRecord:
    instance: str
    lb: int
    ub: int
    lb_source: str = ""
    ub_source: str = ""
    optimal: bool | None = None

    def __post_init__(self):
        if self.lb > self.ub:
            raise InvariantViolation(f"{self.instance}: lb {self.lb} > ub {self.ub}")
        if self.optimal is None:
            object.__setattr__(self, "optimal", self.lb == self.ub)
        elif self.optimal != (self.lb == self.ub):
            raise InvariantViolation(
                f"{self.instance}: optimal={self.optimal} but lb={self.lb}, ub={self.ub}")

    @property
    def gap(self) -> int:
        return self.ub - self.lb


@dataclass(frozen=True)
class GapReduction:
    instance: str
    old_lb: int
    old_ub: int
    new_lb: int
    new_ub: int
    percent: Fraction  # fraction of the old gap closed, in [0, 1]

    @property
    def label(self) -> str:
        return format_percent(self.percent)


def gap_reduction(old: BoundsRecord, new: BoundsRecord) -> GapReduction:
    if old.lb == old.ub:
        raise ZeroGap(f"{old.instance}: old bounds already equal ({old.lb})")
    if new.lb < old.lb or new.ub > old.ub:
        raise GapNotClosed(
            f"{old.instance}: ({old.lb},{old.ub}) -> ({new.lb},{new.ub}) loosens a bound")
    closed = (new.lb - old.lb) + (old.ub - new.ub)
    return GapReduction(old.instance, old.lb, old.ub, new.lb, new.ub, Fraction(closed, old.ub - old.lb))


def format_percent(fraction: Fraction) -> str:
    """Nearest integer percent (half up); one decimal below 1%."""
    pct = Fraction(fraction) * 100
    if 0 < pct < 1:
        tenths = math.floor(pct * 10 + Fraction(1, 2))
        return f"{tenths // 10}.{tenths % 10}%"
    return f"{math.floor(pct + Fraction(1, 2))}%"


def _parse_bool(value: str, where: str) -> bool | None:
    v = value.strip().lower()
    if v in ("true", "1", "yes", "*"):
        return True
    if v in ("false", "0", "no"):
        return False
    if v == "":
        return None
    raise InvariantViolation(f"{where}: optimal must be true/false, got {value!r}")


def parse_registry(text: str) -> list[BoundsRecord]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [h.strip() for h in rows[0]] != HEADER:
        raise InvariantViolation(f"registry header must be {','.join(HEADER)}")
    records, seen = [], set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not any(cell.strip() for cell in row):
            continue
        where = f"row {lineno}"
        if len(row) != len(HEADER):
            raise InvariantViolation(f"{where}: expected {len(HEADER)} fields, got {len(row)}")
        name, lb, ub, lb_src, ub_src, opt = (cell.strip() for cell in row)
        try:
            lb_i, ub_i = int(lb), int(ub)
        except ValueError:
            raise InvariantViolation(f"{where}: lb/ub must be integers") from None
        key = name.lower()
        if key in seen:
            raise InvariantViolation(f"{where}: duplicate instance {name}")
        seen.add(key)
        try:
            records.append(BoundsRecord(name, lb_i, ub_i, lb_src, ub_src, _parse_bool(opt, where)))
        except InvariantViolation as exc:
            raise InvariantViolation(f"{where}: {exc}") from None
    return records


def registry_load(path) -> list[BoundsRecord]:
    return parse_registry(Path(path).read_text(encoding="utf-8"))


def registry_dumps(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in records:
        writer.writerow([r.instance, r.lb, r.ub, r.lb_source, r.ub_source, "true" if r.optimal else "false"])
    return buf.getvalue()


def lookup(records, name: str) -> BoundsRecord | None:
    key = name.lower()
    return next((r for r in records if r.instance.lower() == key), None)


def registry_report(records) -> str:
    width = max([len("instance")] + [len(r.instance) for r in records])
    lines = [f"{'instance':<{width}}  {'lb':>6}  {'ub':>6}  status"]
    for r in records:
        lines.append(f"{r.instance:<{width}}  {r.lb:>6}  {r.ub:>6}  {'optimal' if r.optimal else 'open'}")
    closed = sum(r.optimal for r in records)
    lines.append(f"{len(records)} instances, {closed} closed, {len(records) - closed} open")
    return "\n".join(lines) + "\n"


def diff_registries(old_records, new_records) -> list[GapReduction]:
    """Gap reductions for every instance whose bounds changed between registries."""
    out = []
    old_by_name = {r.instance.lower(): r for r in old_records}
    for new in new_records:
        old = old_by_name.get(new.instance.lower())
        if old is None or (old.lb, old.ub) == (new.lb, new.ub):
            continue
        out.append(gap_reduction(old, new))
    return out


def diff_report(reductions) -> str:
    if not reductions:
        return ""
    width = max(len(g.instance) for g in reductions)
    lines = []
    for g in reductions:
        lines.append(f"{g.instance:<{width}}  ({g.old_lb},{g.old_ub}) -> ({g.new_lb},{g.new_ub})  {g.label}")
    return "\n".join(lines) + "\n"


def is_certified_optimal(records, name: str, makespan: int) -> bool:
    """True when a verified makespan meets the registry lower bound."""
    rec = lookup(records, name)
    return rec is not None and makespan == rec.lb
