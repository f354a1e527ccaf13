"""Problem data model and readers for the standard JSSP / FJSSP text formats.

FJSSP files (Brandimarte, Hurink, Dauzere, ...)::

    n m [avg_flex]
    n_i  k (machine duration){k}  k (machine duration){k} ...

with 1-based machines. JSSP files (Taillard, Demirkol, ...)::

    n m
    machine duration machine duration ...     (m pairs, 0-based machines)
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


class InstanceFormatError(ValueError):
    """Base class for parse failures; ``line`` is 1-based, None when unknown."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedHeader(InstanceFormatError):
    pass


class TruncatedJobLine(InstanceFormatError):
    pass


class MachineIndexOutOfRange(InstanceFormatError):
    pass


class NonPositiveDuration(InstanceFormatError):
    pass


class WrongPairCount(InstanceFormatError):
    pass


class InvalidInstance(ValueError):
    pass


@dataclass(frozen=True)
class OperationSpec:
    job_index: int
    op_index: int
    alternatives: tuple[tuple[int, int], ...]  # (machine, duration)

    def __post_init__(self):
        where = f"operation ({self.job_index},{self.op_index})"
        if not self.alternatives:
            raise InvalidInstance(f"{where} has no machine")
        seen = set()
        for m, d in self.alternatives:
            if d < 1:
                raise InvalidInstance(f"{where} has duration {d}")
            if m in seen:
                raise InvalidInstance(f"{where} lists machine {m} twice")
            seen.add(m)

    @property
    def min_duration(self) -> int:
        return min(d for _, d in self.alternatives)

    @property
    def max_duration(self) -> int:
        return max(d for _, d in self.alternatives)

    @property
    def machines(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.alternatives)

    def duration_on(self, machine: int) -> int | None:
        for m, d in self.alternatives:
            if m == machine:
                return d
        return None


@dataclass(frozen=True)
class Instance:
    name: str
    job_count: int
    machine_count: int
    jobs: tuple[tuple[OperationSpec, ...], ...]

    def __post_init__(self):
        if self.job_count != len(self.jobs):
            raise InvalidInstance(f"job_count {self.job_count} != {len(self.jobs)} jobs")
        if self.machine_count < 1:
            raise InvalidInstance("machine_count must be positive")
        for i, job in enumerate(self.jobs):
            for j, op in enumerate(job):
                if op.job_index != i or op.op_index != j:
                    raise InvalidInstance(f"operation ({op.job_index},{op.op_index}) stored at ({i},{j})")
                for m, _ in op.alternatives:
                    if not 0 <= m < self.machine_count:
                        raise InvalidInstance(f"operation ({i},{j}) uses machine {m} outside [0, {self.machine_count})")

    def is_jssp(self) -> bool:
        return all(len(op.alternatives) == 1 for job in self.jobs for op in job)

    def operations(self) -> Iterator[OperationSpec]:
        for job in self.jobs:
            yield from job

    def op(self, job: int, op: int) -> OperationSpec:
        return self.jobs[job][op]

    @property
    def operation_count(self) -> int:
        return sum(len(job) for job in self.jobs)


def make_instance(name: str, machine_count: int, jobs) -> Instance:
    """Build an Instance from nested lists ``jobs[i][j] = [(machine, duration), ...]``."""
    built = tuple(
        tuple(OperationSpec(i, j, tuple((int(m), int(d)) for m, d in alts)) for j, alts in enumerate(job))
        for i, job in enumerate(jobs)
    )
    return Instance(name, len(built), machine_count, built)


def horizon(inst: Instance) -> int:
    """Sum over operations of the longest alternative; no active schedule exceeds it."""
    return sum(op.max_duration for op in inst.operations())


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if tokens:
            out.append((lineno, tokens))
    return out


def _ints(tokens: list[str], lineno: int, what: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InstanceFormatError(f"non-integer token in {what}", lineno) from None


def _header(lines) -> tuple[int, int, int]:
    if not lines:
        raise MalformedHeader("empty input", 1)
    lineno, tokens = lines[0]
    if len(tokens) < 2 or len(tokens) > 3:
        raise MalformedHeader(f"expected 'n m [avg_flex]', got {' '.join(tokens)!r}", lineno)
    try:
        n, m = int(tokens[0]), int(tokens[1])
        if len(tokens) == 3:
            float(tokens[2])
    except ValueError:
        raise MalformedHeader(f"bad header {' '.join(tokens)!r}", lineno) from None
    if n < 1 or m < 1:
        raise MalformedHeader(f"job and machine counts must be positive, got {n} {m}", lineno)
    return n, m, lineno


def parse_fjssp(text: str, name: str = "") -> Instance:
    lines = _lines(text)
    n, m, header_line = _header(lines)
    body = lines[1:]
    if len(body) < n:
        last = body[-1][0] + 1 if body else header_line + 1
        raise TruncatedJobLine(f"expected {n} job lines, found {len(body)}", last)
    if len(body) > n:
        raise InstanceFormatError(f"unexpected content after {n} job lines", body[n][0])
    jobs = []
    for i, (lineno, tokens) in enumerate(body):
        vals = _ints(tokens, lineno, "job line")
        pos = 0

        def take(count=1):
            nonlocal pos
            if pos + count > len(vals):
                raise TruncatedJobLine(f"job {i} ends early", lineno)
            chunk = vals[pos:pos + count]
            pos += count
            return chunk

        (n_ops,) = take()
        if n_ops < 1:
            raise TruncatedJobLine(f"job {i} declares {n_ops} operations", lineno)
        ops = []
        for j in range(n_ops):
            (k,) = take()
            if k < 1:
                raise TruncatedJobLine(f"operation {j} of job {i} has {k} alternatives", lineno)
            alts = []
            for _ in range(k):
                machine, duration = take(2)
                if not 1 <= machine <= m:
                    raise MachineIndexOutOfRange(f"machine {machine} not in 1..{m}", lineno)
                if duration < 1:
                    raise NonPositiveDuration(f"duration {duration} for job {i} op {j}", lineno)
                if any(a == machine - 1 for a, _ in alts):
                    raise InstanceFormatError(f"machine {machine} repeated in job {i} op {j}", lineno)
                alts.append((machine - 1, duration))
            ops.append(OperationSpec(i, j, tuple(alts)))
        if pos != len(vals):
            raise InstanceFormatError(f"{len(vals) - pos} trailing tokens on job {i}", lineno)
        jobs.append(tuple(ops))
    return Instance(name, n, m, tuple(jobs))


def parse_jssp(text: str, name: str = "") -> Instance:
    lines = _lines(text)
    n, m, header_line = _header(lines)
    body = lines[1:]
    if len(body) < n:
        last = body[-1][0] + 1 if body else header_line + 1
        raise TruncatedJobLine(f"expected {n} job lines, found {len(body)}", last)
    if len(body) > n:
        raise InstanceFormatError(f"unexpected content after {n} job lines", body[n][0])
    jobs = []
    for i, (lineno, tokens) in enumerate(body):
        vals = _ints(tokens, lineno, "job line")
        if len(vals) % 2:
            raise TruncatedJobLine(f"odd token count {len(vals)}", lineno)
        if len(vals) != 2 * m:
            raise WrongPairCount(f"job {i} has {len(vals) // 2} pairs, expected {m}", lineno)
        ops = []
        for j in range(m):
            machine, duration = vals[2 * j], vals[2 * j + 1]
            if not 0 <= machine < m:
                raise MachineIndexOutOfRange(f"machine {machine} not in 0..{m - 1}", lineno)
            if duration < 1:
                raise NonPositiveDuration(f"duration {duration} for job {i} op {j}", lineno)
            ops.append(OperationSpec(i, j, ((machine, duration),)))
        jobs.append(tuple(ops))
    return Instance(name, n, m, tuple(jobs))


def parse_auto(text: str, name: str = "") -> Instance:
    """Guess the format. FJSSP wins when both readers accept the text."""
    try:
        return parse_fjssp(text, name)
    except InstanceFormatError as fj_err:
        try:
            return parse_jssp(text, name)
        except InstanceFormatError:
            raise fj_err from None


def serialize(inst: Instance) -> str:
    """Canonical FJSSP text (1-based machines) for either problem class."""
    lines = [f"{inst.job_count} {inst.machine_count}"]
    for job in inst.jobs:
        parts = [str(len(job))]
        for op in job:
            parts.append(str(len(op.alternatives)))
            for m, d in op.alternatives:
                parts.append(f"{m + 1} {d}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


PARSERS = {"fjssp": parse_fjssp, "jssp": parse_jssp, "auto": parse_auto}


def load_instance(path, fmt: str = "auto") -> Instance:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return PARSERS[fmt](text, name=path.stem)


def find_instance(name: str, roots=None, dataset: str | None = None) -> Path | None:
    """Locate ``<root>/<dataset>/<name>.txt``.

    Roots default to the repository fixtures plus ``$SHOPBOUND_INSTANCES``
    (a colon-separated list, e.g. a checkout of the public instance repository).
    ``dataset`` is matched as a substring of the parent path so that e.g.
    ``vdata`` disambiguates Hurink's car5 variants.
    """
    if roots is None:
        roots = default_instance_roots()
    target = name.lower()
    for root in roots:
        root = Path(root)
        if not root.is_dir():
            continue
        for path in sorted(root.rglob("*.txt")):
            if path.stem.lower() != target:
                continue
            if dataset and dataset.lower() not in str(path.parent).lower():
                continue
            return path
    return None


def default_instance_roots() -> list[Path]:
    roots = [Path(p) for p in os.environ.get("SHOPBOUND_INSTANCES", "").split(os.pathsep) if p]
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "fixtures" / "instances"
        if candidate.is_dir():
            roots.append(candidate)
            break
    return roots
