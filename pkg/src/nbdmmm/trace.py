"""Job-event trace rows: parsing, usage summaries and workload conversion.

Rows have five columns: task label, timestamp, job id, event type and
scheduling class, comma- or whitespace-delimited. Numeric fields may use
scientific notation (``2.45E+12``) as long as they denote integers.
"""

from __future__ import annotations

import enum
import io
import random
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from .model import Task

HEADER_WORDS = {"tasks", "task", "task_label", "label"}
DEFAULT_BUCKET = 3_600_000  # one hour when trace units are milliseconds


class EventType(enum.IntEnum):
    SUBMIT = 0
    SCHEDULE = 1
    EVICT = 2
    FAIL = 3
    FINISH = 4
    KILL = 5


@dataclass(frozen=True)
class TraceRow:
    task_label: str
    timestamp: int
    job_id: int
    event_type: EventType
    scheduling_class: int


@dataclass(frozen=True)
class RowError:
    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}"


@dataclass
class ParseResult:
    rows: List[TraceRow] = field(default_factory=list)
    errors: List[RowError] = field(default_factory=list)


class TraceError(ValueError):
    pass


def _integer(text: str, name: str) -> int:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"{name} {text!r} is not a number") from None
    if not d.is_finite() or d != d.to_integral_value():
        raise ValueError(f"{name} {text!r} is not an integer")
    return int(d)


def _split(line: str, fmt: str) -> List[str]:
    if fmt == "csv" or (fmt == "auto" and "," in line):
        return [p.strip() for p in line.split(",")]
    return line.split()


def parse_line(line: str, fmt: str = "auto") -> TraceRow:
    parts = _split(line, fmt)
    if len(parts) != 5:
        raise ValueError(f"expected 5 fields, got {len(parts)}")
    label, ts, job, ev, sc = parts
    ev_code = _integer(ev, "event_type")
    if ev_code not in EventType._value2member_map_:
        raise ValueError(f"unknown event_type {ev_code}")
    sched = _integer(sc, "scheduling_class")
    if not 0 <= sched <= 3:
        raise ValueError(f"scheduling_class {sched} outside 0..3")
    return TraceRow(label, _integer(ts, "timestamp"), _integer(job, "job_id"), EventType(ev_code), sched)


def parse_rows(stream: TextIO, fmt: str = "auto") -> ParseResult:
    """Parse every line of ``stream``; bad rows are collected, not raised.

    Blank lines, ``#`` comments and a leading header row are skipped. Line
    numbers in errors are 1-based.
    """
    if fmt not in ("auto", "csv", "whitespace"):
        raise TraceError(f"unknown format {fmt!r}")
    try:
        lines = stream.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise TraceError(f"unreadable trace: {exc}") from exc
    result = ParseResult()
    seen_data = False
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if not seen_data and _split(text, fmt)[0].lower() in HEADER_WORDS:
            continue
        seen_data = True
        try:
            result.rows.append(parse_line(text, fmt))
        except ValueError as exc:
            result.errors.append(RowError(lineno, str(exc)))
    return result


def parse_text(text: str, fmt: str = "auto") -> ParseResult:
    return parse_rows(io.StringIO(text), fmt)


def serialize(rows: Iterable[TraceRow], header: bool = True) -> str:
    out = ["task,timestamp,job_id,event_type,scheduling_class"] if header else []
    for r in rows:
        out.append(f"{r.task_label},{r.timestamp},{r.job_id},{int(r.event_type)},{r.scheduling_class}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class UsageSummary:
    demand_by_bucket: Dict[int, int]
    peak_bucket: Optional[int]
    trough_bucket: Optional[int]
    completion_ratio: Optional[float]  # None when nothing was submitted
    submitted: int = 0
    finished: int = 0


def summarize(rows: Sequence[TraceRow], bucket: int = DEFAULT_BUCKET) -> UsageSummary:
    """Submissions per time bucket, peak and trough buckets, finished/submitted.

    Buckets are ``timestamp // bucket`` and cover every bucket between the
    earliest and latest row of any event type, so quiet stretches count as 0.
    """
    if bucket <= 0:
        raise TraceError("bucket must be > 0")
    if not rows:
        return UsageSummary({}, None, None, None)
    buckets = [r.timestamp // bucket for r in rows]
    demand = {b: 0 for b in range(min(buckets), max(buckets) + 1)}
    submitted = finished = 0
    for r, b in zip(rows, buckets):
        if r.event_type == EventType.SUBMIT:
            demand[b] += 1
            submitted += 1
        elif r.event_type == EventType.FINISH:
            finished += 1
    peak = min(demand, key=lambda b: (-demand[b], b))
    trough = min(demand, key=lambda b: (demand[b], b))
    ratio = finished / submitted if submitted else None
    return UsageSummary(demand, peak, trough, ratio, submitted, finished)


def summary_csv(summary: UsageSummary) -> str:
    lines = ["bucket,count"] + [f"{b},{c}" for b, c in sorted(summary.demand_by_bucket.items())]
    return "\n".join(lines) + "\n"


def report_csv(summary: UsageSummary) -> str:
    ratio = "" if summary.completion_ratio is None else repr(summary.completion_ratio)
    fields = [("peak_bucket", summary.peak_bucket), ("trough_bucket", summary.trough_bucket),
              ("submitted", summary.submitted), ("finished", summary.finished),
              ("completion_ratio", ratio)]
    return "key,value\n" + "".join(f"{k},{'' if v is None else v}\n" for k, v in fields)


@dataclass(frozen=True)
class MappingSpec:
    """Fills in what job-event rows lack: task sizes, owners and the time scale."""

    min_mi: float = 200.0
    max_mi: float = 2000.0
    min_demand_mips: float = 2000.0
    max_demand_mips: float = 3000.0
    time_scale: float = 1.0  # trace units -> milliseconds
    user_ids: Tuple[str, ...] = ()
    seed: int = 0


def to_workload(rows: Sequence[TraceRow], spec: MappingSpec = MappingSpec()) -> List[Task]:
    """One task per submit row, arrivals rebased to the first submission."""
    submits = [r for r in rows if r.event_type == EventType.SUBMIT]
    if not submits:
        return []
    origin = min(r.timestamp for r in submits)
    rng = random.Random(spec.seed)
    tasks = []
    for k, r in enumerate(submits):
        length = spec.min_mi + (spec.max_mi - spec.min_mi) * rng.random()
        demand = spec.min_demand_mips + (spec.max_demand_mips - spec.min_demand_mips) * rng.random()
        pick = rng.random()
        user = spec.user_ids[int(pick * len(spec.user_ids))] if spec.user_ids else None
        tasks.append(Task(f"t{k:06d}", length, demand, (r.timestamp - origin) * spec.time_scale,
                          user, r.scheduling_class))
    return tasks
