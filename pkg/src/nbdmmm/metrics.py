"""Run metrics: task success ratio, resource utilization, regression statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .simulator import SimEvent, SimulationRun


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class RunMetrics:
    success_ratio: float
    utilization: float
    tasks_submitted: int
    hosts: int


@dataclass(frozen=True)
class RegressionStats:
    adjusted_r_square: float
    covariance: float
    standard_error: float
    n: int
    slope: float = 0.0
    intercept: float = 0.0
    r_square: float = 0.0


def success_ratio(run: SimulationRun) -> float:
    """Completed tasks over arrived tasks."""
    arrived = run.count(SimEvent.ARRIVAL)
    if arrived == 0:
        raise MetricsError("empty run")
    return run.count(SimEvent.COMPLETED) / arrived


def makespan(run: SimulationRun) -> float:
    return max((e.time_ms for e in run.events), default=0.0)


def executed_mi_by_host(run: SimulationRun, window_ms: float, start_ms: float = 0.0) -> dict:
    """Million instructions each host executed inside ``[start_ms, start_ms + window_ms)``.

    A task executes at a constant rate over the last ``execution_ms`` of its
    placement; partial overlap with the window is pro-rated.
    """
    lo, hi = start_ms, start_ms + window_ms
    out = {h.id: 0.0 for h in run.hosts}
    for p in run.placements:
        begin = p.start_ms + p.latency_ms
        end = begin + p.execution_ms
        if begin >= lo and end <= hi:
            mi = p.length_mi
        else:
            overlap = min(end, hi) - max(begin, lo)
            if overlap <= 0:
                continue
            mi = p.rate_mips * overlap / 1000.0
        out[p.host_id] += mi
    return out


def utilization(run: SimulationRun, window_ms: Optional[float] = None, start_ms: float = 0.0) -> float:
    """Executed work over available capacity in the window (dimensionless).

    Capacity is ``sum(host MIPS) * window_ms / 1000``. The window defaults to
    the whole run, ``[0, makespan)``.
    """
    if not run.hosts:
        raise MetricsError("no hosts")
    if window_ms is None:
        window_ms = makespan(run) - start_ms
    if not window_ms > 0:
        if window_ms == 0 and not run.placements:
            return 0.0
        raise MetricsError("window_ms must be > 0")
    mi = sum(executed_mi_by_host(run, window_ms, start_ms).values())
    capacity = sum(h.cpu_capacity_mips for h in run.hosts) * window_ms / 1000.0
    return mi / capacity


def raw_utilization(run: SimulationRun) -> float:
    """The unnormalized quotient: total MI executed over total host MIPS (seconds)."""
    if not run.hosts:
        raise MetricsError("no hosts")
    return sum(p.length_mi for p in run.placements) / sum(h.cpu_capacity_mips for h in run.hosts)


def run_metrics(run: SimulationRun) -> RunMetrics:
    return RunMetrics(success_ratio(run), utilization(run), run.count(SimEvent.ARRIVAL), len(run.hosts))


def regression(xs: Sequence[float], ys: Sequence[float]) -> RegressionStats:
    """Simple least-squares fit of ``ys`` on ``xs``.

    Adjusted R² uses one predictor. ``covariance`` is the sample covariance
    (``n - 1`` denominator) and ``standard_error`` the standard error of the
    estimate, ``sqrt(SSE / (n - 2))``. Constant ``ys`` report R² = 0.
    """
    n = len(xs)
    if n != len(ys):
        raise MetricsError("xs and ys differ in length")
    if n < 3:
        raise MetricsError("regression needs n >= 3 points")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise MetricsError("no variance in predictor")
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = math.fsum((y - my) ** 2 for y in ys)
    slope = sxy / sxx
    intercept = my - slope * mx
    sse = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    r2 = 0.0 if syy == 0 else 1.0 - sse / syy
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - 2)
    return RegressionStats(adj, sxy / (n - 1), math.sqrt(sse / (n - 2)), n, slope, intercept, r2)
