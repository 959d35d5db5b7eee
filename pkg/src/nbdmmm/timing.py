"""Execution time, nearest-datacenter distance and network latency.

All times are milliseconds. Task length is in million instructions and CPU
rates in MIPS, so ``length / rate`` is seconds and gets scaled by 1000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .model import CloudUser, DataCenter, GeoPoint, Resource, Task


class TimingError(ValueError):
    pass


@dataclass(frozen=True)
class TimingBreakdown:
    task_id: str
    distance: float
    network_latency_ms: float
    execution_ms: float
    total_ms: float
    chosen_datacenter_id: Optional[str] = None


def effective_mips(task: Task, resource: Resource) -> float:
    # a task never runs faster than the machine it lands on
    return min(task.cpu_demand_mips, resource.cpu_mips)


def execution_time_ms(task: Task, resource: Resource) -> float:
    return task.length_mi / effective_mips(task, resource) * 1000.0


def distance(a: GeoPoint, b: GeoPoint) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def nearest_distance(user: CloudUser, datacenters: Sequence[DataCenter]) -> Tuple[float, str]:
    """Distance to the closest datacenter and its id (ties go to the smallest id)."""
    if not datacenters:
        raise TimingError("no datacenters")
    best = min(datacenters, key=lambda dc: (distance(user.location, dc.location), dc.id))
    return distance(user.location, best.location), best.id


def network_latency_ms(d: float, bandwidth: float) -> float:
    return d / bandwidth


def breakdown(task_id: str, latency_ms: float, execution_ms: float,
              dist: float = 0.0, datacenter_id: Optional[str] = None) -> TimingBreakdown:
    return TimingBreakdown(task_id, dist, latency_ms, execution_ms, latency_ms + execution_ms, datacenter_id)


def total_time_ms(task: Task, resource: Resource, user: CloudUser,
                  datacenters: Sequence[DataCenter]) -> TimingBreakdown:
    """Latency to the user's nearest datacenter plus execution time; no switch-time term."""
    d, dc_id = nearest_distance(user, datacenters)
    return breakdown(task.id, network_latency_ms(d, resource.bandwidth),
                     execution_time_ms(task, resource), d, dc_id)


class TimingContext:
    """Geography for latency: users, datacenters, and a cached nearest distance per user.

    Tasks whose ``user_id`` is unknown (or ``None``) are treated as co-located
    with their datacenter, i.e. zero latency.
    """

    def __init__(self, users: Sequence[CloudUser] = (), datacenters: Sequence[DataCenter] = ()):
        self.users: Dict[str, CloudUser] = {u.id: u for u in users}
        self.datacenters = tuple(datacenters)
        self._nearest: Dict[str, Tuple[float, Optional[str]]] = {}

    def user_distance(self, user_id: Optional[str]) -> Tuple[float, Optional[str]]:
        if user_id is None or user_id not in self.users or not self.datacenters:
            return 0.0, None
        hit = self._nearest.get(user_id)
        if hit is None:
            hit = self._nearest[user_id] = nearest_distance(self.users[user_id], self.datacenters)
        return hit

    def latency_ms(self, task: Task, resource: Resource) -> float:
        return network_latency_ms(self.user_distance(task.user_id)[0], resource.bandwidth)

    def breakdown(self, task: Task, resource: Resource) -> TimingBreakdown:
        d, dc_id = self.user_distance(task.user_id)
        return breakdown(task.id, network_latency_ms(d, resource.bandwidth),
                         execution_time_ms(task, resource), d, dc_id)

    def matrices(self, tasks: Sequence[Task], resources: Sequence[Resource]):
        """``(latency, execution)`` arrays of shape ``(len(tasks), len(resources))``."""
        dist = np.array([self.user_distance(t.user_id)[0] for t in tasks], dtype=float)
        bw = np.array([r.bandwidth for r in resources], dtype=float)
        return np.divide.outer(dist, bw), execution_matrix(tasks, resources)


class FixedTiming:
    """Pinned ``(latency_ms, execution_ms)`` per task, independent of the resource.

    Used to replay published timing tables where the numbers come from an
    external simulator rather than from task lengths.
    """

    def __init__(self, times: Mapping[str, Tuple[float, float]]):
        self.times = dict(times)

    def user_distance(self, user_id):
        return 0.0, None

    def latency_ms(self, task: Task, resource: Resource) -> float:
        return self.times[task.id][0]

    def breakdown(self, task: Task, resource: Resource) -> TimingBreakdown:
        n, e = self.times[task.id]
        return breakdown(task.id, n, e)

    def matrices(self, tasks: Sequence[Task], resources: Sequence[Resource]):
        shape = (len(tasks), len(resources))
        n = np.array([self.times[t.id][0] for t in tasks], dtype=float)
        e = np.array([self.times[t.id][1] for t in tasks], dtype=float)
        return np.broadcast_to(n[:, None], shape).copy(), np.broadcast_to(e[:, None], shape).copy()


def execution_matrix(tasks: Sequence[Task], resources: Sequence[Resource]) -> np.ndarray:
    length = np.array([t.length_mi for t in tasks], dtype=float)
    demand = np.array([t.cpu_demand_mips for t in tasks], dtype=float)
    mips = np.array([r.cpu_mips for r in resources], dtype=float)
    return length[:, None] / np.minimum(demand[:, None], mips[None, :]) * 1000.0


def time_matrices(timing, tasks: Sequence[Task], resources: Sequence[Resource]):
    """Latency and execution matrices; a ``None`` context means zero latency."""
    if timing is None:
        exe = execution_matrix(tasks, resources)
        return np.zeros_like(exe), exe
    return timing.matrices(tasks, resources)
