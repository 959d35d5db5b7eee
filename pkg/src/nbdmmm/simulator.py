"""Deterministic discrete-event engine.

Tasks arrive, wait in a queue, and are planned onto free resources by the
configured scheduler once per distinct event time (after all completions and
arrivals at that instant are applied). A resource is busy from its
assignment until ``assignment + total_ms``; the task's instructions execute
during the trailing ``execution_ms`` of that interval.

Randomness comes from :class:`random.Random` (Mersenne Twister, seeded with
the scenario's integer seed) and is only consumed through ``random()``, whose
output is specified bit-for-bit across Python versions.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (CloudUser, DataCenter, GeoPoint, Host, Resource, Task, UserClass,
                    validate_all)
from .schedulers import SchedulerKind, plan
from .timing import TimingContext, effective_mips
from .valuation import DecisionMatrix, ValueHook, apply_hook, static_valuation, value_for


class ConfigError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid scenario: " + "; ".join(self.violations))


@dataclass(frozen=True)
class FleetSpec:
    hosts: int = 20
    host_mips: Tuple[float, ...] = (2000.0, 2500.0, 3000.0)
    host_memory_mb: float = 4096.0
    host_storage_gb: float = 100.0
    resources_per_host: int = 1
    vm_memory_mb: float = 64.0
    vm_storage_mb: float = 256.0
    vm_bandwidth: Tuple[float, ...] = (5.0, 10.0, 20.0)


@dataclass(frozen=True)
class WorkloadSpec:
    task_count: int = 100
    arrival_interval_ms: float = 10.0
    # 200-2000 MI spans 100-1000 ms on a 2000 MIPS core
    min_mi: float = 200.0
    max_mi: float = 2000.0
    min_demand_mips: float = 2000.0
    max_demand_mips: float = 3000.0


@dataclass(frozen=True)
class ValuationSpec:
    """How resource values are produced.

    ``mode="matrix"`` scores each resource with ``matrix`` against the user
    class it is offered to (``classes``, cycled over resources in id order).
    ``mode="static"`` pins ``values`` (cycled the same way).
    """

    mode: str = "matrix"
    matrix: DecisionMatrix = field(default_factory=DecisionMatrix)
    classes: Tuple[UserClass, ...] = tuple(UserClass)
    values: Tuple[float, ...] = ()


DEFAULT_DATACENTERS = (("dc1", GeoPoint(0.0, 0.0)), ("dc2", GeoPoint(400.0, 300.0)),
                       ("dc3", GeoPoint(800.0, 0.0)))

DEFAULT_USERS = (
    CloudUser("u1", GeoPoint(100.0, 50.0), UserClass.HIGH_END),
    CloudUser("u2", GeoPoint(520.0, 380.0), UserClass.PRIVILEGED),
    CloudUser("u3", GeoPoint(900.0, 200.0), UserClass.CASUAL),
    CloudUser("u4", GeoPoint(250.0, 600.0), UserClass.NAIVE),
    CloudUser("u5", GeoPoint(-300.0, -100.0), UserClass.UNDERPRIVILEGED),
)


@dataclass(frozen=True)
class ScenarioConfig:
    fleet: FleetSpec = field(default_factory=FleetSpec)
    datacenters: Tuple[Tuple[str, GeoPoint], ...] = DEFAULT_DATACENTERS
    users: Tuple[CloudUser, ...] = DEFAULT_USERS
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    valuation: ValuationSpec = field(default_factory=ValuationSpec)
    scheduler: SchedulerKind = SchedulerKind.NBDMMM
    seed: int = 0
    replenish: bool = False
    max_wait_ms: Optional[float] = None  # queued longer than this -> Rejected
    horizon_ms: Optional[float] = None  # events after this are not processed
    tasks: Optional[Tuple[Task, ...]] = None  # explicit workload, overrides synthetic

    def violations(self) -> list:
        out = []
        f = self.fleet
        if f.hosts < 1:
            out.append("fleet.hosts >= 1")
        if f.resources_per_host < 1:
            out.append("fleet.resources_per_host >= 1")
        if not f.host_mips or any(not m > 0 for m in f.host_mips):
            out.append("fleet.host_mips > 0")
        if not f.vm_bandwidth or any(not b > 0 for b in f.vm_bandwidth):
            out.append("fleet.vm_bandwidth > 0")
        w = self.workload
        if self.tasks is None:
            if w.task_count < 0:
                out.append("workload.task_count >= 0")
            if w.arrival_interval_ms < 0:
                out.append("workload.arrival_interval_ms >= 0")
            if not 0 < w.min_mi <= w.max_mi:
                out.append("0 < workload.min_mi <= workload.max_mi")
            if not 0 < w.min_demand_mips <= w.max_demand_mips:
                out.append("0 < workload.min_demand_mips <= workload.max_demand_mips")
        if not self.datacenters:
            out.append("at least one datacenter")
        ids = [d for d, _ in self.datacenters]
        if len(set(ids)) != len(ids):
            out.append("duplicate datacenter id")
        if not self.users:
            out.append("at least one user")
        v = self.valuation
        if v.mode not in ("matrix", "static"):
            out.append("valuation.mode in {matrix, static}")
        elif v.mode == "static" and not v.values:
            out.append("valuation.values required in static mode")
        elif v.mode == "matrix":
            out.extend(v.matrix.violations())
            if not v.classes:
                out.append("valuation.classes nonempty")
        if self.max_wait_ms is not None and self.max_wait_ms < 0:
            out.append("max_wait_ms >= 0")
        if not 0 <= self.seed < 2 ** 64:
            out.append("seed is a 64-bit unsigned integer")
        return out


class SimEvent:
    ARRIVAL = "Arrival"
    ASSIGNED = "Assigned"
    COMPLETED = "Completed"
    REJECTED = "Rejected"


KIND_PRIORITY = {SimEvent.COMPLETED: 0, SimEvent.ARRIVAL: 1, SimEvent.ASSIGNED: 2, SimEvent.REJECTED: 3}


@dataclass(frozen=True)
class Event:
    time_ms: float
    kind: str
    task_id: str
    resource_id: Optional[str] = None

    def sort_key(self):
        return (self.time_ms, KIND_PRIORITY[self.kind], self.task_id)


@dataclass(frozen=True)
class Placement:
    """One executed assignment with its timing, as the metrics need it."""

    task_id: str
    resource_id: str
    host_id: str
    start_ms: float
    latency_ms: float
    execution_ms: float
    end_ms: float
    length_mi: float
    rate_mips: float
    resource_value: float


@dataclass
class SimulationRun:
    config: ScenarioConfig
    tasks: List[Task]
    hosts: List[Host]
    resources: List[Resource]
    events: List[Event]
    placements: List[Placement]
    queued: List[str]  # still waiting when the run stopped

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)


def uniform(rng: random.Random, lo: float, hi: float) -> float:
    return lo + (hi - lo) * rng.random()


def generate_workload(spec: WorkloadSpec, seed: int, users: Sequence[CloudUser] = ()) -> List[Task]:
    """Synthetic tasks at ``k * arrival_interval_ms``; lengths and demands uniform.

    Per task the generator draws, in order: length, demand, user index.
    """
    rng = random.Random(seed)
    user_ids = [u.id for u in users]
    tasks = []
    for k in range(spec.task_count):
        length = uniform(rng, spec.min_mi, spec.max_mi)
        demand = uniform(rng, spec.min_demand_mips, spec.max_demand_mips)
        pick = rng.random()
        user = user_ids[int(pick * len(user_ids))] if user_ids else None
        tasks.append(Task(f"t{k:06d}", length, demand, k * spec.arrival_interval_ms, user))
    return tasks


def _vm(fleet: FleetSpec, k: int, host: Host, dc_id: str) -> Resource:
    # VMs on one host split its single core evenly
    return Resource(f"r{k:06d}", fleet.vm_memory_mb, fleet.vm_bandwidth[k % len(fleet.vm_bandwidth)],
                    host.cpu_capacity_mips / fleet.resources_per_host, host.id, dc_id)


def build_fleet(config: ScenarioConfig):
    """Hosts (round-robin over datacenters), their VMs, and the datacenters."""
    f = config.fleet
    dc_ids = [d for d, _ in config.datacenters]
    hosts, resources, host_dc = [], [], {}
    for h in range(f.hosts):
        host_id = f"h{h:04d}"
        dc_id = dc_ids[h % len(dc_ids)]
        vm_ids = tuple(f"r{h * f.resources_per_host + i:06d}" for i in range(f.resources_per_host))
        host = Host(host_id, f.host_mips[h % len(f.host_mips)], f.host_memory_mb, f.host_storage_gb, vm_ids)
        hosts.append(host)
        host_dc[host_id] = dc_id
        for i in range(f.resources_per_host):
            resources.append(_vm(f, h * f.resources_per_host + i, host, dc_id))
    datacenters = [DataCenter(d, loc, tuple(h for h in hosts if host_dc[h.id] == d))
                   for d, loc in config.datacenters]
    return hosts, resources, datacenters


def resource_value(spec: ValuationSpec, k: int, resource_id: str) -> float:
    if spec.mode == "static":
        return static_valuation(resource_id, spec.values[k % len(spec.values)]).value
    return value_for(spec.matrix, spec.classes[k % len(spec.classes)], resource_id).value


def run(config: ScenarioConfig, value_hook: Optional[ValueHook] = None,
        backend: Optional[str] = None) -> SimulationRun:
    problems = config.violations()
    if problems:
        raise ConfigError(problems)
    hosts, resources, datacenters = build_fleet(config)
    tasks = list(config.tasks) if config.tasks is not None else generate_workload(
        config.workload, config.seed, config.users)
    problems = validate_all([("task", tasks), ("resource", resources), ("host", hosts),
                             ("user", config.users)])
    if problems:
        raise ConfigError(problems)

    timing = TimingContext(config.users, datacenters)
    by_id: Dict[str, Resource] = {r.id: r for r in resources}
    values = {r.id: resource_value(config.valuation, k, r.id) for k, r in enumerate(resources)}
    host_of = {r.id: r.host_id for r in resources}
    free = set(by_id)
    queue: Dict[str, Task] = {}
    events: List[Event] = []
    placements: List[Placement] = []

    heap: list = []
    for t in tasks:
        heapq.heappush(heap, (t.arrival_ms, 1, t.id, "arrive", t))
        if config.max_wait_ms is not None:
            heapq.heappush(heap, (t.arrival_ms + config.max_wait_ms, 3, t.id, "deadline", t))

    def replenish(need: int) -> None:
        for _ in range(need):
            k = len(resources)
            host = hosts[k % len(hosts)]
            r = _vm(config.fleet, k, host, next(d.id for d in datacenters if host in d.hosts))
            resources.append(r)
            by_id[r.id] = r
            host_of[r.id] = r.host_id
            values[r.id] = resource_value(config.valuation, k, r.id)
            free.add(r.id)

    while heap:
        now = heap[0][0]
        if config.horizon_ms is not None and now > config.horizon_ms:
            break
        deadlines = []
        while heap and heap[0][0] == now:
            _, _, task_id, what, payload = heapq.heappop(heap)
            if what == "complete":
                free.add(payload)
                events.append(Event(now, SimEvent.COMPLETED, task_id, payload))
            elif what == "arrive":
                queue[task_id] = payload
                events.append(Event(now, SimEvent.ARRIVAL, task_id))
            else:
                deadlines.append(task_id)

        if queue:
            if config.replenish and len(queue) > len(free):
                replenish(len(queue) - len(free))
            pool = [by_id[r] for r in sorted(free)]
            round_values = {v.resource_id: v.value for v in apply_hook(
                [static_valuation(r.id, values[r.id]) for r in pool], list(queue.values()), value_hook)}
            p = plan(config.scheduler, list(queue.values()), pool, round_values, timing, backend=backend)
            for a in p.assignments:
                task, res = queue.pop(a.task_id), by_id[a.resource_id]
                free.discard(res.id)
                b = timing.breakdown(task, res)
                end = now + a.total_time_ms
                events.append(Event(now, SimEvent.ASSIGNED, task.id, res.id))
                placements.append(Placement(task.id, res.id, host_of[res.id], now, b.network_latency_ms,
                                            b.execution_ms, end, task.length_mi,
                                            effective_mips(task, res), a.resource_value))
                heapq.heappush(heap, (end, 0, task.id, "complete", res.id))

        for task_id in deadlines:
            if task_id in queue:
                del queue[task_id]
                events.append(Event(now, SimEvent.REJECTED, task_id))

    events.sort(key=Event.sort_key)
    return SimulationRun(config, tasks, hosts, resources, events, placements, sorted(queue))


def with_overrides(config: ScenarioConfig, **changes) -> ScenarioConfig:
    """Copy of ``config``; ``task_count`` and ``arrival_interval_ms`` reach into the workload."""
    workload_keys = {k: changes.pop(k) for k in ("task_count", "arrival_interval_ms") if k in changes}
    if workload_keys:
        changes["workload"] = replace(config.workload, **workload_keys)
    return replace(config, **changes)


def events_csv(run_: SimulationRun) -> str:
    lines = ["time_ms,kind,task_id,resource_id"]
    for e in run_.events:
        lines.append(f"{e.time_ms!r},{e.kind},{e.task_id},{e.resource_id or ''}")
    return "\n".join(lines) + "\n"
