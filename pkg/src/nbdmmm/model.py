"""Domain types shared by the scheduler, timing model and simulator.

All types are frozen dataclasses. Constructors do not raise on bad values;
:func:`validate` reports the first violated invariant so that scenario loading
can collect every problem in one pass.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple


class UserClass(str, enum.Enum):
    HIGH_END = "HighEnd"
    PRIVILEGED = "Privileged"
    CASUAL = "Casual"
    NAIVE = "Naive"
    UNDERPRIVILEGED = "Underprivileged"

    @classmethod
    def parse(cls, name: str) -> "UserClass":
        key = name.strip().replace("-", "").replace("_", "").replace(" ", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown user class {name!r}; expected one of {[m.value for m in cls]}")


@dataclass(frozen=True)
class Task:
    id: str
    length_mi: float
    cpu_demand_mips: float
    arrival_ms: float = 0.0
    user_id: Optional[str] = None
    scheduling_class: int = 0


@dataclass(frozen=True)
class Resource:
    """A virtual machine slot, the unit the schedulers hand out."""

    id: str
    memory_mb: float
    bandwidth: float  # coordinate units per millisecond
    cpu_mips: float
    host_id: Optional[str] = None
    datacenter_id: Optional[str] = None


@dataclass(frozen=True)
class Host:
    id: str
    cpu_capacity_mips: float
    memory_mb: float = 4096.0
    storage_gb: float = 100.0
    resources: Tuple[str, ...] = ()


@dataclass(frozen=True)
class GeoPoint:
    x: float
    y: float


@dataclass(frozen=True)
class DataCenter:
    id: str
    location: GeoPoint
    hosts: Tuple[Host, ...] = ()


@dataclass(frozen=True)
class CloudUser:
    id: str
    location: GeoPoint
    user_class: UserClass = UserClass.CASUAL


@dataclass(frozen=True)
class Assignment:
    task_id: str
    resource_id: str
    resource_value: float
    total_time_ms: float
    assignment_order: int


@dataclass(frozen=True)
class SchedulePlan:
    assignments: Tuple[Assignment, ...] = ()
    unassigned: Tuple[str, ...] = field(default_factory=tuple)

    def pairs(self) -> list:
        """``(task_id, resource_id)`` in assignment order."""
        return [(a.task_id, a.resource_id) for a in self.assignments]


def _positive(obj, *names: str) -> Optional[str]:
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            return f"{name} > 0"
    return None


def validate(entity) -> Optional[str]:
    """Return the first violated invariant of ``entity``, or ``None`` if it is valid.

    Violations are returned as short strings such as ``"length_mi > 0"``.
    """
    if isinstance(entity, Task):
        if (v := _positive(entity, "length_mi", "cpu_demand_mips")) is not None:
            return v
        if not (math.isfinite(entity.arrival_ms) and entity.arrival_ms >= 0):
            return "arrival_ms >= 0"
        if entity.scheduling_class not in (0, 1, 2, 3):
            return "scheduling_class in 0..3"
        return None
    if isinstance(entity, Resource):
        return _positive(entity, "memory_mb", "bandwidth", "cpu_mips")
    if isinstance(entity, Host):
        return _positive(entity, "cpu_capacity_mips")
    if isinstance(entity, GeoPoint):
        if not (math.isfinite(entity.x) and math.isfinite(entity.y)):
            return "finite coordinates"
        return None
    if isinstance(entity, DataCenter):
        if not entity.hosts:
            return "at least one host"
        return validate(entity.location)
    if isinstance(entity, CloudUser):
        if not isinstance(entity.user_class, UserClass):
            return "user_class is a known class"
        return validate(entity.location)
    if isinstance(entity, SchedulePlan):
        tasks = [a.task_id for a in entity.assignments] + list(entity.unassigned)
        if len(set(tasks)) != len(tasks):
            return "no task appears twice"
        resources = [a.resource_id for a in entity.assignments]
        if len(set(resources)) != len(resources):
            return "no resource appears twice"
        orders = sorted(a.assignment_order for a in entity.assignments)
        if orders != list(range(len(orders))):
            return "assignment_order is a permutation of 0..n-1"
        return None
    if isinstance(entity, Assignment):
        if entity.total_time_ms < 0:
            return "total_time_ms >= 0"
        return None
    raise TypeError(f"not a domain type: {type(entity).__name__}")


def duplicate_ids(items: Iterable, label: str) -> list:
    """Violation strings for repeated ``id`` attributes within ``items``."""
    seen, out = set(), []
    for item in items:
        if item.id in seen:
            out.append(f"duplicate {label} id {item.id!r}")
        seen.add(item.id)
    return out


def validate_all(groups: Sequence[Tuple[str, Iterable]]) -> list:
    """Collect every violation across labelled groups of entities."""
    problems = []
    for label, items in groups:
        items = list(items)
        problems.extend(duplicate_ids(items, label))
        for item in items:
            v = validate(item)
            if v is not None:
                problems.append(f"{label} {item.id!r}: {v}")
    return problems
