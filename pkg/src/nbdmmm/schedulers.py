"""Planning strategies: NBDMMM, DMMM, FCFS, Greedy-R and Greedy-P.

Each strategy takes the tasks waiting in one planning round and the free
resources, and returns a :class:`~nbdmmm.model.SchedulePlan`. Every resource
is handed out at most once per round; tasks beyond the resource count are
reported as unassigned. Ties resolve by ascending task id and ascending
resource id, so plans do not depend on input order.
"""

from __future__ import annotations

import enum
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels
from .model import Assignment, Resource, SchedulePlan, Task
from .timing import time_matrices
from .valuation import ResourceValuation


class SchedulerKind(str, enum.Enum):
    NBDMMM = "NBDMMM"
    DMMM = "DMMM"
    FCFS = "FCFS"
    GREEDY_R = "GreedyR"
    GREEDY_P = "GreedyP"

    @classmethod
    def parse(cls, name: str) -> "SchedulerKind":
        key = name.strip().replace("-", "").replace("_", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown scheduler {name!r}; valid: {', '.join(m.value for m in cls)}")


Valuations = Union[Sequence[ResourceValuation], Mapping[str, float], None]


def _value_map(valuations: Valuations, resources: Sequence[Resource], required: bool) -> dict:
    if valuations is None:
        if required:
            raise ValueError("valuations are required for this scheduler")
        return {r.id: 0.0 for r in resources}
    if isinstance(valuations, Mapping):
        values = dict(valuations)
    else:
        values = {v.resource_id: v.value for v in valuations}
    missing = [r.id for r in resources if r.id not in values]
    if missing and required:
        raise ValueError(f"valuations missing for resources {missing}")
    return {r.id: values.get(r.id, 0.0) for r in resources}


def _build(tasks, resources, task_idx, res_idx, values, latency, execution):
    assignments = []
    for order, (i, j) in enumerate(zip(task_idx, res_idx)):
        t, r = tasks[i], resources[j]
        assignments.append(Assignment(t.id, r.id, values[r.id],
                                      float(latency[i, j] + execution[i, j]), order))
    taken = set(task_idx)
    unassigned = tuple(t.id for i, t in enumerate(tasks) if i not in taken)
    return SchedulePlan(tuple(assignments), unassigned)


def _max_min(tasks, resources, valuations, timing, with_latency, backend):
    tasks = sorted(tasks, key=lambda t: t.id)
    values = _value_map(valuations, resources, required=True)
    # highest value first; equal values by ascending id
    resources = sorted(resources, key=lambda r: (-values[r.id], r.id))
    latency, execution = time_matrices(timing, tasks, resources)
    keys = latency + execution if with_latency else execution
    steps = min(len(tasks), len(resources))
    # step s hands out resource s to the task that is quickest on it
    picked = kernels.pick_sequence(keys, np.arange(steps, dtype=np.intp), backend=backend)
    return _build(tasks, resources, picked, range(steps), values, latency, execution)


def dmmm(tasks: Sequence[Task], resources: Sequence[Resource], valuations: Valuations,
         timing=None, backend: Optional[str] = None) -> SchedulePlan:
    """Max-value resource to the task with the least execution time on it.

    ``timing`` only feeds the recorded total time; selection ignores latency.
    """
    return _max_min(tasks, resources, valuations, timing, False, backend)


def nbdmmm(tasks: Sequence[Task], resources: Sequence[Resource], valuations: Valuations,
           timing=None, backend: Optional[str] = None) -> SchedulePlan:
    """Max-value resource to the task with the least latency plus execution time on it."""
    return _max_min(tasks, resources, valuations, timing, True, backend)


def fcfs(tasks: Sequence[Task], resources: Sequence[Resource], valuations: Valuations = None,
         timing=None, backend: Optional[str] = None) -> SchedulePlan:
    tasks = sorted(tasks, key=lambda t: (t.arrival_ms, t.id))
    resources = sorted(resources, key=lambda r: r.id)
    values = _value_map(valuations, resources, required=False)
    latency, execution = time_matrices(timing, tasks, resources)
    steps = min(len(tasks), len(resources))
    return _build(tasks, resources, list(range(steps)), range(steps), values, latency, execution)


def _greedy(tasks, resources, valuations, timing, most_powerful_first, backend):
    tasks = sorted(tasks, key=lambda t: t.id)
    values = _value_map(valuations, resources, required=False)
    if most_powerful_first:
        resources = sorted(resources, key=lambda r: (-r.cpu_mips, r.id))
    else:
        resources = sorted(resources, key=lambda r: (r.cpu_mips, r.id))
    latency, execution = time_matrices(timing, tasks, resources)
    steps = min(len(tasks), len(resources))
    if steps == 0:
        return _build(tasks, resources, [], [], values, latency, execution)
    # task order is keyed on execution time on the round's most powerful free
    # resource, so both greedy variants visit tasks in the same order
    ref = min(range(len(resources)), key=lambda j: (-resources[j].cpu_mips, resources[j].id))
    picked = kernels.pick_sequence(execution, np.full(steps, ref, dtype=np.intp), backend=backend)
    return _build(tasks, resources, picked, range(steps), values, latency, execution)


def greedy_r(tasks: Sequence[Task], resources: Sequence[Resource], valuations: Valuations = None,
             timing=None, backend: Optional[str] = None) -> SchedulePlan:
    """Quickest task first, onto the most powerful free resource."""
    return _greedy(tasks, resources, valuations, timing, True, backend)


def greedy_p(tasks: Sequence[Task], resources: Sequence[Resource], valuations: Valuations = None,
             timing=None, backend: Optional[str] = None) -> SchedulePlan:
    """Quickest task first, onto the least powerful free resource."""
    return _greedy(tasks, resources, valuations, timing, False, backend)


SCHEDULERS = {
    SchedulerKind.NBDMMM: nbdmmm,
    SchedulerKind.DMMM: dmmm,
    SchedulerKind.FCFS: fcfs,
    SchedulerKind.GREEDY_R: greedy_r,
    SchedulerKind.GREEDY_P: greedy_p,
}


def plan(kind, tasks, resources, valuations=None, timing=None, backend=None) -> SchedulePlan:
    if not isinstance(kind, SchedulerKind):
        kind = SchedulerKind.parse(kind)
    return SCHEDULERS[kind](tasks, resources, valuations, timing, backend=backend)
