"""Decision-matrix max-min scheduling for cloud resources, with a discrete-event simulator."""

from .kernels import BACKEND
from .model import (Assignment, CloudUser, DataCenter, GeoPoint, Host, Resource, SchedulePlan,
                    Task, UserClass, validate)
from .schedulers import SchedulerKind, dmmm, fcfs, greedy_p, greedy_r, nbdmmm, plan
from .simulator import ScenarioConfig, generate_workload, run
from .valuation import DecisionMatrix, max_value_resource, sort_by_value, value_for

__all__ = [
    "BACKEND", "Assignment", "CloudUser", "DataCenter", "DecisionMatrix", "GeoPoint", "Host",
    "Resource", "ScenarioConfig", "SchedulePlan", "SchedulerKind", "Task", "UserClass", "dmmm",
    "fcfs", "generate_workload", "greedy_p", "greedy_r", "max_value_resource", "nbdmmm", "plan",
    "run", "sort_by_value", "validate", "value_for",
]
