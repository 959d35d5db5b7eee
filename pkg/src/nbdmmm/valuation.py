"""Decision-matrix consumption values for resources."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

from .model import UserClass

DEFAULT_PRIORITIES: Dict[UserClass, int] = {
    UserClass.HIGH_END: 5,
    UserClass.PRIVILEGED: 4,
    UserClass.CASUAL: 3,
    UserClass.NAIVE: 2,
    UserClass.UNDERPRIVILEGED: 1,
}


class ValuationError(ValueError):
    pass


@dataclass(frozen=True)
class DecisionMatrix:
    """Weighted criteria scored against a user-class priority table.

    Criteria are opaque ``(name, weight)`` pairs; their meaning is up to the
    provider that configures them.
    """

    criteria: Tuple[Tuple[str, float], ...] = (("C1", 1.0), ("C2", 2.0), ("C3", 3.0))
    priority_table: Mapping[UserClass, int] = field(default_factory=lambda: dict(DEFAULT_PRIORITIES))

    @classmethod
    def from_weights(cls, weights: Sequence[float], priority_table=None) -> "DecisionMatrix":
        criteria = tuple((f"C{i + 1}", w) for i, w in enumerate(weights))
        if priority_table is None:
            return cls(criteria)
        return cls(criteria, priority_table)

    def violations(self) -> list:
        out = [f"weight of {name!r} > 0" for name, w in self.criteria if not w > 0]
        for cls_, p in self.priority_table.items():
            if p not in (1, 2, 3, 4, 5):
                out.append(f"priority of {cls_} in 1..5")
        return out


@dataclass(frozen=True)
class ResourceValuation:
    resource_id: str
    value: float
    per_criterion: Tuple[float, ...] = ()


def value_for(matrix: DecisionMatrix, user_class, resource_id: str = "") -> ResourceValuation:
    """Score one resource column: the sum of ``weight * priority(user_class)``."""
    if isinstance(user_class, str) and not isinstance(user_class, UserClass):
        try:
            user_class = UserClass.parse(user_class)
        except ValueError:
            raise ValuationError(f"unmapped user class {user_class!r}") from None
    if user_class not in matrix.priority_table:
        raise ValuationError(f"unmapped user class {user_class!r}")
    priority = matrix.priority_table[user_class]
    products = tuple(w * priority for _, w in matrix.criteria)
    return ResourceValuation(resource_id, sum(products), products)


def static_valuation(resource_id: str, value: float) -> ResourceValuation:
    """A pinned value, for scenarios that state resource values directly."""
    return ResourceValuation(resource_id, value, (value,))


def _desc_key(v: ResourceValuation):
    return (-v.value, v.resource_id)


def max_value_resource(valuations: Sequence[ResourceValuation]) -> str:
    """Id of the highest-valued resource; equal values resolve to the smallest id."""
    if not valuations:
        raise ValuationError("no resources")
    return min(valuations, key=_desc_key).resource_id


def sort_by_value(valuations: Sequence[ResourceValuation]) -> list:
    return sorted(valuations, key=lambda v: (v.value, v.resource_id))


def consumption_order(valuations: Sequence[ResourceValuation]) -> list:
    """Resources in the order the max-min schedulers hand them out."""
    return sorted(valuations, key=_desc_key)


# Per-round adjustment hook: (valuation, tasks in the round) -> value.
ValueHook = Callable[[ResourceValuation, Sequence], float]


def apply_hook(valuations: Sequence[ResourceValuation], tasks, hook: Optional[ValueHook]) -> list:
    if hook is None:
        return list(valuations)
    return [ResourceValuation(v.resource_id, hook(v, tasks), v.per_criterion) for v in valuations]
