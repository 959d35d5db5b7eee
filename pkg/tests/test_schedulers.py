import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbdmmm.model import Resource, Task, validate
from nbdmmm.schedulers import SchedulerKind, dmmm, fcfs, greedy_p, greedy_r, nbdmmm, plan
from nbdmmm.timing import FixedTiming, TimingContext

from oracles import fcfs_oracle, greedy_oracle, max_min_oracle, random_instance

WORKED_TIMES = {"T1": (50, 0.88), "T2": (10, 0.54), "T3": (15, 0.33), "T4": (30, 0.90), "T5": (25, 0.64)}
WORKED_VALUES = {"A": 30, "B": 40, "C": 95, "D": 105}


def worked_example():
    tasks = [Task(k, 1.0, 1.0) for k in WORKED_TIMES]
    resources = [Resource(r, 64, 10, 1000) for r in WORKED_VALUES]
    return tasks, resources


def test_worked_example_first_assignment(backend):
    tasks, resources = worked_example()
    p = nbdmmm(tasks, resources, WORKED_VALUES, FixedTiming(WORKED_TIMES), backend=backend)
    first = p.assignments[0]
    assert (first.task_id, first.resource_value) == ("T2", 105)
    assert first.total_time_ms == pytest.approx(10.54, abs=1e-9)


def test_worked_example_full_sequence(backend):
    tasks, resources = worked_example()
    p = nbdmmm(tasks, resources, WORKED_VALUES, FixedTiming(WORKED_TIMES), backend=backend)
    # brute force over the table itself: largest value left goes to the smallest total left
    got = [(a.task_id, a.resource_value) for a in p.assignments]
    expected, remaining = [], dict(WORKED_TIMES)
    for value in sorted(WORKED_VALUES.values(), reverse=True):
        task = min(remaining, key=lambda k: (sum(remaining[k]), k))
        expected.append((task, value))
        del remaining[task]
    assert got == expected == [("T2", 105), ("T3", 95), ("T5", 40), ("T4", 30)]
    assert p.unassigned == ("T1",)
    assert validate(p) is None


def _tasks_with_exec(exec_ms, mips=1000.0):
    # length chosen so length / mips * 1000 == exec_ms exactly for these integers
    return [Task(f"t{i}", e * mips / 1000.0, mips) for i, e in enumerate(exec_ms)]


def test_dmmm_example(backend):
    tasks = _tasks_with_exec([5, 2, 9])
    resources = [Resource(f"r{i}", 64, 1, 1000) for i in range(3)]
    values = {"r0": 10, "r1": 20, "r2": 30}
    p = dmmm(tasks, resources, values, backend=backend)
    assert [(a.task_id, a.resource_value) for a in p.assignments] == [("t1", 30), ("t0", 20), ("t2", 10)]
    assert p.pairs() == max_min_oracle(tasks, resources, values, None, False)[0]


def test_trivial_plans(backend):
    t, r = Task("t", 1, 1), Resource("r", 1, 1, 1)
    for kind in SchedulerKind:
        assert plan(kind, [t], [r], {"r": 1}, backend=backend).pairs() == [("t", "r")]
        empty = plan(kind, [], [r], {"r": 1}, backend=backend)
        assert empty.assignments == () and empty.unassigned == ()
        starved = plan(kind, [t], [], {}, backend=backend)
        assert starved.unassigned == ("t",)


def test_fcfs_examples():
    rs = [Resource("r2", 1, 1, 1), Resource("r1", 1, 1, 1)]
    p = fcfs([Task("t2", 1, 1, 5), Task("t1", 1, 1, 0)], rs)
    assert p.pairs() == [("t1", "r1"), ("t2", "r2")]
    same = [Task("b", 1, 1, 3), Task("a", 1, 1, 3), Task("c", 1, 1, 3)]
    expected = fcfs(same, rs).pairs()
    assert expected == [("a", "r1"), ("b", "r2")]
    for perm in (same[::-1], same[1:] + same[:1]):
        assert fcfs(perm, rs[::-1]).pairs() == expected
    assert fcfs(same, rs).unassigned == ("c",)


def test_greedy_examples(backend):
    tasks = [Task("slow", 4 * 2000 / 1000, 2000), Task("fast", 1 * 2000 / 1000, 2000)]
    rs = [Resource("a", 1, 1, 2000), Resource("b", 1, 1, 3000)]
    assert greedy_r(tasks, rs, backend=backend).pairs() == [("fast", "b"), ("slow", "a")]
    assert greedy_p(tasks, rs, backend=backend).pairs() == [("fast", "a"), ("slow", "b")]
    assert greedy_r(tasks[:1], rs, backend=backend).pairs() == [("slow", "b")]
    assert greedy_p(tasks[:1], rs, backend=backend).pairs() == [("slow", "a")]


def test_greedy_equal_mips_uses_id_order(backend):
    tasks = [Task(f"t{i}", 100 * (i + 1), 3000) for i in range(3)]
    rs = [Resource(x, 1, 1, 2500) for x in ("z", "m", "a")]
    r = greedy_r(tasks, rs, backend=backend).pairs()
    assert r == [("t0", "a"), ("t1", "m"), ("t2", "z")]
    assert greedy_p(tasks, rs, backend=backend).pairs() == r


def test_missing_valuation_rejected():
    with pytest.raises(ValueError, match="missing"):
        dmmm([Task("t", 1, 1)], [Resource("r", 1, 1, 1)], {})


ORACLES = {
    SchedulerKind.NBDMMM: lambda t, r, v, ctx: max_min_oracle(t, r, v, ctx, True),
    SchedulerKind.DMMM: lambda t, r, v, ctx: max_min_oracle(t, r, v, ctx, False),
    SchedulerKind.FCFS: lambda t, r, v, ctx: fcfs_oracle(t, r),
    SchedulerKind.GREEDY_R: lambda t, r, v, ctx: greedy_oracle(t, r, True),
    SchedulerKind.GREEDY_P: lambda t, r, v, ctx: greedy_oracle(t, r, False),
}


@pytest.mark.parametrize("kind", list(SchedulerKind))
def test_oracle_equivalence_small(kind, backend):
    rng = random.Random(1234)
    for _ in range(150):
        tasks, resources, values, ctx = random_instance(rng)
        p = plan(kind, tasks, resources, values, ctx, backend=backend)
        pairs, leftover = ORACLES[kind](tasks, resources, values, ctx)
        assert p.pairs() == pairs
        assert sorted(p.unassigned) == leftover
        assert validate(p) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(list(SchedulerKind)))
def test_permutation_invariance(seed, kind):
    rng = random.Random(seed)
    tasks, resources, values, ctx = random_instance(rng, 8, 8)
    base = plan(kind, tasks, resources, values, ctx)
    rng.shuffle(tasks)
    rng.shuffle(resources)
    assert plan(kind, tasks, resources, values, ctx) == base


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_zero_latency_reduces_to_dmmm(seed):
    tasks, resources, values, ctx = random_instance(random.Random(seed), 8, 8)
    flat = TimingContext()  # no users known -> zero latency
    assert nbdmmm(tasks, resources, values, flat).pairs() == dmmm(tasks, resources, values, ctx).pairs()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_greedy_variants_share_task_order(seed):
    rng = random.Random(seed)
    tasks, _, _, _ = random_instance(rng, 8, 0)
    mips = rng.sample([1000.0, 1500.0, 2000.0, 2500.0, 3000.0, 3500.0], rng.randint(1, 6))
    resources = [Resource(f"r{i}", 1, 1, m) for i, m in enumerate(mips)]
    r = greedy_r(tasks, resources).pairs()
    p = greedy_p(tasks, resources).pairs()
    assert [t for t, _ in r] == [t for t, _ in p]
    by_id = {x.id: x.cpu_mips for x in resources}
    assert [by_id[x] for _, x in r] == sorted(by_id.values(), reverse=True)[: len(r)]
    assert [by_id[x] for _, x in p] == sorted(by_id.values())[: len(p)]


def test_scheduler_names():
    assert SchedulerKind.parse("greedy-r") is SchedulerKind.GREEDY_R
    with pytest.raises(ValueError, match="NBDMMM, DMMM, FCFS, GreedyR, GreedyP"):
        SchedulerKind.parse("RoundRobin")
