import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbdmmm.model import CloudUser, DataCenter, GeoPoint, Host, Resource, Task
from nbdmmm.timing import (FixedTiming, TimingContext, TimingError, breakdown, distance,
                           execution_time_ms, nearest_distance, network_latency_ms,
                           time_matrices, total_time_ms)

H = (Host("h", 1000),)


def dc(id_, x, y):
    return DataCenter(id_, GeoPoint(x, y), H)


def test_execution_time_uses_task_demand():
    assert execution_time_ms(Task("t", 1000, 2000), Resource("r", 64, 1, 3000)) == 500


def test_execution_time_capped_by_resource():
    # hand computation: min(4000, 2000) = 2000 MIPS -> 1000/2000 s = 500 ms
    assert execution_time_ms(Task("t", 1000, 4000), Resource("r", 64, 1, 2000)) == 500


def test_execution_calibration_fixture():
    # 0.88 ms on a 1250 MIPS machine is 1.1 MI
    e = execution_time_ms(Task("T1", 1.1, 1250), Resource("r", 64, 1, 1250))
    assert e == pytest.approx(0.88, abs=1e-12)


@pytest.mark.parametrize("a, b, d", [((0, 0), (3, 4), 5), ((2, 2), (2, 2), 0), ((1, 1), (4, 5), 5)])
def test_distance(a, b, d):
    assert distance(GeoPoint(*a), GeoPoint(*b)) == d


def test_nearest_distance():
    user = CloudUser("u", GeoPoint(0, 0))
    assert nearest_distance(user, [dc("b", 6, 8), dc("a", 3, 4)]) == (5, "a")
    assert nearest_distance(user, [dc("only", 6, 8)]) == (10, "only")
    with pytest.raises(TimingError, match="no datacenters"):
        nearest_distance(user, [])


def test_nearest_distance_tie_goes_to_smallest_id():
    user = CloudUser("u", GeoPoint(0, 0))
    layout = [dc("dc2", -5, 0), dc("dc1", 5, 0), dc("dc3", 0, 7)]
    for order in (layout, layout[::-1], [layout[2], layout[0], layout[1]]):
        assert nearest_distance(user, order) == (5, "dc1")


def test_network_latency():
    assert network_latency_ms(100, 10) == 10
    assert network_latency_ms(0, 10) == 0
    assert network_latency_ms(500, 10) == 50


@pytest.mark.parametrize("n, e, total", [
    (50, 0.88, 50.88), (10, 0.54, 10.54), (15, 0.33, 15.33), (30, 0.90, 30.90), (25, 0.64, 25.64),
    (0, 0, 0),
])
def test_table_totals(n, e, total):
    assert breakdown("t", n, e).total_ms == pytest.approx(total, abs=1e-9)


def test_total_time_composes_components():
    user = CloudUser("u", GeoPoint(0, 0))
    task, res = Task("t", 1000, 2000, 0, "u"), Resource("r", 64, 10, 3000)
    b = total_time_ms(task, res, user, [dc("d1", 300, 400), dc("d2", 600, 800)])
    assert (b.distance, b.network_latency_ms, b.execution_ms, b.total_ms) == (500, 50, 500, 550)
    assert b.chosen_datacenter_id == "d1"


coords = st.floats(-1e4, 1e4, allow_nan=False)
points = st.builds(GeoPoint, coords, coords)


@given(points, points, points)
def test_triangle_and_symmetry(a, b, c):
    assert distance(a, b) == distance(b, a)
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


@given(points, st.lists(points, min_size=1, max_size=6))
def test_nearest_is_a_lower_bound(u, pts):
    user = CloudUser("u", u)
    dcs = [DataCenter(f"d{i}", p, H) for i, p in enumerate(pts)]
    d, _ = nearest_distance(user, dcs)
    assert all(d <= distance(u, x.location) for x in dcs)


@given(st.floats(0, 1e6), st.floats(0.01, 1e3))
def test_latency_homogeneous(d, bw):
    assert network_latency_ms(2 * d, bw) == pytest.approx(2 * network_latency_ms(d, bw))
    assert network_latency_ms(d, 2 * bw) == pytest.approx(network_latency_ms(d, bw) / 2)


@given(st.floats(0, 1e4), st.floats(0, 1e4), st.floats(0.001, 1e3))
def test_total_increasing_in_each_component(n, e, bump):
    base = breakdown("t", n, e).total_ms
    assert breakdown("t", n + bump, e).total_ms > base or math.isclose(bump, 0)
    assert breakdown("t", n, e + bump).total_ms > base or math.isclose(bump, 0)


def test_matrices_match_scalar_path():
    users = [CloudUser("u1", GeoPoint(10, 20)), CloudUser("u2", GeoPoint(-300, 77))]
    ctx = TimingContext(users, [dc("a", 0, 0), dc("b", 400, 300)])
    tasks = [Task("t1", 321.5, 2100, 0, "u1"), Task("t2", 77, 4000, 0, "u2"), Task("t3", 10, 900, 0, None)]
    resources = [Resource("r1", 64, 5, 2000), Resource("r2", 64, 20, 3000)]
    lat, exe = time_matrices(ctx, tasks, resources)
    for i, t in enumerate(tasks):
        for j, r in enumerate(resources):
            b = ctx.breakdown(t, r)
            assert lat[i, j] == b.network_latency_ms
            assert exe[i, j] == b.execution_ms
    lat0, exe0 = time_matrices(None, tasks, resources)
    assert (lat0 == 0).all() and (exe0 == exe).all()


def test_fixed_timing_ignores_resource():
    ft = FixedTiming({"T1": (50, 0.88)})
    t = Task("T1", 1, 1)
    assert ft.breakdown(t, Resource("a", 1, 1, 1)).total_ms == ft.breakdown(t, Resource("b", 1, 9, 9)).total_ms
