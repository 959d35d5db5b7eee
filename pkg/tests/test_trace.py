import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbdmmm.trace import (EventType, MappingSpec, TraceError, TraceRow, parse_line, parse_rows,
                          parse_text, report_csv, serialize, summarize, summary_csv, to_workload)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_rows(fh)


def test_sample_trace_rows(sample_trace_path):
    parsed = load(sample_trace_path)
    assert parsed.errors == []
    assert len(parsed.rows) == 50
    assert parsed.rows[0] == TraceRow("T1", 2_450_000_000_000, 6_480_000_000, EventType.SUBMIT, 0)
    t44 = parsed.rows[43]
    assert (t44.task_label, t44.event_type, t44.scheduling_class) == ("T44", EventType.FAIL, 1)


def test_csv_line_from_table():
    assert parse_line("T1,2.45E+12,6.48E+09,0,0") == TraceRow("T1", 2450000000000, 6480000000, EventType.SUBMIT, 0)
    assert parse_line("T44,2.45E+12,6.48E+09,3,1").event_type is EventType.FAIL


def test_empty_and_bad_input():
    assert parse_text("").rows == []
    parsed = parse_text("T1,1,2,0,0\nT2,1,2,9,0\nT3,1.5,2,0,0\nT4,1,2\nT5,1,2,4,7\n")
    assert [r.task_label for r in parsed.rows] == ["T1"]
    assert [e.line for e in parsed.errors] == [2, 3, 4, 5]
    assert "unknown event_type 9" in str(parsed.errors[0])
    with pytest.raises(TraceError):
        parse_rows(io.StringIO(""), fmt="xml")


def test_unreadable_stream_is_fatal():
    class Broken(io.StringIO):
        def read(self, *a):
            raise OSError("disk gone")

    with pytest.raises(TraceError, match="unreadable"):
        parse_rows(Broken())


def test_round_trip(sample_trace_path):
    rows = load(sample_trace_path).rows
    text = serialize(rows)
    again = parse_text(text).rows
    assert again == rows
    assert serialize(again) == text


def test_sample_trace_summary(sample_trace_path):
    rows = load(sample_trace_path).rows
    # oracle: count the sample trace by hand, finishes over submits
    submits = sum(1 for line in open(sample_trace_path).read().splitlines()[1:] if line.split("\t")[3] == "0")
    finishes = sum(1 for line in open(sample_trace_path).read().splitlines()[1:] if line.split("\t")[3] == "4")
    assert (submits, finishes) == (17, 11)
    s = summarize(rows)
    assert s.completion_ratio == 11 / 17
    assert s.peak_bucket == s.trough_bucket == 2_450_000_000_000 // 3_600_000
    assert s.demand_by_bucket == {s.peak_bucket: 17}


def test_peak_and_trough_buckets():
    rows = [TraceRow(f"a{i}", 5000 + i, 1, EventType.SUBMIT, 0) for i in range(4)]
    rows += [TraceRow("b", 100, 1, EventType.SCHEDULE, 0), TraceRow("c", 2100, 1, EventType.SUBMIT, 0),
             TraceRow("d", 3500, 1, EventType.FINISH, 0)]
    s = summarize(rows, bucket=1000)
    assert s.demand_by_bucket == {0: 0, 1: 0, 2: 1, 3: 0, 4: 0, 5: 4}
    assert (s.peak_bucket, s.trough_bucket) == (5, 0)
    assert s.completion_ratio == 1 / 5
    assert summary_csv(s).splitlines()[:2] == ["bucket,count", "0,0"]
    assert "completion_ratio,0.2" in report_csv(s)


def test_no_submits_means_no_ratio():
    s = summarize([TraceRow("x", 1, 1, EventType.FINISH, 0)])
    assert s.completion_ratio is None
    assert "completion_ratio,\n" in report_csv(s)
    assert summarize([]).peak_bucket is None
    with pytest.raises(TraceError):
        summarize([], bucket=0)


rows_st = st.lists(st.builds(TraceRow, st.text("abc", min_size=1, max_size=3), st.integers(0, 10 ** 6),
                             st.integers(0, 99), st.sampled_from(list(EventType)), st.integers(0, 3)),
                   max_size=40)


@given(rows_st, st.randoms(use_true_random=False))
def test_summary_order_invariant(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    assert summarize(rows, 1000) == summarize(shuffled, 1000)


@given(rows_st)
def test_serialize_round_trip(rows):
    assert parse_text(serialize(rows)).rows == rows
    assert len(to_workload(rows)) == sum(r.event_type == EventType.SUBMIT for r in rows)


def test_to_workload_rebases():
    rows = [TraceRow(f"t{i}", ts, 1, EventType.SUBMIT, 0) for i, ts in enumerate((100, 200, 300))]
    assert [t.arrival_ms for t in to_workload(rows)] == [0, 100, 200]
    assert [t.arrival_ms for t in to_workload(rows, MappingSpec(time_scale=0.5))] == [0, 50, 100]
    assert to_workload([TraceRow("x", 5, 1, EventType.KILL, 0)]) == []


def test_sample_trace_workload(sample_trace_path):
    tasks = to_workload(load(sample_trace_path).rows, MappingSpec(user_ids=("u1", "u2"), seed=3))
    assert len(tasks) == 17
    assert all(t.arrival_ms == 0 for t in tasks)
    assert {t.user_id for t in tasks} <= {"u1", "u2"}
    assert tasks == to_workload(load(sample_trace_path).rows, MappingSpec(user_ids=("u1", "u2"), seed=3))
