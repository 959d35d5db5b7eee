"""Command line entry point: ``nbdmmm run | sweep | trace``.

Exit codes: 0 success, 2 user error (bad config, bad input), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import List, Optional, Sequence

from . import kernels
from .config import load_config
from .metrics import MetricsError, regression, run_metrics
from .schedulers import SchedulerKind
from .simulator import ConfigError, ScenarioConfig, events_csv, run, with_overrides
from .trace import DEFAULT_BUCKET, TraceError, parse_rows, report_csv, summarize, summary_csv

log = logging.getLogger("nbdmmm")

EXIT_OK, EXIT_USER, EXIT_IO = 0, 2, 3
SWEEP_AXES = ("task_count", "arrival_interval_ms")
METRICS_HEADER = "algorithm,task_count,arrival_interval_ms,success_ratio,utilization"


class UserError(Exception):
    pass


def _write(out_dir: str, name: str, text: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _schedulers(name: Optional[str], config: ScenarioConfig) -> List[SchedulerKind]:
    if name is None:
        return [config.scheduler]
    if name.lower() == "all":
        return list(SchedulerKind)
    try:
        return [SchedulerKind.parse(name)]
    except ValueError as exc:
        raise UserError(str(exc)) from None


def _metrics_row(kind: SchedulerKind, config: ScenarioConfig, sim) -> str:
    m = run_metrics(sim)
    return f"{kind.value},{m.tasks_submitted},{config.workload.arrival_interval_ms!r},{m.success_ratio!r},{m.utilization!r}"


def _run_one(config: ScenarioConfig):
    sim = run(config)
    return _metrics_row(config.scheduler, config, sim), events_csv(sim), sim


def cmd_run(args) -> int:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"run.seed={args.seed}")
    config = load_config(args.config, overrides)
    kinds = _schedulers(args.scheduler, config)
    rows = [METRICS_HEADER]
    for kind in kinds:
        row, log_text, _ = _run_one(replace(config, scheduler=kind))
        rows.append(row)
        name = "events.csv" if len(kinds) == 1 else f"events_{kind.value}.csv"
        _write(args.out, name, log_text)
    _write(args.out, "metrics.csv", "\n".join(rows) + "\n")
    return EXIT_OK


def parse_sweep(text: str):
    axis, sep, points = text.partition("=")
    axis = axis.strip()
    if not sep or axis not in SWEEP_AXES:
        raise UserError(f"--sweep must be AXIS=a,b,c with AXIS in {SWEEP_AXES}")
    try:
        values = [float(p) for p in points.split(",") if p.strip()]
    except ValueError:
        raise UserError(f"bad sweep points {points!r}") from None
    if not values:
        raise UserError("--sweep needs at least one point")
    if axis == "task_count":
        if any(v != int(v) or v < 0 for v in values):
            raise UserError("task_count points must be nonnegative integers")
        values = [int(v) for v in values]
    return axis, values


def _sweep_point(item):
    kind, axis, value, config = item
    cfg = with_overrides(replace(config, scheduler=kind), **{axis: value})
    sim = run(cfg)
    m = run_metrics(sim)
    return kind, value, m, _metrics_row(kind, cfg, sim)


def sweep(config: ScenarioConfig, axis: str, values: Sequence, kinds: Sequence[SchedulerKind], jobs: int = 1):
    """Run every (scheduler, point); results sorted by (scheduler, point)."""
    items = [(k, axis, v, config) for k in kinds for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, items))
    else:
        results = [_sweep_point(i) for i in items]
    order = {k: i for i, k in enumerate(SchedulerKind)}
    return sorted(results, key=lambda r: (order[r[0]], r[1]))


def regression_rows(results, kinds) -> List[str]:
    rows = ["algorithm,n,adjusted_r_square,covariance,standard_error,error"]
    for kind in kinds:
        pts = [(v, m.utilization) for k, v, m, _ in results if k == kind]
        try:
            s = regression([p[0] for p in pts], [p[1] for p in pts])
            rows.append(f"{kind.value},{s.n},{s.adjusted_r_square!r},{s.covariance!r},{s.standard_error!r},")
        except MetricsError as exc:
            rows.append(f"{kind.value},{len(pts)},,,,{exc}")
    return rows


def comparison_report(results, kinds, axis) -> str:
    """Plain-text ordering of schedulers by mean utilization and success ratio."""
    lines = [f"sweep axis: {axis}", ""]
    means = []
    for kind in kinds:
        ms = [m for k, _, m, _ in results if k == kind]
        if ms:
            means.append((kind, sum(m.utilization for m in ms) / len(ms),
                          sum(m.success_ratio for m in ms) / len(ms)))
    lines.append("mean utilization (high to low):")
    for kind, u, _ in sorted(means, key=lambda t: (-t[1], t[0].value)):
        lines.append(f"  {kind.value:8s} {u:.6f}")
    lines.append("mean success ratio (high to low):")
    for kind, _, s in sorted(means, key=lambda t: (-t[2], t[0].value)):
        lines.append(f"  {kind.value:8s} {s:.6f}")
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    config = load_config(args.config, list(args.set or []) + (
        [f"run.seed={args.seed}"] if args.seed is not None else []))
    axis, values = parse_sweep(args.sweep)
    kinds = list(SchedulerKind) if args.scheduler is None else _schedulers(args.scheduler, config)
    results = sweep(config, axis, values, kinds, args.jobs)
    _write(args.out, "metrics.csv", "\n".join([METRICS_HEADER] + [r[3] for r in results]) + "\n")
    if axis == "task_count":
        rows = regression_rows(results, kinds)
        _write(args.out, "regression.csv", "\n".join(rows) + "\n")
        for row in rows[1:]:
            if not row.endswith(","):
                log.error("regression for %s: %s", row.split(",")[0], row.rsplit(",", 1)[1])
    _write(args.out, "report.txt", comparison_report(results, kinds, axis))
    return EXIT_OK


def cmd_trace(args) -> int:
    with open(args.trace, encoding="utf-8") as fh:
        parsed = parse_rows(fh, args.format)
    for err in parsed.errors:
        log.warning("%s: %s", args.trace, err)
    if not parsed.rows:
        raise UserError(f"{args.trace}: no valid trace rows")
    summary = summarize(parsed.rows, args.bucket_ms)
    _write(args.out, "usage_summary.csv", summary_csv(summary))
    _write(args.out, "usage_report.csv", report_csv(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nbdmmm", description="Cloud task allocation simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_flags(sp):
        sp.add_argument("--config", help="scenario file (defaults apply when omitted)")
        sp.add_argument("--scheduler", help="NBDMMM, DMMM, FCFS, GreedyR, GreedyP or 'all'")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="override one config entry; repeatable")
        sp.add_argument("--out", default="out", help="output directory")

    sp = sub.add_parser("run", help="run one scenario")
    scenario_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run all schedulers over a parameter sweep")
    scenario_flags(sp)
    sp.add_argument("--sweep", required=True, metavar="AXIS=a,b,c",
                    help="task_count=... or arrival_interval_ms=...")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("trace", help="summarize a job-event trace")
    sp.add_argument("trace")
    sp.add_argument("--bucket-ms", type=int, default=DEFAULT_BUCKET)
    sp.add_argument("--format", choices=["auto", "csv", "whitespace"], default="auto")
    sp.add_argument("--out", default="out")
    sp.set_defaults(func=cmd_trace)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USER
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        return args.func(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_USER
    except (UserError, TraceError, MetricsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
