"""Scenario files: sectioned ``key = value`` text (INI), see docs/config_format.md."""

from __future__ import annotations

import configparser
import os
from dataclasses import replace
from typing import Iterable, List, Optional, Tuple

from .model import CloudUser, GeoPoint, Task, UserClass
from .schedulers import SchedulerKind
from .simulator import (ConfigError, FleetSpec, ScenarioConfig, ValuationSpec, WorkloadSpec)
from .trace import MappingSpec, TraceError, parse_rows, to_workload
from .valuation import DEFAULT_PRIORITIES, DecisionMatrix

TRUE = {"1", "true", "yes", "on"}
FALSE = {"0", "false", "no", "off"}


class _Reader:
    """Typed lookups that record problems instead of raising on the first one."""

    def __init__(self, parser: configparser.ConfigParser):
        self.p = parser
        self.problems: List[str] = []

    def raw(self, section, key):
        if self.p.has_section(section) and self.p.has_option(section, key):
            value = self.p.get(section, key).strip()
            return value if value else None
        return None

    def _convert(self, section, key, default, conv, what):
        value = self.raw(section, key)
        if value is None:
            return default
        try:
            return conv(value)
        except (ValueError, TypeError):
            self.problems.append(f"[{section}] {key}: expected {what}, got {value!r}")
            return default

    def int(self, section, key, default):
        return self._convert(section, key, default, int, "an integer")

    def float(self, section, key, default):
        return self._convert(section, key, default, float, "a number")

    def floats(self, section, key, default):
        return self._convert(section, key, default, lambda v: tuple(float(x) for x in v.split(",")),
                             "comma-separated numbers")

    def bool(self, section, key, default):
        def conv(v):
            if v.lower() in TRUE:
                return True
            if v.lower() in FALSE:
                return False
            raise ValueError(v)
        return self._convert(section, key, default, conv, "true/false")


def _point(text: str) -> GeoPoint:
    x, y = (float(v) for v in text.split(","))
    return GeoPoint(x, y)


def parse_config(text: str, base_dir: str = ".", overrides: Iterable[str] = ()) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from config text.

    ``overrides`` are ``section.key=value`` strings applied on top of the text.
    Raises :class:`ConfigError` listing every problem found.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"unparseable config: {exc}"]) from None
    problems = []
    for item in overrides:
        target, sep, value = item.partition("=")
        section, dot, key = target.strip().partition(".")
        if not sep or not dot:
            problems.append(f"override {item!r} is not section.key=value")
            continue
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())

    r = _Reader(parser)
    d = FleetSpec()
    fleet = FleetSpec(
        hosts=r.int("fleet", "hosts", d.hosts),
        host_mips=r.floats("fleet", "host_mips", d.host_mips),
        host_memory_mb=r.float("fleet", "host_memory_mb", d.host_memory_mb),
        host_storage_gb=r.float("fleet", "host_storage_gb", d.host_storage_gb),
        resources_per_host=r.int("fleet", "resources_per_host", d.resources_per_host),
        vm_memory_mb=r.float("fleet", "vm_memory_mb", d.vm_memory_mb),
        vm_storage_mb=r.float("fleet", "vm_storage_mb", d.vm_storage_mb),
        vm_bandwidth=r.floats("fleet", "vm_bandwidth", d.vm_bandwidth),
    )

    config = ScenarioConfig(fleet=fleet)

    if parser.has_section("datacenters"):
        dcs = []
        for key, value in parser.items("datacenters"):
            try:
                dcs.append((key, _point(value)))
            except ValueError:
                problems.append(f"[datacenters] {key}: expected 'x, y', got {value!r}")
        config = replace(config, datacenters=tuple(dcs))

    if parser.has_section("users"):
        users = []
        for key, value in parser.items("users"):
            parts = [p.strip() for p in value.split(",")]
            try:
                cls = UserClass.parse(parts[2]) if len(parts) > 2 else UserClass.CASUAL
                users.append(CloudUser(key, GeoPoint(float(parts[0]), float(parts[1])), cls))
            except (ValueError, IndexError) as exc:
                problems.append(f"[users] {key}: {exc}")
        config = replace(config, users=tuple(users))

    matrix = DecisionMatrix()
    if parser.has_section("criteria"):
        criteria = []
        for key, value in parser.items("criteria"):
            try:
                criteria.append((key, float(value)))
            except ValueError:
                problems.append(f"[criteria] {key}: expected a number, got {value!r}")
        matrix = replace(matrix, criteria=tuple(criteria))
    if parser.has_section("priorities"):
        table = dict(DEFAULT_PRIORITIES)
        for key, value in parser.items("priorities"):
            try:
                table[UserClass.parse(key)] = int(value)
            except ValueError as exc:
                problems.append(f"[priorities] {key}: {exc}")
        matrix = replace(matrix, priority_table=table)

    classes: Tuple[UserClass, ...] = tuple(UserClass)
    if r.raw("valuation", "classes"):
        try:
            classes = tuple(UserClass.parse(c) for c in r.raw("valuation", "classes").split(","))
        except ValueError as exc:
            problems.append(f"[valuation] classes: {exc}")
    valuation = ValuationSpec(mode=(r.raw("valuation", "mode") or "matrix").lower(), matrix=matrix,
                              classes=classes, values=r.floats("valuation", "values", ()))

    w = WorkloadSpec()
    workload = WorkloadSpec(
        task_count=r.int("workload", "task_count", w.task_count),
        arrival_interval_ms=r.float("workload", "arrival_interval_ms", w.arrival_interval_ms),
        min_mi=r.float("workload", "min_mi", w.min_mi),
        max_mi=r.float("workload", "max_mi", w.max_mi),
        min_demand_mips=r.float("workload", "min_demand_mips", w.min_demand_mips),
        max_demand_mips=r.float("workload", "max_demand_mips", w.max_demand_mips),
    )

    scheduler = config.scheduler
    if r.raw("run", "scheduler"):
        try:
            scheduler = SchedulerKind.parse(r.raw("run", "scheduler"))
        except ValueError as exc:
            problems.append(str(exc))
    seed = r.int("run", "seed", 0)

    config = replace(config, valuation=valuation, workload=workload, scheduler=scheduler, seed=seed,
                     replenish=r.bool("run", "replenish", False),
                     max_wait_ms=r.float("run", "max_wait_ms", None),
                     horizon_ms=r.float("run", "horizon_ms", None))

    source = (r.raw("workload", "source") or "synthetic").lower()
    if source == "trace":
        path = r.raw("workload", "trace")
        if path is None:
            problems.append("[workload] trace path required when source = trace")
        else:
            path = os.path.join(base_dir, path)
            with open(path, encoding="utf-8") as fh:
                try:
                    parsed = parse_rows(fh)
                except TraceError as exc:
                    raise ConfigError([str(exc)]) from None
            spec = MappingSpec(workload.min_mi, workload.max_mi, workload.min_demand_mips,
                               workload.max_demand_mips, r.float("workload", "time_scale", 1.0),
                               tuple(u.id for u in config.users), seed)
            config = replace(config, tasks=tuple(to_workload(parsed.rows, spec)))
    elif source == "tasks":
        tasks = []
        for key, value in parser.items("tasks") if parser.has_section("tasks") else []:
            parts = [p.strip() for p in value.split(",")]
            try:
                tasks.append(Task(key, float(parts[0]), float(parts[1]),
                                  float(parts[2]) if len(parts) > 2 else 0.0,
                                  parts[3] if len(parts) > 3 and parts[3] else None))
            except (ValueError, IndexError):
                problems.append(f"[tasks] {key}: expected 'length_mi, demand_mips[, arrival_ms[, user]]'")
        config = replace(config, tasks=tuple(tasks))
    elif source != "synthetic":
        problems.append(f"[workload] source must be synthetic, trace or tasks, got {source!r}")

    problems = r.problems + problems + config.violations()
    if problems:
        raise ConfigError(problems)
    return config


def load_config(path: Optional[str], overrides: Iterable[str] = ()) -> ScenarioConfig:
    if path is None:
        return parse_config("", overrides=overrides)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path)), overrides)
