"""Run harness: builds the full system and drives headless or live runs.

One process hosts everything: the simulator behind its runtime, the
location/sandbox listener, the orchestrator listener, and the decision
engine. The engine's poll schedule is expressed in ticks, so a headless
run (as fast as possible) and a live run (wall-clock paced) execute the
identical control sequence for the same config and seed.
"""

from __future__ import annotations

import logging
import signal
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .clients import InProcessLocationReader, InProcessScaleActuator
from .engine import DecisionEngine, EngineConfig, validate_engine_config
from .errors import ConfigError, ScenarioError
from .httpd import ApiServer
from .location_api import SandboxApi, build_sandbox_routes
from .orchestrator import Deployment, Orchestrator, build_orchestrator_routes
from .report import SampleRow, build_summary, render_figures, write_series, write_summary
from .runtime import SandboxRuntime
from .scenario import (
    ScenarioConfig,
    default_scenario,
    load_scenario_file,
    scenario_from_mapping,
)
from .simulator import Simulator

logger = logging.getLogger(__name__)

ORCH_EVENTS_FILE = "orchestrator_events.jsonl"
DE_ACTIONS_FILE = "de_actions.jsonl"
SERIES_FILE = "series.csv"
SUMMARY_FILE = "summary.json"


@dataclass(frozen=True)
class DeploymentSpec:
    namespace: str = "default"
    name: str = "vod"
    initial_replicas: int = 1
    readiness_latency_s: float = 5.0
    min_replicas: int = 1
    max_replicas: int = 10


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig
    engine: EngineConfig = EngineConfig()
    deployment: DeploymentSpec = DeploymentSpec()
    duration_ticks: int = 600
    location_listen: str = "127.0.0.1:8091"
    orchestrator_listen: str = "127.0.0.1:8092"
    output_dir: Path = Path("out")
    dashboard_dir: Path | None = None
    figures: bool = True


def parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen address {value!r} must be host:port")
    try:
        return host, int(port)
    except ValueError:
        raise ConfigError(f"listen address {value!r} has a non-numeric port") from None


def validate_run_config(config: RunConfig) -> None:
    if config.duration_ticks < 1:
        raise ConfigError("duration_ticks must be at least 1")
    loc = parse_listen(config.location_listen)
    orch = parse_listen(config.orchestrator_listen)
    if loc == orch and loc[1] != 0:
        raise ConfigError("location and orchestrator listen addresses must be distinct")
    validate_engine_config(config.engine)
    dep = config.deployment
    if not (0 <= dep.min_replicas <= dep.initial_replicas <= dep.max_replicas):
        raise ConfigError(
            f"deployment replicas must satisfy 0 <= min <= initial <= max, "
            f"got min={dep.min_replicas} initial={dep.initial_replicas} max={dep.max_replicas}"
        )
    if dep.readiness_latency_s < 0:
        raise ConfigError("readiness_latency_s must be non-negative")
    if (config.engine.target_namespace, config.engine.target_deployment) != (dep.namespace, dep.name):
        raise ConfigError(
            f"decision_engine targets {config.engine.target_namespace}/{config.engine.target_deployment} "
            f"but the deployment is {dep.namespace}/{dep.name}"
        )
    if config.engine.monitored_zone not in config.scenario.zone_ids():
        raise ConfigError(f"monitored zone {config.engine.monitored_zone!r} not in scenario")


def _section(raw: dict, key: str) -> dict:
    value = raw.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"run config section {key!r} must be a mapping")
    return dict(value)


def _take(section: dict, key: str, cast, default):
    if key not in section:
        return default
    value = section.pop(key)
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key!r}: {value!r}") from None


def load_run_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Parse a run config file and apply flag/env overrides on top."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("run config must be a YAML mapping")

    scenario_ref = raw.get("scenario")
    if scenario_ref is None:
        scenario = default_scenario()
    elif isinstance(scenario_ref, str):
        scenario_path = Path(scenario_ref)
        if not scenario_path.is_absolute():
            scenario_path = path.parent / scenario_path
        try:
            scenario = load_scenario_file(scenario_path)
        except OSError as exc:
            raise ConfigError(f"cannot read scenario file: {exc}") from exc
    elif isinstance(scenario_ref, dict):
        scenario = scenario_from_mapping(scenario_ref)
    else:
        raise ConfigError("'scenario' must be a path or an inline mapping")

    de = _section(raw, "decision_engine")
    engine = EngineConfig(
        monitored_zone=_take(de, "monitored_zone", str, "zone3"),
        poll_period_s=_take(de, "poll_period_s", float, 5.0),
        window_size=_take(de, "window_size", int, 6),
        gamma=_take(de, "gamma", float, 3.0),
        min_replicas=_take(de, "min_replicas", int, 1),
        max_replicas=_take(de, "max_replicas", int, 2),
        cooldown_s=_take(de, "cooldown_s", float, 0.0),
        target_namespace=_take(de, "target_namespace", str, "default"),
        target_deployment=_take(de, "target_deployment", str, "vod"),
    )
    if de:
        raise ConfigError(f"unknown decision_engine keys: {sorted(de)}")

    dep_raw = _section(raw, "deployment")
    deployment = DeploymentSpec(
        namespace=_take(dep_raw, "namespace", str, "default"),
        name=_take(dep_raw, "name", str, "vod"),
        initial_replicas=_take(dep_raw, "initial_replicas", int, 1),
        readiness_latency_s=_take(dep_raw, "readiness_latency_s", float, 5.0),
        min_replicas=_take(dep_raw, "min_replicas", int, 1),
        max_replicas=_take(dep_raw, "max_replicas", int, 10),
    )
    if dep_raw:
        raise ConfigError(f"unknown deployment keys: {sorted(dep_raw)}")

    run_raw = _section(raw, "run")
    config = RunConfig(
        scenario=scenario,
        engine=engine,
        deployment=deployment,
        duration_ticks=_take(run_raw, "duration_ticks", int, 600),
        location_listen=_take(run_raw, "location_listen", str, "127.0.0.1:8091"),
        orchestrator_listen=_take(run_raw, "orchestrator_listen", str, "127.0.0.1:8092"),
        output_dir=Path(_take(run_raw, "output_dir", str, "out")),
        dashboard_dir=(lambda d: Path(d) if d else None)(_take(run_raw, "dashboard_dir", str, "")),
        figures=_take(run_raw, "figures", bool, True),
    )
    if run_raw:
        raise ConfigError(f"unknown run keys: {sorted(run_raw)}")

    config = apply_overrides(config, overrides or {})
    validate_run_config(config)
    return config


def apply_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    scenario = config.scenario
    engine = config.engine
    if "seed" in overrides:
        scenario = replace(scenario, seed=int(overrides["seed"]))
    engine_keys = {
        "zone": ("monitored_zone", str),
        "poll_period": ("poll_period_s", float),
        "window": ("window_size", int),
        "gamma": ("gamma", float),
        "min_replicas": ("min_replicas", int),
        "max_replicas": ("max_replicas", int),
        "cooldown": ("cooldown_s", float),
    }
    changes = {}
    for key, (field_name, cast) in engine_keys.items():
        if key in overrides:
            try:
                changes[field_name] = cast(overrides[key])
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for --{key.replace('_', '-')}: {overrides[key]!r}") from None
    if "target" in overrides:
        target = str(overrides["target"])
        namespace, sep, name = target.partition("/")
        if not sep or not namespace or not name:
            raise ConfigError(f"--target must be namespace/name, got {target!r}")
        changes["target_namespace"] = namespace
        changes["target_deployment"] = name
    if changes:
        engine = replace(engine, **changes)
    config = replace(config, scenario=scenario, engine=engine)
    if "ticks" in overrides:
        config = replace(config, duration_ticks=int(overrides["ticks"]))
    if "out" in overrides:
        config = replace(config, output_dir=Path(overrides["out"]))
    if "location_listen" in overrides:
        config = replace(config, location_listen=str(overrides["location_listen"]))
    if "orchestrator_listen" in overrides:
        config = replace(config, orchestrator_listen=str(overrides["orchestrator_listen"]))
    if "dashboard_dir" in overrides:
        config = replace(config, dashboard_dir=Path(overrides["dashboard_dir"]))
    if "figures" in overrides:
        config = replace(config, figures=bool(overrides["figures"]))
    return config


@dataclass
class System:
    """All live objects of one run, wired together."""

    config: RunConfig
    runtime: SandboxRuntime
    orchestrator: Orchestrator
    engine: DecisionEngine
    api: SandboxApi

    def close(self) -> None:
        self.orchestrator.close()
        self.engine.close()


def build_system(config: RunConfig, out_dir: Path | None = None) -> System:
    validate_run_config(config)
    simulator = Simulator(config.scenario)
    runtime = SandboxRuntime(simulator, scenarios={"default": default_scenario(seed=config.scenario.seed)})
    runtime.publish()
    orch_log = out_dir / ORCH_EVENTS_FILE if out_dir else None
    orchestrator = Orchestrator(clock=lambda: runtime.sim_time_s, event_log_path=orch_log)
    dep = config.deployment
    orchestrator.add_deployment(
        Deployment(
            namespace=dep.namespace,
            name=dep.name,
            desired_replicas=dep.initial_replicas,
            readiness_latency_s=dep.readiness_latency_s,
            min_replicas=dep.min_replicas,
            max_replicas=dep.max_replicas,
        )
    )
    de_log = out_dir / DE_ACTIONS_FILE if out_dir else None
    engine = DecisionEngine(
        config.engine,
        InProcessLocationReader(runtime),
        InProcessScaleActuator(orchestrator),
        action_log_path=de_log,
    )
    api = SandboxApi(runtime, engine)
    return System(config=config, runtime=runtime, orchestrator=orchestrator, engine=engine, api=api)


def poll_every_ticks(engine_config: EngineConfig, tick_s: float) -> int:
    return max(1, round(engine_config.poll_period_s / tick_s))


@dataclass
class RunReport:
    out_dir: Path
    rows: list[SampleRow]
    summary: dict
    series_path: Path
    figure_paths: list[Path] = field(default_factory=list)


def run_headless(config: RunConfig) -> RunReport:
    """Execute duration_ticks as fast as possible and write the artifacts."""
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    system = build_system(config, out_dir=out_dir)
    tick_s = config.scenario.tick_s
    cadence = poll_every_ticks(config.engine, tick_s)
    rows: list[SampleRow] = []
    try:
        for tick in range(1, config.duration_ticks + 1):
            system.runtime.advance()
            if tick % cadence == 0:
                system.engine.step()
                m = system.engine.metrics
                if m.last_poll_sim_time_s is not None and m.last_poll_sim_time_s == system.runtime.sim_time_s:
                    rows.append(
                        SampleRow(
                            sim_time_s=m.last_poll_sim_time_s,
                            zone_users=m.zone_users,
                            window_avg=m.avg_users,
                            desired_replicas=m.desired_replicas,
                            ready_replicas=m.ready_replicas,
                        )
                    )
    finally:
        system.close()

    series_path = out_dir / SERIES_FILE
    write_series(rows, series_path)
    events = system.orchestrator.list_events()
    summary = build_summary(
        rows,
        events,
        initial_replicas=config.deployment.initial_replicas,
        duration_s=config.duration_ticks * tick_s,
        seed=config.scenario.seed,
        ticks=config.duration_ticks,
    )
    write_summary(summary, out_dir / SUMMARY_FILE)
    figure_paths: list[Path] = []
    if config.figures:
        figure_paths = render_figures(rows, events, config.engine.gamma, config.engine.monitored_zone, out_dir)
    logger.info(
        "headless run done: %d ticks, %d samples, %d scale actions",
        config.duration_ticks, len(rows), summary["scale_actions"],
    )
    return RunReport(out_dir=out_dir, rows=rows, summary=summary,
                     series_path=series_path, figure_paths=figure_paths)


class LiveRun:
    """Wall-clock paced run serving all HTTP endpoints until stopped."""

    def __init__(self, config: RunConfig):
        validate_run_config(config)
        self.config = config
        config.output_dir.mkdir(parents=True, exist_ok=True)
        self.system = build_system(config, out_dir=config.output_dir)
        loc_host, loc_port = parse_listen(config.location_listen)
        orch_host, orch_port = parse_listen(config.orchestrator_listen)
        static_dir = config.dashboard_dir if config.dashboard_dir and config.dashboard_dir.is_dir() else None
        if config.dashboard_dir and static_dir is None:
            logger.warning("dashboard dir %s not found, serving landing page", config.dashboard_dir)
        self.sandbox_server = ApiServer(
            loc_host, loc_port,
            build_sandbox_routes(self.system.api, serve_landing_page=static_dir is None),
            static_dir=static_dir,
        )
        self.orchestrator_server = ApiServer(
            orch_host, orch_port, build_orchestrator_routes(self.system.orchestrator)
        )

    def start(self) -> None:
        self.sandbox_server.start()
        self.orchestrator_server.start()
        self.system.runtime.agent_attached = True
        logger.info(
            "live run: sandbox on %s, orchestrator on %s",
            self.sandbox_server.base_url, self.orchestrator_server.base_url,
        )

    def loop(self, stop: threading.Event, max_ticks: int | None = None) -> None:
        tick_s = self.config.scenario.tick_s
        next_deadline = time.monotonic()
        tick = 0
        while not stop.is_set():
            next_deadline += tick_s
            delay = next_deadline - time.monotonic()
            if delay > 0 and stop.wait(delay):
                break
            tick += 1
            self.system.runtime.advance()
            if tick % poll_every_ticks(self.system.engine.config, tick_s) == 0:
                self.system.engine.step()
            if max_ticks is not None and tick >= max_ticks:
                break

    def shutdown(self) -> None:
        self.system.runtime.agent_attached = False
        self.sandbox_server.stop()
        self.orchestrator_server.stop()
        self.system.close()


def run_live(config: RunConfig, stop: threading.Event | None = None, max_ticks: int | None = None) -> None:
    live = LiveRun(config)
    if stop is None:
        stop = threading.Event()
        for sig in (signal.SIGINT, signal.SIGTERM):
            signal.signal(sig, lambda *_: stop.set())
    live.start()
    try:
        live.loop(stop, max_ticks=max_ticks)
    finally:
        live.shutdown()
        logger.info("live run stopped, logs flushed to %s", config.output_dir)
