"""Threshold scaling engine.

Polls the monitored zone's occupancy, keeps a sliding window of samples,
maps the window average to a desired replica count, and drives the
orchestrator. The policy is a pure function so alternatives can be swapped
in, but only the threshold policy ships:

    desired = clamp(ceil(avg / gamma), min_replicas, max_replicas)

With gamma=3 and bounds [1, 2] that reproduces the binary behaviour: one
replica while the average stays at or below the threshold, two once it
exceeds it. An average strictly above k*gamma bumps the level to k+1.

Engine timestamps and the cooldown are measured in simulation seconds
delivered with each sample, never wall clock, so accelerated headless runs
and paced live runs behave identically.
"""

from __future__ import annotations

import json
import logging
import math
import threading
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Protocol

from .errors import (
    ConfigError,
    EmptyWindowError,
    LocationUnavailable,
    ScaleRejected,
)
from .orchestrator import ScaleEvent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    monitored_zone: str = "zone3"
    poll_period_s: float = 5.0
    window_size: int = 6
    gamma: float = 3.0
    min_replicas: int = 1
    max_replicas: int = 2
    cooldown_s: float = 0.0
    target_namespace: str = "default"
    target_deployment: str = "vod"


def validate_engine_config(config: EngineConfig) -> None:
    if config.poll_period_s <= 0:
        raise ConfigError("poll_period_s must be positive")
    if config.window_size < 1:
        raise ConfigError("window_size must be at least 1")
    if config.gamma <= 0:
        raise ConfigError("gamma must be positive")
    if config.min_replicas < 1:
        raise ConfigError("min_replicas must be at least 1")
    if config.max_replicas < config.min_replicas:
        raise ConfigError("max_replicas must be >= min_replicas")
    if config.cooldown_s < 0:
        raise ConfigError("cooldown_s must be non-negative")


@dataclass(frozen=True)
class ZoneSample:
    sim_time_s: float
    zone_id: str
    count: int


def window_average(samples) -> float:
    """Arithmetic mean of the sample counts currently in the window."""
    values = [s.count for s in samples]
    if not values:
        raise EmptyWindowError("window holds no samples")
    return sum(values) / len(values)


def desired_replicas(avg: float, config: EngineConfig) -> int:
    """Threshold policy: clamp(ceil(avg / gamma), min, max)."""
    level = math.ceil(avg / config.gamma)
    return min(max(level, config.min_replicas), config.max_replicas)


class LocationReader(Protocol):
    def zone_status(self, zone_id: str) -> ZoneSample:
        """Occupancy of one zone; raises LocationUnavailable on failure."""
        ...


class ScaleActuator(Protocol):
    def set_scale(self, namespace: str, name: str, replicas: int, reason: str) -> ScaleEvent | None:
        """Apply a scale request; raises ScaleRejected on refusal."""
        ...

    def get_scale(self, namespace: str, name: str) -> tuple[int, int]:
        ...


@dataclass(frozen=True)
class EngineMetrics:
    """Immutable metrics snapshot swapped in after every control step."""

    zone: str
    gamma: float
    avg_users: float | None = None
    zone_users: int | None = None
    desired_replicas: int | None = None
    ready_replicas: int | None = None
    scale_actions_total: int = 0
    poll_failures_total: int = 0
    last_poll_sim_time_s: float | None = None


class DecisionEngine:
    def __init__(
        self,
        config: EngineConfig,
        location: LocationReader,
        actuator: ScaleActuator,
        action_log_path: str | Path | None = None,
    ):
        validate_engine_config(config)
        self._config = config
        self._location = location
        self._actuator = actuator
        self._window: deque[ZoneSample] = deque(maxlen=config.window_size)
        self._last_commanded: int | None = None
        self._last_action_time_s = -math.inf
        self._scale_actions_total = 0
        self._poll_failures_total = 0
        self._lock = threading.Lock()
        self._metrics = EngineMetrics(zone=config.monitored_zone, gamma=config.gamma)
        self._sink: IO[str] | None = None
        if action_log_path is not None:
            self._sink = open(action_log_path, "w", encoding="utf-8")

    def close(self) -> None:
        if self._sink is not None:
            self._sink.close()
            self._sink = None

    @property
    def config(self) -> EngineConfig:
        return self._config

    @property
    def metrics(self) -> EngineMetrics:
        return self._metrics

    def update_config(self, **changes) -> EngineConfig:
        """Apply a config patch atomically between control steps."""
        with self._lock:
            updated = replace(self._config, **changes)
            validate_engine_config(updated)
            if updated.window_size != self._config.window_size:
                kept = list(self._window)[-updated.window_size:]
                self._window = deque(kept, maxlen=updated.window_size)
            self._config = updated
            self._metrics = replace(self._metrics, zone=updated.monitored_zone, gamma=updated.gamma)
            return updated

    def step(self) -> ScaleEvent | None:
        """One control step; issues at most one scale call.

        A failed poll leaves the window untouched and only bumps the
        failure counter. An orchestrator rejection keeps the previous
        commanded value so the request is retried next step.
        """
        with self._lock:
            config = self._config
            try:
                sample = self._location.zone_status(config.monitored_zone)
            except LocationUnavailable as exc:
                self._poll_failures_total += 1
                self._metrics = replace(self._metrics, poll_failures_total=self._poll_failures_total)
                logger.warning("poll failed, skipping step: %s", exc)
                return None

            self._window.append(sample)
            avg = window_average(self._window)
            desired = desired_replicas(avg, config)

            event: ScaleEvent | None = None
            if desired != self._last_commanded and (
                sample.sim_time_s >= self._last_action_time_s + config.cooldown_s
            ):
                reason = f"avg={avg:g} gamma={config.gamma:g}"
                try:
                    event = self._actuator.set_scale(
                        config.target_namespace, config.target_deployment, desired, reason
                    )
                except ScaleRejected as exc:
                    logger.warning("scale request rejected, will retry: %s", exc)
                    event = None
                else:
                    self._last_commanded = desired
                    if event is not None:
                        self._scale_actions_total += 1
                        self._last_action_time_s = sample.sim_time_s
                        if self._sink is not None:
                            self._sink.write(json.dumps(event.to_json()) + "\n")
                            self._sink.flush()

            ready: int | None = self._metrics.ready_replicas
            try:
                _, ready = self._actuator.get_scale(config.target_namespace, config.target_deployment)
            except ScaleRejected:
                pass

            self._metrics = EngineMetrics(
                zone=config.monitored_zone,
                gamma=config.gamma,
                avg_users=avg,
                zone_users=sample.count,
                desired_replicas=desired,
                ready_replicas=ready,
                scale_actions_total=self._scale_actions_total,
                poll_failures_total=self._poll_failures_total,
                last_poll_sim_time_s=sample.sim_time_s,
            )
            return event


def _escape_label(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _fmt(value) -> str:
    if isinstance(value, bool):  # guard: bool is an int subclass
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def render_metrics(metrics: EngineMetrics) -> str:
    """Prometheus text exposition (format 0.0.4), deterministic line order.

    Sample-derived gauges are omitted until the first successful poll;
    counters and the gamma gauge are always present.
    """
    zone_label = f'{{zone="{_escape_label(metrics.zone)}"}}'
    lines: list[str] = []

    def gauge(name: str, help_text: str, value, labels: str = "") -> None:
        lines.append(f"# HELP {name} {help_text}")
        lines.append(f"# TYPE {name} gauge")
        lines.append(f"{name}{labels} {_fmt(value)}")

    if metrics.avg_users is not None:
        gauge("de_avg_users", "Sliding-window average user count of the monitored zone.",
              metrics.avg_users, zone_label)
    if metrics.zone_users is not None:
        gauge("de_zone_users", "Raw user count of the monitored zone at the last poll.",
              metrics.zone_users, zone_label)
    if metrics.desired_replicas is not None:
        gauge("de_replicas_desired", "Replica count last derived from the scaling policy.",
              metrics.desired_replicas)
    if metrics.ready_replicas is not None:
        gauge("de_replicas_ready", "Ready replica count reported by the orchestrator.",
              metrics.ready_replicas)
    gauge("de_gamma", "Occupancy threshold of the scaling policy.", metrics.gamma)

    lines.append("# HELP de_scale_actions_total Scale actions issued since engine start.")
    lines.append("# TYPE de_scale_actions_total counter")
    lines.append(f"de_scale_actions_total {_fmt(metrics.scale_actions_total)}")
    lines.append("# HELP de_poll_failures_total Polls that failed since engine start.")
    lines.append("# TYPE de_poll_failures_total counter")
    lines.append(f"de_poll_failures_total {_fmt(metrics.poll_failures_total)}")

    if metrics.last_poll_sim_time_s is not None:
        gauge("de_last_poll_sim_time_s", "Simulation time of the last successful poll.",
              metrics.last_poll_sim_time_s)
    return "\n".join(lines) + "\n"
