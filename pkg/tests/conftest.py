"""Shared fixtures: scripted engine doubles and a live HTTP stack."""

from __future__ import annotations

import pytest

from edgescale.engine import ZoneSample
from edgescale.errors import LocationUnavailable, ScaleRejected
from edgescale.orchestrator import ScaleEvent


class ScriptedReader:
    """LocationReader double replaying a scripted count sequence.

    Each poll consumes the next count and advances sim time by
    ``period_s``. A count of None simulates an unreachable location API.
    """

    def __init__(self, counts, zone_id="zone3", period_s=5.0, start_s=0.0):
        self.counts = list(counts)
        self.zone_id = zone_id
        self.period_s = period_s
        self.next_time_s = start_s
        self.last_time_s = start_s
        self.polls = 0

    def zone_status(self, zone_id: str) -> ZoneSample:
        if not self.counts:
            raise AssertionError("script exhausted")
        count = self.counts.pop(0)
        t = self.next_time_s
        self.next_time_s += self.period_s
        self.last_time_s = t
        self.polls += 1
        if count is None:
            raise LocationUnavailable("scripted outage")
        return ZoneSample(sim_time_s=t, zone_id=zone_id, count=count)


class RecordingActuator:
    """ScaleActuator double tracking every set_scale call."""

    def __init__(self, initial=1, reject_times=0, clock=None):
        self.replicas = initial
        self.calls: list[int] = []
        self.events: list[ScaleEvent] = []
        self.reject_times = reject_times
        self.clock = clock or (lambda: 0.0)

    def set_scale(self, namespace, name, replicas, reason):
        self.calls.append(replicas)
        if self.reject_times > 0:
            self.reject_times -= 1
            raise ScaleRejected("scripted rejection")
        if replicas == self.replicas:
            return None
        event = ScaleEvent(
            timestamp=self.clock(),
            deployment=f"{namespace}/{name}",
            from_replicas=self.replicas,
            to_replicas=replicas,
            reason=reason,
        )
        self.replicas = replicas
        self.events.append(event)
        return event

    def get_scale(self, namespace, name):
        return self.replicas, self.replicas


@pytest.fixture
def live_stack(tmp_path):
    """Full system behind two HTTP servers on ephemeral ports.

    The tick agent is NOT running: tests advance time explicitly through
    ``stack.runtime.advance()`` for deterministic wire-level assertions.
    Steer requests are drained synchronously (agent_attached stays False).
    """
    from pathlib import Path

    from edgescale.harness import LiveRun, load_run_config

    config = load_run_config(
        Path(__file__).resolve().parent.parent / "configs" / "experiment.yaml",
        {
            "out": str(tmp_path / "out"),
            "location_listen": "127.0.0.1:0",
            "orchestrator_listen": "127.0.0.1:0",
        },
    )
    live = LiveRun(config)
    live.sandbox_server.start()
    live.orchestrator_server.start()
    try:
        yield live
    finally:
        live.sandbox_server.stop()
        live.orchestrator_server.stop()
        live.system.close()
