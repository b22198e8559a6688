"""Mock orchestration backend with Kubernetes-style scale semantics.

Tracks named deployments with desired vs. ready replica counts. Downscales
take effect immediately; upscales report the previous ready count until the
readiness latency has elapsed. Every effective change is appended to an
ordered in-memory event log, optionally mirrored to a JSONL file (one event
object per line, flushed per write so interrupted runs never truncate).

All timestamps are simulation seconds supplied by the injected clock.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, IO

from .errors import DeploymentNotFound, OutOfBoundsError


@dataclass(frozen=True)
class ScaleEvent:
    timestamp: float
    deployment: str
    from_replicas: int
    to_replicas: int
    reason: str

    def to_json(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "deployment": self.deployment,
            "from_replicas": self.from_replicas,
            "to_replicas": self.to_replicas,
            "reason": self.reason,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "ScaleEvent":
        return cls(
            timestamp=float(raw["timestamp"]),
            deployment=str(raw["deployment"]),
            from_replicas=int(raw["from_replicas"]),
            to_replicas=int(raw["to_replicas"]),
            reason=str(raw["reason"]),
        )


@dataclass
class Deployment:
    namespace: str
    name: str
    desired_replicas: int = 1
    readiness_latency_s: float = 5.0
    min_replicas: int = 0
    max_replicas: int = 10
    # Ready count last materialised, and when the pending desired becomes ready.
    base_ready: int = -1
    ready_at_s: float = 0.0

    def __post_init__(self):
        if self.base_ready < 0:
            self.base_ready = self.desired_replicas

    def ready_replicas(self, now: float) -> int:
        return self.desired_replicas if now >= self.ready_at_s else self.base_ready


class Orchestrator:
    """Deployment registry; mutations serialized, reads lock-free safe."""

    def __init__(self, clock: Callable[[], float], event_log_path: str | Path | None = None):
        self._clock = clock
        self._deployments: dict[tuple[str, str], Deployment] = {}
        self._events: list[ScaleEvent] = []
        self._lock = threading.Lock()
        self._sink: IO[str] | None = None
        if event_log_path is not None:
            self._sink = open(event_log_path, "w", encoding="utf-8")

    def close(self) -> None:
        if self._sink is not None:
            self._sink.close()
            self._sink = None

    def add_deployment(self, deployment: Deployment) -> None:
        if not (deployment.min_replicas <= deployment.desired_replicas <= deployment.max_replicas):
            raise OutOfBoundsError(
                f"initial replicas {deployment.desired_replicas} outside "
                f"[{deployment.min_replicas}, {deployment.max_replicas}]"
            )
        self._deployments[(deployment.namespace, deployment.name)] = deployment

    def _get(self, namespace: str, name: str) -> Deployment:
        try:
            return self._deployments[(namespace, name)]
        except KeyError:
            raise DeploymentNotFound(f"deployment {namespace}/{name} not found") from None

    def get_scale(self, namespace: str, name: str) -> tuple[int, int]:
        """(desired, ready) at the current clock reading; pure read."""
        dep = self._get(namespace, name)
        return dep.desired_replicas, dep.ready_replicas(self._clock())

    def set_scale(self, namespace: str, name: str, replicas: int, reason: str = "") -> ScaleEvent | None:
        """Set desired replicas; returns the event, or None for a no-op."""
        with self._lock:
            dep = self._get(namespace, name)
            if replicas < dep.min_replicas:
                raise OutOfBoundsError(f"replicas {replicas} below min_replicas {dep.min_replicas}")
            if replicas > dep.max_replicas:
                raise OutOfBoundsError(f"replicas {replicas} above max_replicas {dep.max_replicas}")
            if replicas == dep.desired_replicas:
                return None
            now = self._clock()
            event = ScaleEvent(
                timestamp=now,
                deployment=dep.name,
                from_replicas=dep.desired_replicas,
                to_replicas=replicas,
                reason=reason,
            )
            ready = dep.ready_replicas(now)
            dep.desired_replicas = replicas
            if replicas <= ready:
                dep.base_ready = replicas
                dep.ready_at_s = now
            else:
                dep.base_ready = ready
                dep.ready_at_s = now + dep.readiness_latency_s
            self._events.append(event)
            if self._sink is not None:
                self._sink.write(json.dumps(event.to_json()) + "\n")
                self._sink.flush()
            return event

    def list_events(self, since: float | None = None) -> list[ScaleEvent]:
        """Events ordered by timestamp (append order); since is exclusive."""
        events = list(self._events)
        if since is not None:
            events = [e for e in events if e.timestamp > since]
        return events

    def event_count(self) -> int:
        return len(self._events)


def replay_events(initial_replicas: int, events: list[ScaleEvent]) -> int:
    """Reconstruct the desired count by replaying an event log."""
    replicas = initial_replicas
    for event in events:
        if event.from_replicas != replicas:
            raise ValueError(
                f"event at t={event.timestamp} expects from_replicas={event.from_replicas}, "
                f"replay state is {replicas}"
            )
        replicas = event.to_replicas
    return replicas


def build_orchestrator_routes(orchestrator: Orchestrator) -> list:
    """Kubernetes-scale-subresource flavored route table."""
    from .errors import ValidationError
    from .httpd import Request, Response

    scale_path = r"/apis/apps/v1/namespaces/([^/]+)/deployments/([^/]+)/scale"

    def scale_body(namespace: str, name: str, event: ScaleEvent | None = None, include_event: bool = False) -> dict:
        desired, ready = orchestrator.get_scale(namespace, name)
        body = {"spec": {"replicas": desired}, "status": {"replicas": ready}}
        if include_event:
            body["event"] = event.to_json() if event is not None else None
        return body

    def get_scale(request: Request) -> Response:
        namespace, name = request.params
        return Response(200, scale_body(namespace, name))

    def put_scale(request: Request) -> Response:
        namespace, name = request.params
        body = request.body
        if not isinstance(body, dict) or not isinstance(body.get("spec"), dict):
            raise ValidationError("body must be an object with a 'spec' object")
        replicas = body["spec"].get("replicas")
        if not isinstance(replicas, int) or isinstance(replicas, bool):
            raise ValidationError("'spec.replicas' must be an integer")
        reason = str(body.get("reason", ""))
        event = orchestrator.set_scale(namespace, name, replicas, reason)
        return Response(200, scale_body(namespace, name, event, include_event=True))

    def events(request: Request) -> Response:
        since = None
        if "since" in request.query:
            try:
                since = float(request.query["since"])
            except ValueError:
                raise ValidationError("'since' must be a number") from None
        return Response(200, {"events": [e.to_json() for e in orchestrator.list_events(since)]})

    return [
        ("GET", scale_path, get_scale),
        ("PUT", scale_path, put_scale),
        ("GET", r"/events", events),
    ]
