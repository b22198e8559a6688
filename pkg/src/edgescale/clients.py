"""Reader/actuator adapters the decision engine polls through.

The in-process pair binds directly to the runtime and orchestrator objects
(the default wiring inside the harness). The HTTP pair speaks the documented
wire formats, for running the engine against remote listeners and for
exercising the full two-tier API path in tests. Both normalize failures to
LocationUnavailable / ScaleRejected, which is all the engine handles.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request

from .engine import ZoneSample
from .errors import (
    DeploymentNotFound,
    LocationUnavailable,
    OutOfBoundsError,
    ScaleRejected,
    SnapshotUnavailable,
    UnknownZoneError,
)
from .location_api import SIM_TIME_HEADER
from .orchestrator import Orchestrator, ScaleEvent
from .runtime import SandboxRuntime


class InProcessLocationReader:
    def __init__(self, runtime: SandboxRuntime):
        self._runtime = runtime

    def zone_status(self, zone_id: str) -> ZoneSample:
        try:
            snapshot = self._runtime.require_snapshot()
            count = snapshot.zone_user_count(zone_id)
        except (SnapshotUnavailable, UnknownZoneError) as exc:
            raise LocationUnavailable(str(exc)) from exc
        return ZoneSample(sim_time_s=snapshot.sim_time_s, zone_id=zone_id, count=count)


class InProcessScaleActuator:
    def __init__(self, orchestrator: Orchestrator):
        self._orchestrator = orchestrator

    def set_scale(self, namespace: str, name: str, replicas: int, reason: str) -> ScaleEvent | None:
        try:
            return self._orchestrator.set_scale(namespace, name, replicas, reason)
        except (OutOfBoundsError, DeploymentNotFound) as exc:
            raise ScaleRejected(str(exc)) from exc

    def get_scale(self, namespace: str, name: str) -> tuple[int, int]:
        try:
            return self._orchestrator.get_scale(namespace, name)
        except DeploymentNotFound as exc:
            raise ScaleRejected(str(exc)) from exc


def _http_json(request: urllib.request.Request, timeout: float):
    with urllib.request.urlopen(request, timeout=timeout) as response:
        return json.loads(response.read()), dict(response.headers)


class HttpLocationReader:
    def __init__(self, base_url: str, timeout_s: float = 5.0):
        self._base_url = base_url.rstrip("/")
        self._timeout_s = timeout_s

    def zone_status(self, zone_id: str) -> ZoneSample:
        url = f"{self._base_url}/location/v2/queries/zones/{zone_id}"
        try:
            body, headers = _http_json(urllib.request.Request(url), self._timeout_s)
            sim_time = float(headers[SIM_TIME_HEADER])
            count = int(body["numberOfUsers"])
        except (urllib.error.URLError, OSError, KeyError, ValueError) as exc:
            raise LocationUnavailable(f"GET {url} failed: {exc}") from exc
        return ZoneSample(sim_time_s=sim_time, zone_id=zone_id, count=count)


class HttpScaleActuator:
    def __init__(self, base_url: str, timeout_s: float = 5.0):
        self._base_url = base_url.rstrip("/")
        self._timeout_s = timeout_s

    def _scale_url(self, namespace: str, name: str) -> str:
        return f"{self._base_url}/apis/apps/v1/namespaces/{namespace}/deployments/{name}/scale"

    def set_scale(self, namespace: str, name: str, replicas: int, reason: str) -> ScaleEvent | None:
        payload = json.dumps({"spec": {"replicas": replicas}, "reason": reason}).encode()
        request = urllib.request.Request(
            self._scale_url(namespace, name),
            data=payload,
            method="PUT",
            headers={"Content-Type": "application/json"},
        )
        try:
            body, _ = _http_json(request, self._timeout_s)
        except (urllib.error.URLError, OSError) as exc:
            raise ScaleRejected(f"PUT scale failed: {exc}") from exc
        event = body.get("event")
        return None if event is None else ScaleEvent.from_json(event)

    def get_scale(self, namespace: str, name: str) -> tuple[int, int]:
        request = urllib.request.Request(self._scale_url(namespace, name))
        try:
            body, _ = _http_json(request, self._timeout_s)
        except (urllib.error.URLError, OSError) as exc:
            raise ScaleRejected(f"GET scale failed: {exc}") from exc
        return int(body["spec"]["replicas"]), int(body["status"]["replicas"])
