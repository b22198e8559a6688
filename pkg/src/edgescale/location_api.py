"""Location and sandbox API surface served over simulator snapshots.

The query endpoints are a read-only subset shaped after the MEC location
service (zones and users only); steering and the full-state dump live under
a separate /sandbox prefix so the query surface stays a faithful read-only
facade. Every location/sandbox response carries the snapshot's simulation
time in the X-Sim-Time-S header, keeping the documented JSON bodies exactly
the published schemas.
"""

from __future__ import annotations

from .engine import DecisionEngine, render_metrics
from .errors import UnknownZoneError, ValidationError
from .httpd import Request, Response, Route
from .runtime import SandboxRuntime, SteerCommand
from .simulator import Snapshot

SIM_TIME_HEADER = "X-Sim-Time-S"

# Engine config keys accepted by PATCH /config.
_PATCHABLE = {
    "monitored_zone": str,
    "poll_period_s": float,
    "window_size": int,
    "gamma": float,
    "min_replicas": int,
    "max_replicas": int,
    "cooldown_s": float,
    "target_namespace": str,
    "target_deployment": str,
}

STEER_WAIT_S = 15.0


def user_info(snapshot: Snapshot, user, zone_of: dict[str, str]) -> dict:
    return {
        "address": user.address,
        "accessPointId": user.association,
        "zoneId": zone_of[user.association],
        "timestamp": snapshot.sim_time_s,
    }


class SandboxApi:
    """Handler logic, independent of the HTTP plumbing for direct testing."""

    def __init__(self, runtime: SandboxRuntime, engine: DecisionEngine | None = None):
        self.runtime = runtime
        self.engine = engine

    # -- location queries --------------------------------------------

    def get_zones(self) -> list[dict]:
        snapshot = self.runtime.require_snapshot()
        counts = snapshot.zone_counts()
        return [
            {
                "zoneId": zone.zone_id,
                "numberOfAccessPoints": len(zone.ap_ids),
                "numberOfUsers": counts[zone.zone_id],
            }
            for zone in snapshot.config.zones
        ]

    def get_zone(self, zone_id: str) -> dict:
        snapshot = self.runtime.require_snapshot()
        for zone in snapshot.config.zones:
            if zone.zone_id == zone_id:
                return {
                    "zoneId": zone.zone_id,
                    "numberOfAccessPoints": len(zone.ap_ids),
                    "numberOfUsers": snapshot.zone_user_count(zone_id),
                }
        raise UnknownZoneError(f"unknown zone {zone_id!r}")

    def get_users(self, zone_id: str | None = None) -> list[dict]:
        snapshot = self.runtime.require_snapshot()
        if zone_id is not None and zone_id not in snapshot.config.zone_ids():
            raise UnknownZoneError(f"unknown zone {zone_id!r}")
        zone_of = {ap.ap_id: ap.zone_id for ap in snapshot.config.access_points}
        records = [
            user_info(snapshot, user, zone_of)
            for user in snapshot.users
            if user.association is not None
        ]
        if zone_id is not None:
            records = [r for r in records if r["zoneId"] == zone_id]
        return records

    # -- sandbox steering and state ------------------------------------

    def steer(self, raw_body: dict | None) -> dict:
        command = SteerCommand.from_mapping(raw_body)
        pending = self.runtime.submit(command)
        if not self.runtime.agent_attached:
            self.runtime.apply_pending()
        total = pending.wait(STEER_WAIT_S)
        return {"totalUsers": total}

    def state(self) -> dict:
        snapshot = self.runtime.require_snapshot()
        config = snapshot.config
        aps_by_zone: dict[str, list[dict]] = {z.zone_id: [] for z in config.zones}
        for ap in config.access_points:
            aps_by_zone[ap.zone_id].append(
                {
                    "apId": ap.ap_id,
                    "x_m": ap.position.x_m,
                    "y_m": ap.position.y_m,
                    "radius_m": ap.radius_m,
                    "tech": ap.tech,
                }
            )
        zone_of = {ap.ap_id: ap.zone_id for ap in config.access_points}
        return {
            "scenario": config.name,
            "tick": snapshot.tick_index,
            "timestamp": snapshot.sim_time_s,
            "map": {"width_m": config.map_width_m, "height_m": config.map_height_m},
            "maxUsers": config.max_users,
            "totalUsers": len(snapshot.users),
            "zones": [
                {"zoneId": z.zone_id, "accessPoints": aps_by_zone[z.zone_id]} for z in config.zones
            ],
            "users": [
                {
                    "address": u.address,
                    "userClass": u.user_class.value,
                    "x_m": u.position.x_m,
                    "y_m": u.position.y_m,
                    "accessPointId": u.association,
                    "zoneId": zone_of[u.association] if u.association is not None else None,
                }
                for u in snapshot.users
            ],
            "scenarios": sorted(self.runtime.scenarios),
        }

    # -- engine config -------------------------------------------------

    def get_engine_config(self) -> dict:
        if self.engine is None:
            raise ValidationError("no decision engine attached")
        cfg = self.engine.config
        return {key: getattr(cfg, key) for key in _PATCHABLE}

    def patch_engine_config(self, raw_body: dict | None) -> dict:
        if self.engine is None:
            raise ValidationError("no decision engine attached")
        if not isinstance(raw_body, dict) or not raw_body:
            raise ValidationError("config patch must be a non-empty object")
        changes = {}
        for key, value in raw_body.items():
            if key not in _PATCHABLE:
                raise ValidationError(f"unknown config field {key!r}")
            try:
                changes[key] = _PATCHABLE[key](value)
            except (TypeError, ValueError):
                raise ValidationError(f"bad value for config field {key!r}") from None
        self.engine.update_config(**changes)
        return self.get_engine_config()


_LANDING_PAGE = """<!doctype html>
<html><head><title>edgescale sandbox</title></head>
<body>
<h1>edgescale sandbox</h1>
<p>No dashboard bundle is being served. Endpoints on this listener:</p>
<ul>
<li>GET /location/v2/queries/zones</li>
<li>GET /location/v2/queries/zones/{zoneId}</li>
<li>GET /location/v2/queries/users?zoneId={id}</li>
<li>POST /sandbox/v1/steer</li>
<li>GET /sandbox/v1/state</li>
<li>GET /metrics</li>
<li>GET /config, PATCH /config</li>
</ul>
<p>Build the dashboard (see README) and pass --dashboard-dir to serve it here.</p>
</body></html>
"""


def build_sandbox_routes(api: SandboxApi, serve_landing_page: bool = True) -> list[Route]:
    def sim_time_headers() -> dict[str, str]:
        snapshot = api.runtime.snapshot
        if snapshot is None:
            return {}
        return {SIM_TIME_HEADER: repr(snapshot.sim_time_s)}

    def zones(_: Request) -> Response:
        return Response(200, {"zoneList": api.get_zones()}, headers=sim_time_headers())

    def zone(request: Request) -> Response:
        return Response(200, api.get_zone(request.params[0]), headers=sim_time_headers())

    def users(request: Request) -> Response:
        zone_id = request.query.get("zoneId")
        return Response(200, {"userList": api.get_users(zone_id)}, headers=sim_time_headers())

    def steer(request: Request) -> Response:
        return Response(200, api.steer(request.body))

    def state(_: Request) -> Response:
        return Response(200, api.state(), headers=sim_time_headers())

    def metrics(_: Request) -> Response:
        if api.engine is None:
            return Response(404, {"error": "no decision engine attached"})
        text = render_metrics(api.engine.metrics)
        return Response(200, text, content_type="text/plain; version=0.0.4; charset=utf-8")

    def get_config(_: Request) -> Response:
        return Response(200, api.get_engine_config())

    def patch_config(request: Request) -> Response:
        return Response(200, api.patch_engine_config(request.body))

    routes: list[Route] = [
        ("GET", r"/location/v2/queries/zones", zones),
        ("GET", r"/location/v2/queries/zones/([^/]+)", zone),
        ("GET", r"/location/v2/queries/users", users),
        ("POST", r"/sandbox/v1/steer", steer),
        ("GET", r"/sandbox/v1/state", state),
        ("GET", r"/metrics", metrics),
        ("GET", r"/config", get_config),
        ("PATCH", r"/config", patch_config),
    ]
    if serve_landing_page:
        routes.append(("GET", r"/", lambda _: Response(200, _LANDING_PAGE, content_type="text/html")))
    return routes
