"""Scenario domain model: the zoned map, access points, and user classes.

A scenario file is a YAML mapping mirroring ScenarioConfig field for field;
``load_scenario_file`` / ``scenario_from_mapping`` own the parsing. Every
constraint is checked by ``validate_scenario``, which raises ScenarioError
naming the first violated invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from .errors import ScenarioError

MAX_SEED = (1 << 64) - 1


class UserClass(Enum):
    STATIONARY = "stationary"
    LOW_VELOCITY = "low_velocity"
    HIGH_VELOCITY = "high_velocity"

    @classmethod
    def parse(cls, name: str) -> "UserClass":
        for uc in cls:
            if uc.value == name:
                return uc
        raise ScenarioError(f"unknown user class {name!r}")


DEFAULT_SPEEDS_MPS = {
    UserClass.STATIONARY: 0.0,
    UserClass.LOW_VELOCITY: 1.5,
    UserClass.HIGH_VELOCITY: 15.0,
}

ACCESS_POINT_TECHS = ("4g", "5g", "wifi")


@dataclass(frozen=True)
class Position:
    x_m: float
    y_m: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x_m - other.x_m, self.y_m - other.y_m)


@dataclass(frozen=True)
class AccessPoint:
    ap_id: str
    zone_id: str
    position: Position
    radius_m: float
    tech: str = "4g"

    def covers(self, position: Position) -> bool:
        return self.position.distance_to(position) <= self.radius_m


@dataclass(frozen=True)
class Zone:
    zone_id: str
    ap_ids: tuple[str, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    map_width_m: float
    map_height_m: float
    zones: tuple[Zone, ...]
    access_points: tuple[AccessPoint, ...]
    user_counts: dict[UserClass, int]
    speeds: dict[UserClass, float] = field(default_factory=lambda: dict(DEFAULT_SPEEDS_MPS))
    seed: int = 1
    tick_s: float = 1.0
    max_users: int = 12

    def total_users(self) -> int:
        return sum(self.user_counts.values())

    def zone_ids(self) -> tuple[str, ...]:
        return tuple(z.zone_id for z in self.zones)


def validate_scenario(config: ScenarioConfig) -> None:
    """Check every scenario invariant; raise on the first violation."""
    if config.map_width_m <= 0 or config.map_height_m <= 0:
        raise ScenarioError("map dimensions must be positive")
    if config.tick_s <= 0:
        raise ScenarioError("tick_s must be positive")
    if not (0 <= config.seed <= MAX_SEED):
        raise ScenarioError("seed must fit in 64 unsigned bits")
    if config.max_users < 0:
        raise ScenarioError("max_users must be non-negative")
    if not config.zones:
        raise ScenarioError("scenario declares no zones")

    zone_ids = [z.zone_id for z in config.zones]
    for zone_id in zone_ids:
        if zone_ids.count(zone_id) > 1:
            raise ScenarioError(f"duplicate zone_id {zone_id!r}")

    ap_ids = [ap.ap_id for ap in config.access_points]
    for ap_id in ap_ids:
        if ap_ids.count(ap_id) > 1:
            raise ScenarioError(f"duplicate ap_id {ap_id!r}")

    aps_by_id = {ap.ap_id: ap for ap in config.access_points}
    for ap in config.access_points:
        if ap.zone_id not in zone_ids:
            raise ScenarioError(f"access point {ap.ap_id!r} names undeclared zone {ap.zone_id!r}")
        if ap.radius_m <= 0:
            raise ScenarioError(f"access point {ap.ap_id!r} has non-positive radius")
        if ap.tech not in ACCESS_POINT_TECHS:
            raise ScenarioError(f"access point {ap.ap_id!r} has unknown tech {ap.tech!r}")
        if not (0 <= ap.position.x_m <= config.map_width_m and 0 <= ap.position.y_m <= config.map_height_m):
            raise ScenarioError(f"access point {ap.ap_id!r} lies outside map bounds")

    # Zones must partition the access points: each AP listed exactly once,
    # and in the zone it claims as its own.
    listed: set[str] = set()
    for zone in config.zones:
        for ap_id in zone.ap_ids:
            if ap_id not in aps_by_id:
                raise ScenarioError(f"zone {zone.zone_id!r} lists undeclared access point {ap_id!r}")
            if ap_id in listed:
                raise ScenarioError(f"access point {ap_id!r} listed in more than one zone")
            if aps_by_id[ap_id].zone_id != zone.zone_id:
                raise ScenarioError(
                    f"access point {ap_id!r} listed under zone {zone.zone_id!r} "
                    f"but declares zone {aps_by_id[ap_id].zone_id!r}"
                )
            listed.add(ap_id)
    unlisted = set(aps_by_id) - listed
    if unlisted:
        raise ScenarioError(f"access point {min(unlisted)!r} not listed in any zone")

    for uc in UserClass:
        if config.user_counts.get(uc, 0) < 0:
            raise ScenarioError(f"negative user count for class {uc.value!r}")
        if uc not in config.speeds:
            raise ScenarioError(f"missing speed for class {uc.value!r}")
    if config.speeds[UserClass.STATIONARY] != 0:
        raise ScenarioError("stationary speed must be 0")
    if not (0 < config.speeds[UserClass.LOW_VELOCITY] < config.speeds[UserClass.HIGH_VELOCITY]):
        raise ScenarioError("speeds must satisfy 0 < low_velocity < high_velocity")

    if config.total_users() > config.max_users:
        raise ScenarioError(
            f"user counts sum to {config.total_users()}, exceeding max_users {config.max_users}"
        )


def default_scenario(seed: int = 4, name: str = "grid-2x2") -> ScenarioConfig:
    """1000 m x 1000 m map, four zones in a 2x2 layout, one AP per zone.

    With radius 400 m at the quadrant centres every point of the map is
    covered (the worst case, e.g. the map centre, sits ~354 m from the
    nearest AP), so all users always associate somewhere.
    """
    centres = [(250.0, 250.0), (750.0, 250.0), (250.0, 750.0), (750.0, 750.0)]
    techs = ["4g", "5g", "wifi", "4g"]
    zones = []
    aps = []
    for i, ((x, y), tech) in enumerate(zip(centres, techs), start=1):
        zone_id = f"zone{i}"
        ap_id = f"ap{i}"
        zones.append(Zone(zone_id=zone_id, ap_ids=(ap_id,)))
        aps.append(AccessPoint(ap_id=ap_id, zone_id=zone_id, position=Position(x, y), radius_m=400.0, tech=tech))
    return ScenarioConfig(
        name=name,
        map_width_m=1000.0,
        map_height_m=1000.0,
        zones=tuple(zones),
        access_points=tuple(aps),
        user_counts={UserClass.STATIONARY: 4, UserClass.LOW_VELOCITY: 4, UserClass.HIGH_VELOCITY: 4},
        seed=seed,
    )


def scenario_from_mapping(raw: dict) -> ScenarioConfig:
    """Build and validate a ScenarioConfig from a parsed YAML mapping."""
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be a mapping")
    try:
        zones = tuple(
            Zone(zone_id=str(z["zone_id"]), ap_ids=tuple(str(a) for a in z.get("ap_ids", [])))
            for z in raw.get("zones", [])
        )
        aps = tuple(
            AccessPoint(
                ap_id=str(a["ap_id"]),
                zone_id=str(a["zone_id"]),
                position=Position(float(a["x_m"]), float(a["y_m"])),
                radius_m=float(a["radius_m"]),
                tech=str(a.get("tech", "4g")),
            )
            for a in raw.get("access_points", [])
        )
        user_counts = {UserClass.parse(k): int(v) for k, v in raw.get("user_counts", {}).items()}
        speeds = dict(DEFAULT_SPEEDS_MPS)
        for k, v in raw.get("speeds", {}).items():
            speeds[UserClass.parse(k)] = float(v)
        config = ScenarioConfig(
            name=str(raw.get("name", "unnamed")),
            map_width_m=float(raw["map_width_m"]),
            map_height_m=float(raw["map_height_m"]),
            zones=zones,
            access_points=aps,
            user_counts=user_counts,
            speeds=speeds,
            seed=int(raw.get("seed", 1)),
            tick_s=float(raw.get("tick_s", 1.0)),
            max_users=int(raw.get("max_users", 12)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario document: {exc}") from exc
    validate_scenario(config)
    return config


def scenario_to_mapping(config: ScenarioConfig) -> dict:
    return {
        "name": config.name,
        "map_width_m": config.map_width_m,
        "map_height_m": config.map_height_m,
        "zones": [{"zone_id": z.zone_id, "ap_ids": list(z.ap_ids)} for z in config.zones],
        "access_points": [
            {
                "ap_id": ap.ap_id,
                "zone_id": ap.zone_id,
                "x_m": ap.position.x_m,
                "y_m": ap.position.y_m,
                "radius_m": ap.radius_m,
                "tech": ap.tech,
            }
            for ap in config.access_points
        ],
        "user_counts": {uc.value: n for uc, n in config.user_counts.items()},
        "speeds": {uc.value: s for uc, s in config.speeds.items()},
        "seed": config.seed,
        "tick_s": config.tick_s,
        "max_users": config.max_users,
    }


def load_scenario_file(path: str | Path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return scenario_from_mapping(raw)


def save_scenario_file(config: ScenarioConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_mapping(config), fh, sort_keys=False)
