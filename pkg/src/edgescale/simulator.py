"""Discrete-time mobility simulator over a zoned map.

Mobile users follow a random-waypoint walk: move straight toward the
waypoint at class speed, snap to it when a tick would overshoot, then draw
the next waypoint uniformly over the map. Stationary users never move.
Zone membership is purely association-based: a user belongs to the zone of
its serving access point, or to no zone when uncovered.

All randomness comes from one SplitMix64 stream owned by the simulator and
consumed in a fixed order (user creation order, x before y), so identical
(config, seed) reproduces identical runs bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MaxUsersExceeded, UnknownAddressError, UnknownZoneError
from .rng import SplitMix64
from .scenario import AccessPoint, Position, ScenarioConfig, UserClass, validate_scenario

# Draws per spawn before giving up on finding a covered position.
_SPAWN_ATTEMPTS = 64


@dataclass
class UserState:
    address: str
    user_class: UserClass
    position: Position
    waypoint: Position
    association: str | None = None


@dataclass(frozen=True)
class UserSnapshot:
    address: str
    user_class: UserClass
    position: Position
    waypoint: Position
    association: str | None


@dataclass(frozen=True)
class Snapshot:
    """Immutable view of the simulator published between ticks."""

    config: ScenarioConfig
    tick_index: int
    sim_time_s: float
    users: tuple[UserSnapshot, ...]

    def zone_user_count(self, zone_id: str) -> int:
        if zone_id not in self.config.zone_ids():
            raise UnknownZoneError(f"unknown zone {zone_id!r}")
        members = _zone_membership(self.config)
        return sum(1 for u in self.users if u.association is not None and members[u.association] == zone_id)

    def zone_counts(self) -> dict[str, int]:
        members = _zone_membership(self.config)
        counts = {zone_id: 0 for zone_id in self.config.zone_ids()}
        for u in self.users:
            if u.association is not None:
                counts[members[u.association]] += 1
        return counts

    def unassociated_count(self) -> int:
        return sum(1 for u in self.users if u.association is None)


def _zone_membership(config: ScenarioConfig) -> dict[str, str]:
    return {ap.ap_id: ap.zone_id for ap in config.access_points}


def associate(position: Position, access_points: tuple[AccessPoint, ...]) -> str | None:
    """Nearest covering access point, ties broken by smallest ap_id."""
    best: tuple[float, str] | None = None
    for ap in access_points:
        dist = ap.position.distance_to(position)
        if dist <= ap.radius_m:
            key = (dist, ap.ap_id)
            if best is None or key < best:
                best = key
    return None if best is None else best[1]


class Simulator:
    """Single-writer simulator; readers consume ``snapshot()`` copies."""

    def __init__(self, config: ScenarioConfig):
        validate_scenario(config)
        self.config = config
        self.rng = SplitMix64(config.seed)
        self.tick_index = 0
        self.users: list[UserState] = []
        self._next_user_index = 1
        for uc in UserClass:
            for _ in range(config.user_counts.get(uc, 0)):
                self._spawn(uc, require_coverage=False)

    # -- construction ------------------------------------------------

    def _draw_position(self) -> Position:
        x = self.rng.uniform(0.0, self.config.map_width_m)
        y = self.rng.uniform(0.0, self.config.map_height_m)
        return Position(x, y)

    def _spawn(self, user_class: UserClass, require_coverage: bool) -> UserState:
        position = self._draw_position()
        if require_coverage:
            for _ in range(_SPAWN_ATTEMPTS):
                if associate(position, self.config.access_points) is not None:
                    break
                position = self._draw_position()
        waypoint = position if user_class is UserClass.STATIONARY else self._draw_position()
        user = UserState(
            address=f"ue-{self._next_user_index:03d}",
            user_class=user_class,
            position=position,
            waypoint=waypoint,
            association=associate(position, self.config.access_points),
        )
        self._next_user_index += 1
        self.users.append(user)
        return user

    # -- clock and motion --------------------------------------------

    @property
    def sim_time_s(self) -> float:
        return self.tick_index * self.config.tick_s

    def tick(self) -> None:
        """Advance one tick: move mobile users, re-associate, bump the clock."""
        for user in self.users:
            speed = self.config.speeds[user.user_class]
            if speed > 0:
                self._move(user, speed * self.config.tick_s)
            user.association = associate(user.position, self.config.access_points)
        self.tick_index += 1

    def _move(self, user: UserState, step_m: float) -> None:
        dist = user.position.distance_to(user.waypoint)
        if dist <= step_m:
            user.position = user.waypoint
            user.waypoint = self._draw_position()
        else:
            frac = step_m / dist
            user.position = Position(
                user.position.x_m + (user.waypoint.x_m - user.position.x_m) * frac,
                user.position.y_m + (user.waypoint.y_m - user.position.y_m) * frac,
            )

    # -- queries -----------------------------------------------------

    def zone_user_count(self, zone_id: str) -> int:
        if zone_id not in self.config.zone_ids():
            raise UnknownZoneError(f"unknown zone {zone_id!r}")
        members = _zone_membership(self.config)
        return sum(1 for u in self.users if u.association is not None and members[u.association] == zone_id)

    def snapshot(self) -> Snapshot:
        return Snapshot(
            config=self.config,
            tick_index=self.tick_index,
            sim_time_s=self.sim_time_s,
            users=tuple(
                UserSnapshot(u.address, u.user_class, u.position, u.waypoint, u.association)
                for u in self.users
            ),
        )

    # -- steering ----------------------------------------------------

    def total_users(self) -> int:
        return len(self.users)

    def add_user(self, user_class: UserClass) -> str:
        if len(self.users) + 1 > self.config.max_users:
            raise MaxUsersExceeded(f"scenario allows at most {self.config.max_users} users")
        return self._spawn(user_class, require_coverage=True).address

    def remove_user(self, address: str) -> None:
        for i, user in enumerate(self.users):
            if user.address == address:
                del self.users[i]
                return
        raise UnknownAddressError(f"unknown user address {address!r}")

    def set_user_count(self, user_class: UserClass, count: int) -> None:
        """Add or remove users of one class to hit the target count.

        Removal takes the most recently added users of the class first.
        """
        if count < 0:
            raise MaxUsersExceeded("user count must be non-negative")
        current = [u for u in self.users if u.user_class is user_class]
        delta = count - len(current)
        if len(self.users) + delta > self.config.max_users:
            raise MaxUsersExceeded(f"scenario allows at most {self.config.max_users} users")
        if delta > 0:
            for _ in range(delta):
                self._spawn(user_class, require_coverage=True)
        elif delta < 0:
            doomed = {u.address for u in current[delta:]}
            self.users = [u for u in self.users if u.address not in doomed]

    def resync_associations(self) -> None:
        """Recompute associations after test harnesses pin positions directly."""
        for user in self.users:
            user.association = associate(user.position, self.config.access_points)
            if user.user_class is UserClass.STATIONARY:
                user.waypoint = user.position
