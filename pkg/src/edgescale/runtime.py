"""Single-writer runtime around the simulator.

Exactly one agent (the tick loop) advances the simulator. HTTP handlers and
other readers only ever see immutable snapshots swapped in by ``publish``.
Steering commands are queued and applied by the tick agent at the next tick
boundary, so a command's effect is fully visible in the next published
snapshot or not at all.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass

from .errors import SnapshotUnavailable, UnknownScenarioError, ValidationError
from .scenario import ScenarioConfig, UserClass
from .simulator import Simulator, Snapshot

STEER_ACTIONS = ("addUser", "removeUser", "setUserCount", "loadScenario")


@dataclass(frozen=True)
class SteerCommand:
    action: str
    user_class: UserClass | None = None
    address: str | None = None
    count: int | None = None
    scenario: str | None = None

    @classmethod
    def from_mapping(cls, raw: dict) -> "SteerCommand":
        if not isinstance(raw, dict):
            raise ValidationError("steer body must be an object")
        action = raw.get("action")
        if action not in STEER_ACTIONS:
            raise ValidationError(f"steer action must be one of {list(STEER_ACTIONS)}")
        user_class = None
        if action in ("addUser", "setUserCount"):
            try:
                user_class = UserClass.parse(str(raw["userClass"]))
            except KeyError:
                raise ValidationError("missing field 'userClass'") from None
        address = None
        if action == "removeUser":
            if "address" not in raw:
                raise ValidationError("missing field 'address'")
            address = str(raw["address"])
        count = None
        if action == "setUserCount":
            if "count" not in raw:
                raise ValidationError("missing field 'count'")
            try:
                count = int(raw["count"])
            except (TypeError, ValueError):
                raise ValidationError("'count' must be an integer") from None
            if count < 0:
                raise ValidationError("'count' must be non-negative")
        scenario = None
        if action == "loadScenario":
            if "name" not in raw:
                raise ValidationError("missing field 'name'")
            scenario = str(raw["name"])
        return cls(action=action, user_class=user_class, address=address, count=count, scenario=scenario)


class PendingSteer:
    """Handle returned to the submitter; resolved by the tick agent."""

    def __init__(self, command: SteerCommand):
        self.command = command
        self._done = threading.Event()
        self._total: int | None = None
        self._error: Exception | None = None

    def resolve(self, total: int) -> None:
        self._total = total
        self._done.set()

    def fail(self, error: Exception) -> None:
        self._error = error
        self._done.set()

    def wait(self, timeout: float | None = None) -> int:
        if not self._done.wait(timeout):
            raise TimeoutError("steer command not applied in time")
        if self._error is not None:
            raise self._error
        assert self._total is not None
        return self._total


class SandboxRuntime:
    def __init__(self, simulator: Simulator, scenarios: dict[str, ScenarioConfig] | None = None):
        self.simulator = simulator
        self.scenarios = dict(scenarios or {})
        self.scenarios.setdefault(simulator.config.name, simulator.config)
        self._snapshot: Snapshot | None = None
        self._pending: deque[PendingSteer] = deque()
        self._queue_lock = threading.Lock()
        self._apply_lock = threading.Lock()
        # True while a tick loop owns command application; when no agent is
        # attached the steer handler drains the queue itself.
        self.agent_attached = False

    # -- reader side ---------------------------------------------------

    @property
    def snapshot(self) -> Snapshot | None:
        return self._snapshot

    def require_snapshot(self) -> Snapshot:
        snap = self._snapshot
        if snap is None:
            raise SnapshotUnavailable("no snapshot published yet")
        return snap

    @property
    def sim_time_s(self) -> float:
        return self.simulator.sim_time_s

    def submit(self, command: SteerCommand) -> PendingSteer:
        pending = PendingSteer(command)
        with self._queue_lock:
            self._pending.append(pending)
        return pending

    # -- tick agent side -------------------------------------------------

    def publish(self) -> Snapshot:
        snap = self.simulator.snapshot()
        self._snapshot = snap
        return snap

    def apply_pending(self) -> None:
        with self._apply_lock:
            while True:
                with self._queue_lock:
                    if not self._pending:
                        return
                    pending = self._pending.popleft()
                try:
                    self._apply(pending.command)
                except Exception as exc:  # resolved into the HTTP response
                    pending.fail(exc)
                else:
                    pending.resolve(self.simulator.total_users())

    def _apply(self, command: SteerCommand) -> None:
        sim = self.simulator
        if command.action == "addUser":
            sim.add_user(command.user_class)
        elif command.action == "removeUser":
            sim.remove_user(command.address)
        elif command.action == "setUserCount":
            sim.set_user_count(command.user_class, command.count)
        elif command.action == "loadScenario":
            config = self.scenarios.get(command.scenario)
            if config is None:
                raise UnknownScenarioError(f"unknown scenario {command.scenario!r}")
            self.simulator = Simulator(config)
        else:  # pragma: no cover - parse() rejects earlier
            raise ValidationError(f"unsupported steer action {command.action!r}")

    def advance(self) -> Snapshot:
        """One control cycle: apply queued steering, tick, publish."""
        self.apply_pending()
        self.simulator.tick()
        return self.publish()
