"""Simulator behavior: geometry oracles, determinism, and invariants."""

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgescale.errors import MaxUsersExceeded, UnknownAddressError, UnknownZoneError
from edgescale.scenario import (
    AccessPoint,
    Position,
    ScenarioConfig,
    UserClass,
    Zone,
    default_scenario,
)
from edgescale.simulator import Simulator, associate


def one_user_scenario(user_class=UserClass.LOW_VELOCITY, speed=5.0, seed=1):
    """100x100 map, single AP covering everything, one mobile user."""
    return ScenarioConfig(
        name="single",
        map_width_m=100.0,
        map_height_m=100.0,
        zones=(Zone("z1", ("a1",)),),
        access_points=(AccessPoint("a1", "z1", Position(50, 50), 100.0),),
        user_counts={user_class: 1},
        speeds={UserClass.STATIONARY: 0.0, UserClass.LOW_VELOCITY: speed, UserClass.HIGH_VELOCITY: speed * 3},
        seed=seed,
    )


# -- movement geometry ------------------------------------------------


def test_straight_line_step():
    # user at (0,0) heading to (30,40) at 5 m/s with 1 s ticks covers
    # 5 m along a 3-4-5 direction: position (3,4) after one tick
    sim = Simulator(one_user_scenario(speed=5.0))
    user = sim.users[0]
    user.position = Position(0.0, 0.0)
    user.waypoint = Position(30.0, 40.0)
    sim.tick()
    assert user.position.x_m == pytest.approx(3.0, abs=1e-9)
    assert user.position.y_m == pytest.approx(4.0, abs=1e-9)


def test_waypoint_snap_and_redraw():
    sim = Simulator(one_user_scenario(speed=5.0))
    user = sim.users[0]
    user.position = Position(10.0, 10.0)
    user.waypoint = Position(12.0, 10.0)  # 2 m away, step is 5 m
    sim.tick()
    # snapped to the waypoint, new waypoint drawn inside the map
    assert (user.position.x_m, user.position.y_m) == (12.0, 10.0)
    assert 0.0 <= user.waypoint.x_m <= 100.0
    assert 0.0 <= user.waypoint.y_m <= 100.0


def test_stationary_user_never_moves():
    sim = Simulator(one_user_scenario(UserClass.STATIONARY))
    start = sim.users[0].position
    for _ in range(100):
        sim.tick()
    assert sim.users[0].position == start
    assert sim.users[0].waypoint == start


def test_clock_advances_by_tick_s():
    config = replace(default_scenario(), tick_s=0.5)
    sim = Simulator(config)
    assert sim.sim_time_s == 0.0
    for _ in range(7):
        sim.tick()
    assert sim.sim_time_s == pytest.approx(3.5)
    assert sim.tick_index == 7


def test_determinism_over_1000_ticks():
    config = default_scenario(seed=123)
    a = Simulator(config)
    b = Simulator(config)
    for _ in range(1000):
        a.tick()
        b.tick()
        assert [(u.address, u.position, u.association) for u in a.users] == [
            (u.address, u.position, u.association) for u in b.users
        ]


def test_positions_stay_in_bounds():
    sim = Simulator(default_scenario(seed=77))
    for _ in range(500):
        sim.tick()
        for user in sim.users:
            assert 0.0 <= user.position.x_m <= sim.config.map_width_m
            assert 0.0 <= user.position.y_m <= sim.config.map_height_m


def test_per_tick_displacement_bounded_by_speed():
    sim = Simulator(default_scenario(seed=5))
    for _ in range(300):
        before = {u.address: u.position for u in sim.users}
        sim.tick()
        for user in sim.users:
            step = user.position.distance_to(before[user.address])
            bound = sim.config.speeds[user.user_class] * sim.config.tick_s
            assert step <= bound + 1e-9


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**64 - 1))
def test_partition_invariant_random_seeds(seed):
    sim = Simulator(default_scenario(seed=seed))
    for _ in range(50):
        sim.tick()
        snap = sim.snapshot()
        counts = snap.zone_counts()
        assert sum(counts.values()) + snap.unassociated_count() == len(sim.users)


def test_spawn_addresses_and_class_order():
    sim = Simulator(default_scenario())
    addresses = [u.address for u in sim.users]
    assert addresses == [f"ue-{i:03d}" for i in range(1, 13)]
    classes = [u.user_class for u in sim.users]
    assert classes == [UserClass.STATIONARY] * 4 + [UserClass.LOW_VELOCITY] * 4 + [UserClass.HIGH_VELOCITY] * 4


# -- association ------------------------------------------------------


def brute_force_associate(position, aps):
    """Independent oracle: nearest covering AP, smallest id on ties."""
    covering = [
        (math.hypot(ap.position.x_m - position.x_m, ap.position.y_m - position.y_m), ap.ap_id)
        for ap in aps
        if math.hypot(ap.position.x_m - position.x_m, ap.position.y_m - position.y_m) <= ap.radius_m
    ]
    return sorted(covering)[0][1] if covering else None


def test_associate_no_access_points():
    assert associate(Position(10, 10), ()) is None


def test_associate_nearest_coverage():
    aps = (
        AccessPoint("a1", "z", Position(0, 5), 100.0),
        AccessPoint("a2", "z", Position(0, 50), 100.0),
    )
    assert associate(Position(0, 0), aps) == "a1"


def test_associate_tie_break_lexicographic():
    aps = (
        AccessPoint("apB", "z", Position(10, 0), 50.0),
        AccessPoint("apA", "z", Position(-10, 0), 50.0),
    )
    assert associate(Position(0, 0), aps) == "apA"


def test_associate_out_of_all_radii():
    aps = (AccessPoint("a1", "z", Position(0, 0), 10.0),)
    assert associate(Position(100, 100), aps) is None


@settings(max_examples=200, deadline=None)
@given(
    px=st.floats(min_value=0, max_value=100, allow_nan=False),
    py=st.floats(min_value=0, max_value=100, allow_nan=False),
    ap_data=st.lists(
        st.tuples(
            st.floats(min_value=0, max_value=100, allow_nan=False),
            st.floats(min_value=0, max_value=100, allow_nan=False),
            st.floats(min_value=1, max_value=120, allow_nan=False),
        ),
        max_size=6,
    ),
)
def test_associate_matches_brute_force(px, py, ap_data):
    aps = tuple(
        AccessPoint(f"ap{i}", "z", Position(x, y), r) for i, (x, y, r) in enumerate(ap_data)
    )
    assert associate(Position(px, py), aps) == brute_force_associate(Position(px, py), aps)


# -- zone counts ------------------------------------------------------


def test_zone_count_pinned_three_in_zone3():
    # put 3 users inside zone3 coverage and 9 near the other corners
    sim = Simulator(default_scenario(seed=1))
    zone3_spot = Position(250.0, 750.0)
    elsewhere = Position(750.0, 250.0)
    for i, user in enumerate(sim.users):
        user.position = zone3_spot if i < 3 else elsewhere
        user.waypoint = user.position
    sim.resync_associations()
    assert sim.zone_user_count("zone3") == 3
    assert sim.zone_user_count("zone2") == 9


def test_zone_count_unknown_zone():
    sim = Simulator(default_scenario())
    with pytest.raises(UnknownZoneError):
        sim.zone_user_count("nope")


def test_full_coverage_counts_sum_to_12():
    sim = Simulator(default_scenario(seed=9))
    for _ in range(50):
        sim.tick()
        snap = sim.snapshot()
        assert sum(snap.zone_counts().values()) == 12
        assert snap.unassociated_count() == 0


def test_no_access_points_all_counts_zero():
    config = ScenarioConfig(
        name="bare",
        map_width_m=100.0,
        map_height_m=100.0,
        zones=(Zone("z1", ()),),
        access_points=(),
        user_counts={UserClass.STATIONARY: 3},
        seed=2,
    )
    sim = Simulator(config)
    assert sim.zone_user_count("z1") == 0
    assert sim.snapshot().unassociated_count() == 3


# -- steering ---------------------------------------------------------


def test_add_user_beyond_cap_rejected():
    sim = Simulator(default_scenario())
    assert sim.total_users() == 12
    with pytest.raises(MaxUsersExceeded):
        sim.add_user(UserClass.HIGH_VELOCITY)


def test_add_user_spawns_covered():
    sim = Simulator(replace(default_scenario(), user_counts={}))
    address = sim.add_user(UserClass.LOW_VELOCITY)
    user = sim.users[0]
    assert user.address == address
    assert user.association is not None


def test_remove_user():
    sim = Simulator(default_scenario())
    sim.remove_user("ue-007")
    assert sim.total_users() == 11
    assert all(u.address != "ue-007" for u in sim.users)
    with pytest.raises(UnknownAddressError):
        sim.remove_user("ue-007")


def test_set_user_count_noop():
    sim = Simulator(default_scenario())
    before = [u.address for u in sim.users]
    sim.set_user_count(UserClass.STATIONARY, 4)
    assert [u.address for u in sim.users] == before


def test_set_user_count_removes_most_recent_first():
    sim = Simulator(default_scenario())
    sim.set_user_count(UserClass.HIGH_VELOCITY, 2)
    highs = [u.address for u in sim.users if u.user_class is UserClass.HIGH_VELOCITY]
    # ue-011 and ue-012 were the most recently added high-velocity users
    assert highs == ["ue-009", "ue-010"]
    assert sim.total_users() == 10


def test_set_user_count_grows_within_cap():
    sim = Simulator(default_scenario())
    sim.set_user_count(UserClass.HIGH_VELOCITY, 0)
    assert sim.total_users() == 8
    sim.set_user_count(UserClass.HIGH_VELOCITY, 4)
    assert sim.total_users() == 12
    with pytest.raises(MaxUsersExceeded):
        sim.set_user_count(UserClass.HIGH_VELOCITY, 5)
    assert sim.total_users() == 12  # failed steer mutated nothing
