import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from safe_horizon.ellipse import HorizonEllipse, Pose
from safe_horizon.horizon import STOP, VelocityCommand
from safe_horizon.sim import (
    CommandPacket,
    FailureModel,
    GoToGoal,
    Mode,
    Outage,
    RobotSpec,
    RobotState,
    ScenarioConfig,
    channel_deliver,
    decision_maker_tick,
    guard_commands,
    integrate_pose,
    outage_scenario,
    random_scenario,
    robot_tick,
    run_scenario,
)
from safe_horizon.sim.engine import LOG_HEADER
from safe_horizon.sim.scenarios import OUTAGE_END, OUTAGE_ROBOTS, OUTAGE_START
from safe_horizon.verify import outage_behaviour


@pytest.fixture(scope="module")
def outage_logs():
    return run_scenario(outage_scenario(True)), run_scenario(outage_scenario(False))


def _cfg(n=1, **kw):
    robots = [RobotSpec(Pose(3.0 * i, 0.0)) for i in range(n)]
    return ScenarioConfig(robots=robots, **kw)


def test_integrate_pose_examples():
    p = integrate_pose(Pose(0, 0, 0), VelocityCommand(1, 0), 1.0)
    assert (p.x, p.y, p.heading) == pytest.approx((1, 0, 0), abs=1e-15)
    p = integrate_pose(Pose(0, 0, 0), VelocityCommand(1, 1), math.pi)
    assert (p.x, p.y, abs(p.heading)) == pytest.approx((0, 2, math.pi), abs=1e-12)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-math.pi, math.pi), st.floats(0, 5))
def test_integrate_pose_composes(v, w, h, dt):
    cmd = VelocityCommand(v, w)
    start = Pose(0.2, 0.1, h)
    once = integrate_pose(start, cmd, dt)
    twice = integrate_pose(integrate_pose(start, cmd, dt / 2), cmd, dt / 2)
    assert twice.x == pytest.approx(once.x, abs=1e-12)
    assert twice.y == pytest.approx(once.y, abs=1e-12)
    assert math.remainder(twice.heading - once.heading, 2 * math.pi) == pytest.approx(0, abs=1e-12)


def test_channel_examples():
    rng = np.random.default_rng(0)
    packets = {i: CommandPacket(i, 0, 0, 0, 0) for i in range(4)}
    assert all(channel_deliver(packets, FailureModel(), 1.0, rng).values())
    fm = FailureModel([Outage(2, 3.1, 8.3)])
    flags = channel_deliver(packets, fm, 5.0, rng)
    assert not flags[2] and flags[0] and flags[1] and flags[3]
    assert channel_deliver(packets, fm, 8.3, rng)[2]
    assert not channel_deliver(packets, fm, 3.1, rng)[2]


def test_channel_is_deterministic():
    packets = {i: CommandPacket(i, 0, 0, 0, 0) for i in range(5)}
    fm = FailureModel(drop_probability=0.5)
    seqs = []
    for _ in range(2):
        rng = np.random.default_rng(42)
        seqs.append([channel_deliver(packets, fm, 0.1 * k, rng) for k in range(50)])
    assert seqs[0] == seqs[1]
    assert any(not f for d in seqs[0] for f in d.values())


def test_robot_tick_always_delivered():
    cfg = _cfg()
    st_ = RobotState(0, Pose(0, 0))
    for k in range(5):
        st_ = robot_tick(st_, CommandPacket(0, k, 0.5, 0.0, 1.0), k, cfg)
        assert st_.mode is Mode.COMMANDED and st_.last_cmd_tick == k


def test_robot_tick_horizon_countdown():
    cfg = _cfg(update_period=0.1)
    st_ = robot_tick(RobotState(0, Pose(0, 0)), CommandPacket(0, 10, 1.0, 0.0, 0.5), 10, cfg)
    modes = []
    for k in range(11, 17):
        st_ = robot_tick(st_, None, k, cfg)
        modes.append(st_.mode)
    assert modes[:4] == [Mode.OPEN_LOOP] * 4
    assert modes[4:] == [Mode.STOPPED] * 2


def test_initial_state_is_stopped():
    st_ = RobotState(0, Pose(0, 0))
    assert st_.last_cmd == STOP and st_.last_horizon == 0.0 and st_.mode is Mode.STOPPED
    assert robot_tick(st_, None, 0, _cfg()).mode is Mode.STOPPED


def test_robot_at_goal_is_isolated():
    cfg = ScenarioConfig(robots=[RobotSpec(Pose(1, 1), [(1, 1)])], horizon_cap=2.0)
    world = {0: RobotState(0, Pose(1, 1))}
    pkt = decision_maker_tick(world, cfg, 0, GoToGoal(cfg))[0]
    assert (pkt.linear, pkt.angular) == (0.0, 0.0)
    assert pkt.horizon == 2.0


def test_isolated_robot_mid_field_gets_full_horizon():
    cfg = ScenarioConfig(robots=[RobotSpec(Pose(0, 0), [(5, 0)]), RobotSpec(Pose(50, 50), [(60, 50)])],
                         horizon_cap=2.0)
    world = {i: RobotState(i, r.pose) for i, r in enumerate(cfg.robots)}
    pkts = decision_maker_tick(world, cfg, 0, GoToGoal(cfg))
    assert pkts[0].linear == 1.0 and pkts[0].horizon == 2.0


def test_guard_zeroes_converging_pair():
    cfg = ScenarioConfig(robots=[RobotSpec(Pose(0, 0, 0)), RobotSpec(Pose(0.15, 0, math.pi))])
    world = {i: RobotState(i, r.pose) for i, r in enumerate(cfg.robots)}
    desired = {0: VelocityCommand(1, 0), 1: VelocityCommand(1, 0)}
    out = guard_commands(world, desired, cfg, 0)
    assert out[0].linear == 0.0 or out[1].linear == 0.0


def test_guard_leaves_separating_pair_alone():
    cfg = ScenarioConfig(robots=[RobotSpec(Pose(0, 0, math.pi)), RobotSpec(Pose(0.5, 0, 0))])
    world = {i: RobotState(i, r.pose) for i, r in enumerate(cfg.robots)}
    desired = {0: VelocityCommand(1, 0), 1: VelocityCommand(1, 0)}
    assert guard_commands(world, desired, cfg, 0) == desired


def test_log_shape_and_header(outage_logs):
    log, _ = outage_logs
    cfg = log.config
    assert log.poses.shape == (cfg.n_ticks * cfg.substeps_per_tick + 1, 6, 3)
    text = log.to_csv()
    assert text.splitlines()[0] == ",".join(LOG_HEADER)
    assert len(text.splitlines()) == 1 + log.poses.shape[0] * 6


def test_outage_robots_coast_then_stop(outage_logs):
    log, _ = outage_logs
    for r, b in outage_behaviour(log).items():
        assert b["travel"] > 0
        assert b["modes_follow_horizon"]
        assert b["observed_stop"] == pytest.approx(min(b["expected_stop"], OUTAGE_END), abs=1e-9)
        assert b["travel_after_stop"] == 0.0
    assert log.collisions() == 0


def test_baseline_stops_at_first_missed_tick(outage_logs):
    _, base = outage_logs
    for r in OUTAGE_ROBOTS:
        assert base.path_length(r, OUTAGE_START, OUTAGE_END) == 0.0
        recs = [x for x in base.ticks if x.robot_id == r and OUTAGE_START - 1e-9 <= x.t < OUTAGE_END - 1e-9]
        assert all(x.mode is Mode.STOPPED and x.active == 0.0 for x in recs)
        assert base.path_length(r, OUTAGE_END, base.times[-1]) > 0
    assert base.collisions() == 0


def test_stop_intervals_reported(outage_logs):
    log, base = outage_logs
    (start, end), = log.stop_intervals(1)
    assert end == pytest.approx(OUTAGE_END)
    assert OUTAGE_START < start < OUTAGE_END
    (bstart, bend), = base.stop_intervals(1)
    assert bstart == pytest.approx(OUTAGE_START)


def _mode_legality(log):
    dt = log.config.update_period
    S = log.config.substeps_per_tick
    last = {}
    for rec in log.ticks:
        if rec.delivered:
            last[rec.robot_id] = (rec.tick, rec.sent_horizon)
        k0 = rec.tick * S
        if rec.mode is Mode.OPEN_LOOP:
            l, s = last[rec.robot_id]
            elapsed = (rec.tick - l) * dt
            assert elapsed < s
            assert rec.active <= s - elapsed + 1e-12
        if rec.mode is not Mode.COMMANDED:
            # nothing moves after the robot halts inside the tick
            halt = int(math.ceil(rec.active / dt * S - 1e-9))
            seg = log.poses[k0 + halt:k0 + S + 1, rec.robot_id, :2]
            assert np.all(seg == seg[0])


def test_mode_legality():
    _mode_legality(run_scenario(random_scenario(5)))
    _mode_legality(run_scenario(outage_scenario(True)))


def test_containment_replay():
    log = run_scenario(random_scenario(9))
    cfg = log.config
    S, dt, L = cfg.substeps_per_tick, cfg.update_period, cfg.horizon_cap
    n = log.n_robots
    last_delivery = {}
    prev_mode = {}
    checked = 0
    for rec in log.ticks:
        i = rec.robot_id
        if rec.delivered:
            last_delivery[i] = rec
        entering = rec.mode is Mode.OPEN_LOOP and prev_mode.get(i) is not Mode.OPEN_LOOP
        prev_mode[i] = rec.mode
        if not entering:
            continue
        l = last_delivery[i]
        k0 = l.tick * S
        rows = range(k0 + 1, min(k0 + int(round(L / dt)) * S, len(log.times) - 1) + 1)
        for j in range(n):
            if j == i:
                continue
            pj = Pose(*log.poses[k0, j])
            for k in rows:
                mu = log.times[k] - log.times[k0]
                e = HorizonEllipse.at(mu, pj)
                assert e.membership(log.poses[k, j, :2]) <= 1 + 1e-6
                checked += 1
                if mu <= l.sent_horizon + 1e-12 and k <= (rec.tick + 1) * S:
                    assert e.membership(log.poses[k, i, :2]) > 1
    assert checked > 0


def test_random_scenarios_are_collision_free():
    for seed in range(10):
        log = run_scenario(random_scenario(seed))
        assert log.collisions() == 0
        assert log.min_pair_distance() > 1e-9


def test_collision_radius_is_respected():
    cfg = random_scenario(3)
    cfg.collision_radius = 0.1
    log = run_scenario(cfg)
    assert log.collisions() == 0
    assert log.min_pair_distance() > 0.1


def test_runs_are_bit_identical():
    assert run_scenario(random_scenario(21)).to_csv() == run_scenario(random_scenario(21)).to_csv()


def test_seed_changes_drops():
    a = run_scenario(random_scenario(21))
    cfg = random_scenario(21)
    cfg.failure.seed = 22
    b = run_scenario(cfg)
    assert not np.array_equal(a.delivered, b.delivered)


def test_config_validation():
    from safe_horizon.errors import ConfigError

    with pytest.raises(ConfigError, match="update_period"):
        _cfg(update_period=0.0).validate()
    with pytest.raises(ConfigError, match="drop_probability"):
        _cfg(failure=FailureModel(drop_probability=1.5)).validate()
    with pytest.raises(ConfigError, match="outages"):
        _cfg(failure=FailureModel([Outage(3, 0, 1)])).validate()
