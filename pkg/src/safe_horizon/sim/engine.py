"""Deterministic discrete-time fleet simulation over a lossy command channel."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, TextIO, Union

import numpy as np

from ..horizon import STOP, VelocityCommand
from .controller import Controller, GoToGoal, decision_maker_tick
from .model import (
    CommandPacket,
    FailureModel,
    Mode,
    RobotState,
    ScenarioConfig,
    fallback_motion,
    fmt,
    integrate_pose,
)

LOG_HEADER = ["t", "robot_id", "x", "y", "heading", "v", "omega", "mode", "delivered", "horizon", "min_pair_dist"]
CONTACT_TOL = 1e-9


def channel_deliver(
    packets: Mapping[int, CommandPacket],
    failure: FailureModel,
    t: float,
    rng: np.random.Generator,
) -> dict[int, bool]:
    """Per-robot delivery flags for one transmission round.

    One uniform draw per robot is consumed every round, outage or not, so the
    random stream does not depend on the outage schedule.
    """
    ids = sorted(packets)
    draws = rng.random(len(ids))
    out = {}
    for i, u in zip(ids, draws):
        blocked = any(o.robot_id == i and o.covers(t) for o in failure.scheduled_outages)
        out[i] = not blocked and not (u < failure.drop_probability)
    return out


def robot_tick(state: RobotState, delivered: Optional[CommandPacket], tick: int, cfg: ScenarioConfig) -> RobotState:
    if delivered is not None:
        return RobotState(state.id, state.pose, delivered.command, tick, delivered.horizon, Mode.COMMANDED)
    if (tick - state.last_cmd_tick) * cfg.update_period < state.last_horizon:
        mode = Mode.OPEN_LOOP
    else:
        mode = Mode.STOPPED
    return RobotState(state.id, state.pose, state.last_cmd, state.last_cmd_tick, state.last_horizon, mode)


def tick_motion(state: RobotState, tick: int, cfg: ScenarioConfig) -> tuple[VelocityCommand, float]:
    """Command executed during the tick and how long it runs before the robot halts."""
    if state.mode is Mode.COMMANDED:
        return state.last_cmd, cfg.update_period
    if state.mode is Mode.OPEN_LOOP:
        return fallback_motion(state, tick, cfg.update_period)
    return STOP, 0.0


@dataclass
class TickRecord:
    tick: int
    t: float
    robot_id: int
    delivered: bool
    sent_linear: float
    sent_angular: float
    sent_horizon: float
    mode: Mode
    active: float


@dataclass
class SimulationLog:
    config: ScenarioConfig
    times: np.ndarray
    poses: np.ndarray
    velocities: np.ndarray
    modes: np.ndarray
    delivered: np.ndarray
    horizons: np.ndarray
    ticks: list[TickRecord] = field(default_factory=list)

    @property
    def n_robots(self) -> int:
        return self.poses.shape[1]

    def pair_distances(self) -> np.ndarray:
        """(T, N, N) distances, diagonal set to inf."""
        p = self.poses[:, :, :2]
        d = np.linalg.norm(p[:, :, None, :] - p[:, None, :, :], axis=-1)
        idx = np.arange(self.n_robots)
        d[:, idx, idx] = np.inf
        return d

    def nearest_distances(self) -> np.ndarray:
        return self.pair_distances().min(axis=2)

    def min_pair_distance(self) -> float:
        return float(self.pair_distances().min()) if self.n_robots > 1 else math.inf

    def collisions(self) -> int:
        """Number of (substep, pair) contacts at or inside the collision radius."""
        limit = max(self.config.collision_radius, CONTACT_TOL)
        d = self.pair_distances()
        n = int(np.triu(d <= limit, k=1).sum())
        p = self.poses[:, :, :2]
        for o in self.config.obstacles:
            dist = np.hypot(p[..., 0] - o.x, p[..., 1] - o.y)
            n += int((dist <= o.radius).sum())
        return n

    def path_length(self, robot: int, start: float = -math.inf, end: float = math.inf) -> float:
        """Distance travelled by ``robot`` over substeps ending inside [start, end]."""
        p = self.poses[:, robot, :2]
        seg = np.linalg.norm(np.diff(p, axis=0), axis=1)
        t_end = self.times[1:]
        t_start = self.times[:-1]
        mask = (t_start >= start - 1e-9) & (t_end <= end + 1e-9)
        return float(seg[mask].sum())

    def stop_intervals(self, robot: int) -> list[tuple[float, float]]:
        """Intervals during which the robot sat halted without a fresh command."""
        out = []
        start = None
        dt = self.config.update_period
        for rec in self.ticks:
            if rec.robot_id != robot:
                continue
            halted = rec.mode is not Mode.COMMANDED and rec.active < dt
            if halted and start is None:
                start = rec.t + rec.active
            elif not halted and start is not None:
                out.append((start, rec.t))
                start = None
        if start is not None:
            out.append((start, float(self.times[-1])))
        return out

    def summary(self) -> dict:
        outages = []
        for o in self.config.failure.scheduled_outages:
            outages.append({
                "robot_id": o.robot_id,
                "start": o.start,
                "end": o.end,
                "distance": self.path_length(o.robot_id, o.start, o.end),
            })
        return {
            "collisions": self.collisions(),
            "min_pair_distance": self.min_pair_distance(),
            "stop_intervals": {i: self.stop_intervals(i) for i in range(self.n_robots)},
            "outages": outages,
        }

    def write_csv(self, target: Union[str, Path, TextIO]) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="") as fh:
                self.write_csv(fh)
            return
        w = csv.writer(target, lineterminator="\n")
        w.writerow(LOG_HEADER)
        near = self.nearest_distances()
        for k, t in enumerate(self.times):
            for i in range(self.n_robots):
                x, y, h = self.poses[k, i]
                v, om = self.velocities[k, i]
                w.writerow([
                    fmt(t), i, fmt(x), fmt(y), fmt(h), fmt(v), fmt(om),
                    self.modes[k, i], int(self.delivered[k, i]), fmt(self.horizons[k, i]), fmt(near[k, i]),
                ])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def run_scenario(cfg: ScenarioConfig, controller: Optional[Controller] = None) -> SimulationLog:
    cfg.validate()
    rng = np.random.default_rng(cfg.failure.seed)
    controller = controller if controller is not None else GoToGoal(cfg)
    n = len(cfg.robots)
    world = {i: RobotState(i, spec.pose) for i, spec in enumerate(cfg.robots)}
    S = cfg.substeps_per_tick
    dt = cfg.update_period

    times = [0.0]
    poses = [[(s.pose.x, s.pose.y, s.pose.heading) for s in cfg.robots]]
    vel = [[(0.0, 0.0)] * n]
    modes = [[Mode.STOPPED.value] * n]
    deliv = [[False] * n]
    hor = [[0.0] * n]
    records = []

    for k in range(cfg.n_ticks):
        t_k = cfg.tick_time(k)
        packets = decision_maker_tick(world, cfg, k, controller)
        flags = channel_deliver(packets, cfg.failure, t_k, rng)
        motion = {}
        for i in range(n):
            st = robot_tick(world[i], packets[i] if flags[i] else None, k, cfg)
            world[i] = st
            motion[i] = tick_motion(st, k, cfg)
            p = packets[i]
            records.append(TickRecord(k, t_k, i, flags[i], p.linear, p.angular, p.horizon, st.mode, motion[i][1]))

        start = {i: world[i].pose for i in range(n)}
        for m in range(1, S + 1):
            tau = m * dt / S
            row_p, row_v = [], []
            for i in range(n):
                cmd, active = motion[i]
                pose = integrate_pose(start[i], cmd, min(tau, active))
                row_p.append((pose.x, pose.y, pose.heading))
                row_v.append((cmd.linear, cmd.angular) if tau <= active + 1e-12 else (0.0, 0.0))
            times.append((k * S + m) * dt / S)
            poses.append(row_p)
            vel.append(row_v)
            modes.append([world[i].mode.value for i in range(n)])
            deliv.append([flags[i] for i in range(n)])
            hor.append([world[i].last_horizon for i in range(n)])
        for i in range(n):
            cmd, active = motion[i]
            st = world[i]
            world[i] = RobotState(st.id, integrate_pose(start[i], cmd, active), st.last_cmd,
                                  st.last_cmd_tick, st.last_horizon, st.mode)

    return SimulationLog(
        config=cfg,
        times=np.array(times),
        poses=np.array(poses, dtype=float),
        velocities=np.array(vel, dtype=float),
        modes=np.array(modes),
        delivered=np.array(deliv, dtype=bool),
        horizons=np.array(hor, dtype=float),
        ticks=records,
    )
