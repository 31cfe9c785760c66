"""Central decision maker: go-to-goal commands, a pairwise stop guard, and safe horizons.

The guard provides the one-tick separation property the fallback strategy
relies on. For every pair it checks the motions the pair may actually
perform during the next tick: each robot either receives its new command
or falls back to its stored state machine (replay or stop). Any robot whose
*new* command takes part in a conflicting combination has its linear speed
zeroed; this repeats until nothing changes. Combinations where both robots
fall back are protected by the previously issued horizons.
"""
from __future__ import annotations

import math
from dataclasses import replace
from typing import Mapping, Protocol

import numpy as np

from ..ellipse import wrap_angle
from ..horizon import SafeTimeResult, VelocityCommand, fleet_horizons, open_loop_position
from .model import CommandPacket, ScenarioConfig, RobotState, fallback_motion


class Controller(Protocol):
    def commands(self, world: Mapping[int, RobotState], tick: int) -> dict[int, VelocityCommand]:
        ...


class GoToGoal:
    """Proportional waypoint follower; advances to the next waypoint inside ``goal_tolerance``."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.params = cfg.controller
        self.index = {i: 0 for i in range(len(cfg.robots))}

    def goal(self, i: int):
        spec = self.cfg.robots[i]
        if not spec.waypoints:
            return None
        return spec.waypoints[self.index[i]]

    def _advance(self, i: int, pose) -> None:
        spec = self.cfg.robots[i]
        n = len(spec.waypoints)
        for _ in range(n):
            gx, gy = spec.waypoints[self.index[i]]
            if math.hypot(gx - pose.x, gy - pose.y) > self.params.goal_tolerance:
                return
            if self.index[i] + 1 < n:
                self.index[i] += 1
            elif spec.loop:
                self.index[i] = 0
            else:
                return

    def commands(self, world, tick):
        out = {}
        for i, st in world.items():
            self._advance(i, st.pose)
            g = self.goal(i)
            if g is None:
                out[i] = VelocityCommand()
                continue
            dx, dy = g[0] - st.pose.x, g[1] - st.pose.y
            dist = math.hypot(dx, dy)
            if dist <= self.params.goal_tolerance:
                out[i] = VelocityCommand()
                continue
            err = wrap_angle(math.atan2(dy, dx) - st.pose.heading)
            v = min(1.0, self.params.linear_gain * dist) * max(math.cos(err), 0.0)
            out[i] = VelocityCommand.clipped(v, self.params.angular_gain * err)
        return out


def _path(pose, cmd: VelocityCommand, duration: float, taus: np.ndarray) -> np.ndarray:
    return open_loop_position(pose, cmd, np.minimum(taus, duration))


def _conflict(pa: np.ndarray, pb: np.ndarray, floor: float, threshold: float, slip: float) -> bool:
    """True if two sampled paths may come closer than allowed during the tick.

    ``slip`` bounds how much the distance can drop between samples, giving a
    rigorous lower bound ``lb`` on the continuous-time separation.
    """
    d = np.hypot(*(pa - pb).T)
    lb = float(np.min(0.5 * (d[:-1] + d[1:] - slip)))
    if lb >= threshold:
        return False
    separating = bool(np.all(np.diff(d) >= 0.0))
    return not (separating and lb > floor + 1e-9)


def guard_commands(
    world: Mapping[int, RobotState],
    desired: Mapping[int, VelocityCommand],
    cfg: ScenarioConfig,
    tick: int,
) -> dict[int, VelocityCommand]:
    """Zero the linear speed of every robot whose new command could cause a conflict."""
    dt = cfg.update_period
    g = cfg.controller.guard_samples
    taus = np.linspace(0.0, dt, g + 1)
    step = dt / g
    floor = cfg.collision_radius
    threshold = cfg.collision_radius + cfg.controller.guard_margin

    cmds = dict(desired)
    ids = sorted(world)
    fb = {}
    for i in ids:
        c, d = fallback_motion(world[i], tick, dt)
        fb[i] = _path(world[i].pose, c, d, taus)
    pos = {i: world[i].pose.position for i in ids}

    def new_path(i):
        return _path(world[i].pose, cmds[i], dt, taus)

    reach = threshold + 2.0 * dt + 1e-9
    pairs = [(i, j) for a, i in enumerate(ids) for j in ids[a + 1:]
             if math.dist(pos[i], pos[j]) < reach]

    changed = True
    while changed:
        changed = False
        paths = {i: new_path(i) for i in ids}
        for i, j in pairs:
            for use_new_i, use_new_j in ((True, True), (True, False), (False, True)):
                pi = paths[i] if use_new_i else fb[i]
                pj = paths[j] if use_new_j else fb[j]
                if not _conflict(pi, pj, floor, threshold, 2.0 * step):
                    continue
                for k, used in ((i, use_new_i), (j, use_new_j)):
                    if used and cmds[k].linear != 0.0:
                        cmds[k] = VelocityCommand(0.0, cmds[k].angular)
                        paths[k] = new_path(k)
                        changed = True
        for i in ids:
            if cmds[i].linear == 0.0:
                continue
            for o in cfg.obstacles:
                if math.hypot(pos[i][0] - o.x, pos[i][1] - o.y) >= o.radius + threshold + dt:
                    continue
                centre = np.array([[o.x, o.y]])
                if _conflict(paths[i], centre, o.radius, o.radius + cfg.controller.guard_margin, step):
                    cmds[i] = VelocityCommand(0.0, cmds[i].angular)
                    changed = True
                    break
    return cmds


def plan_tick(
    world: Mapping[int, RobotState],
    cfg: ScenarioConfig,
    tick: int,
    controller: Controller,
) -> tuple[dict[int, VelocityCommand], dict[int, SafeTimeResult]]:
    """Guarded commands and their safe horizons for one transmission round."""
    desired = controller.commands(world, tick)
    cmds = guard_commands(world, desired, cfg, tick)
    if cfg.use_horizons:
        fleet = {i: (world[i].pose, cmds[i]) for i in world}
        opts = cfg.solver
        if cfg.collision_radius > 0 and opts.robot_radius < cfg.collision_radius:
            opts = replace(opts, robot_radius=cfg.collision_radius)
        results = fleet_horizons(fleet, cfg.horizon_cap, opts, cfg.obstacles)
    else:
        results = {i: SafeTimeResult(0.0) for i in world}
    return cmds, results


def decision_maker_tick(
    world: Mapping[int, RobotState],
    cfg: ScenarioConfig,
    tick: int,
    controller: Controller,
) -> dict[int, CommandPacket]:
    """One transmission round: desired commands, stop guard, then safe horizons."""
    cmds, results = plan_tick(world, cfg, tick, controller)
    return {
        i: CommandPacket(i, tick, cmds[i].linear, cmds[i].angular, results[i].horizon)
        for i in sorted(world)
    }
