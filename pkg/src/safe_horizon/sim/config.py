"""INI scenario files.

Layout::

    [scenario]
    update_period = 0.1
    horizon_cap = 3
    duration = 12
    substeps_per_tick = 10
    collision_radius = 0
    use_horizons = true

    [failure]
    drop_probability = 0
    seed = 0

    [controller]            ; optional, ControllerParams fields
    [solver]                ; optional: step, tol, margin_steps

    [robot.0]
    pose = x, y, heading
    waypoints = x1, y1; x2, y2
    loop = true
    outages = 3.1, 8.3; 10, 11    ; start,end pairs

    [obstacle.0]
    position = x, y
    radius = 0.5

Robot sections must be numbered 0..N-1 without gaps.
"""
from __future__ import annotations

import configparser
from dataclasses import fields
from pathlib import Path
from typing import Union

from ..ellipse import Pose
from ..errors import ConfigError
from ..horizon import Obstacle, SolverOptions
from .model import ControllerParams, FailureModel, Outage, RobotSpec, ScenarioConfig, fmt

_SCENARIO_KEYS = {
    "update_period": float,
    "horizon_cap": float,
    "duration": float,
    "substeps_per_tick": int,
    "collision_radius": float,
}
_SOLVER_KEYS = {"step": float, "tol": float, "margin_steps": float}


def _floats(text: str, n: int, where: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(where, f"expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise ConfigError(where, f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _pairs(text: str, where: str) -> list[tuple[float, float]]:
    items = [s.strip() for s in text.split(";") if s.strip()]
    return [_floats(s, 2, f"{where}[{k}]") for k, s in enumerate(items)]


def _get(section, key, conv, where):
    raw = section[key]
    try:
        if conv is bool:
            return section.getboolean(key)
        return conv(raw)
    except ValueError:
        raise ConfigError(where, f"cannot parse {raw!r} as {conv.__name__}") from None


def _check_unknown(section, allowed, prefix):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{prefix}.{key}", "unknown key")


def parse_config(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None

    kwargs = {}
    if cp.has_section("scenario"):
        sec = cp["scenario"]
        _check_unknown(sec, set(_SCENARIO_KEYS) | {"use_horizons"}, "scenario")
        for key, conv in _SCENARIO_KEYS.items():
            if key in sec:
                kwargs[key] = _get(sec, key, conv, f"scenario.{key}")
        if "use_horizons" in sec:
            kwargs["use_horizons"] = _get(sec, "use_horizons", bool, "scenario.use_horizons")

    failure = FailureModel()
    if cp.has_section("failure"):
        sec = cp["failure"]
        _check_unknown(sec, {"drop_probability", "seed"}, "failure")
        if "drop_probability" in sec:
            failure.drop_probability = _get(sec, "drop_probability", float, "failure.drop_probability")
        if "seed" in sec:
            failure.seed = _get(sec, "seed", int, "failure.seed")

    controller = ControllerParams()
    if cp.has_section("controller"):
        sec = cp["controller"]
        types = {f.name: type(getattr(controller, f.name)) for f in fields(ControllerParams)}
        _check_unknown(sec, set(types), "controller")
        for key in sec:
            setattr(controller, key, _get(sec, key, types[key], f"controller.{key}"))

    solver = {}
    if cp.has_section("solver"):
        sec = cp["solver"]
        _check_unknown(sec, set(_SOLVER_KEYS), "solver")
        for key in sec:
            solver[key] = _get(sec, key, _SOLVER_KEYS[key], f"solver.{key}")

    robot_secs = {}
    obstacles = []
    for name in cp.sections():
        if name in ("scenario", "failure", "controller", "solver"):
            continue
        kind, _, idx = name.partition(".")
        if kind not in ("robot", "obstacle") or not idx.isdigit():
            raise ConfigError(name, "unknown section")
        if kind == "robot":
            robot_secs[int(idx)] = cp[name]
        else:
            sec = cp[name]
            _check_unknown(sec, {"position", "radius"}, name)
            if "position" not in sec or "radius" not in sec:
                raise ConfigError(name, "needs position and radius")
            x, y = _floats(sec["position"], 2, f"{name}.position")
            r = _get(sec, "radius", float, f"{name}.radius")
            if r <= 0:
                raise ConfigError(f"{name}.radius", "must be positive")
            obstacles.append(Obstacle(x, y, r))

    if sorted(robot_secs) != list(range(len(robot_secs))):
        raise ConfigError("robot", "robot sections must be numbered 0..N-1")
    robots = []
    for i in range(len(robot_secs)):
        sec = robot_secs[i]
        where = f"robot.{i}"
        _check_unknown(sec, {"pose", "waypoints", "loop", "outages"}, where)
        if "pose" not in sec:
            raise ConfigError(f"{where}.pose", "missing")
        x, y, h = _floats(sec["pose"], 3, f"{where}.pose")
        wps = _pairs(sec.get("waypoints", ""), f"{where}.waypoints")
        loop = _get(sec, "loop", bool, f"{where}.loop") if "loop" in sec else False
        for a, b in _pairs(sec.get("outages", ""), f"{where}.outages"):
            failure.scheduled_outages.append(Outage(i, a, b))
        robots.append(RobotSpec(Pose(x, y, h), wps, loop))

    cfg = ScenarioConfig(
        robots=robots,
        failure=failure,
        controller=controller,
        solver=SolverOptions(**solver),
        obstacles=obstacles,
        **kwargs,
    )
    return cfg.validate()


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def dump_config(cfg: ScenarioConfig) -> str:
    lines = ["[scenario]"]
    for key in _SCENARIO_KEYS:
        val = getattr(cfg, key)
        lines.append(f"{key} = {val if isinstance(val, int) else fmt(val)}")
    lines.append(f"use_horizons = {'true' if cfg.use_horizons else 'false'}")
    lines += ["", "[failure]", f"drop_probability = {fmt(cfg.failure.drop_probability)}",
              f"seed = {cfg.failure.seed}", "", "[controller]"]
    for f in fields(ControllerParams):
        val = getattr(cfg.controller, f.name)
        lines.append(f"{f.name} = {val if isinstance(val, int) else fmt(val)}")
    lines += ["", "[solver]", f"step = {fmt(cfg.solver.step)}", f"tol = {fmt(cfg.solver.tol)}",
              f"margin_steps = {fmt(cfg.solver.margin_steps)}"]
    for i, r in enumerate(cfg.robots):
        lines += ["", f"[robot.{i}]", f"pose = {fmt(r.pose.x)}, {fmt(r.pose.y)}, {fmt(r.pose.heading)}"]
        if r.waypoints:
            lines.append("waypoints = " + "; ".join(f"{fmt(x)}, {fmt(y)}" for x, y in r.waypoints))
        lines.append(f"loop = {'true' if r.loop else 'false'}")
        outs = [o for o in cfg.failure.scheduled_outages if o.robot_id == i]
        if outs:
            lines.append("outages = " + "; ".join(f"{fmt(o.start)}, {fmt(o.end)}" for o in outs))
    for n, o in enumerate(cfg.obstacles):
        lines += ["", f"[obstacle.{n}]", f"position = {fmt(o.x)}, {fmt(o.y)}", f"radius = {fmt(o.radius)}"]
    return "\n".join(lines) + "\n"
