"""Data types shared by the simulator: robot state, packets, failure model and scenario config."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from ..ellipse import Pose
from ..errors import ConfigError, WireFormatError
from ..horizon import STOP, Obstacle, SolverOptions, VelocityCommand, open_loop_position

WIRE_TAG = "SH1"


def fmt(x: float) -> str:
    """Nine significant digits, locale independent."""
    s = format(float(x), ".9g")
    return "0" if s == "-0" else s


class Mode(str, enum.Enum):
    COMMANDED = "commanded"
    OPEN_LOOP = "open_loop"
    STOPPED = "stopped"


@dataclass(frozen=True)
class CommandPacket:
    robot_id: int
    tick: int
    linear: float
    angular: float
    horizon: float

    def __post_init__(self):
        if not (abs(self.linear) <= 1.0 and abs(self.angular) <= 1.0):
            raise WireFormatError(f"speeds out of bounds: v={self.linear}, omega={self.angular}")
        if not self.horizon >= 0.0:
            raise WireFormatError(f"negative horizon {self.horizon}")

    @property
    def command(self) -> VelocityCommand:
        return VelocityCommand(self.linear, self.angular)

    def encode(self) -> str:
        return (
            f"{WIRE_TAG} {self.robot_id} {self.tick} {fmt(self.linear)} "
            f"{fmt(self.angular)} {fmt(self.horizon)}\n"
        )

    @classmethod
    def decode(cls, line: str) -> "CommandPacket":
        parts = line.split()
        if len(parts) != 6 or parts[0] != WIRE_TAG:
            raise WireFormatError(f"malformed packet: {line!r}")
        try:
            rid, tick = int(parts[1]), int(parts[2])
            v, w, s = (float(p) for p in parts[3:])
        except ValueError as exc:
            raise WireFormatError(f"malformed packet: {line!r}") from exc
        if not all(math.isfinite(x) for x in (v, w, s)):
            raise WireFormatError(f"non-finite field in packet: {line!r}")
        return cls(rid, tick, v, w, s)


@dataclass(frozen=True)
class RobotState:
    """Per-robot memory of the fallback state machine.

    ``last_cmd_tick`` is the tick of the last delivered packet and
    ``last_horizon`` the safe horizon it carried.
    """

    id: int
    pose: Pose
    last_cmd: VelocityCommand = STOP
    last_cmd_tick: int = 0
    last_horizon: float = 0.0
    mode: Mode = Mode.STOPPED


@dataclass(frozen=True)
class Outage:
    robot_id: int
    start: float
    end: float

    def covers(self, t: float) -> bool:
        return self.start - 1e-9 <= t < self.end - 1e-9


@dataclass
class FailureModel:
    scheduled_outages: list[Outage] = field(default_factory=list)
    drop_probability: float = 0.0
    seed: int = 0

    def validate(self):
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ConfigError("failure.drop_probability", "must lie in [0, 1]")
        for n, o in enumerate(self.scheduled_outages):
            if not o.start < o.end:
                raise ConfigError(f"failure.outages[{n}]", "start must precede end")


@dataclass
class ControllerParams:
    """Go-to-goal gains and the pairwise stop guard."""

    linear_gain: float = 1.0
    angular_gain: float = 2.0
    goal_tolerance: float = 0.1
    guard_margin: float = 0.1
    guard_samples: int = 20


@dataclass
class RobotSpec:
    pose: Pose
    waypoints: list[tuple[float, float]] = field(default_factory=list)
    loop: bool = False


@dataclass
class ScenarioConfig:
    robots: list[RobotSpec]
    update_period: float = 0.1
    horizon_cap: float = 3.0
    duration: float = 10.0
    failure: FailureModel = field(default_factory=FailureModel)
    controller: ControllerParams = field(default_factory=ControllerParams)
    solver: SolverOptions = field(default_factory=SolverOptions)
    substeps_per_tick: int = 10
    collision_radius: float = 0.0
    use_horizons: bool = True
    obstacles: list[Obstacle] = field(default_factory=list)

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration / self.update_period))

    def tick_time(self, k: int) -> float:
        return k * self.update_period

    def validate(self) -> "ScenarioConfig":
        if not self.robots:
            raise ConfigError("robots", "at least one robot is required")
        if not self.update_period > 0:
            raise ConfigError("scenario.update_period", "must be positive")
        if not self.horizon_cap > 0:
            raise ConfigError("scenario.horizon_cap", "must be positive")
        if not self.duration > 0:
            raise ConfigError("scenario.duration", "must be positive")
        if self.substeps_per_tick < 1:
            raise ConfigError("scenario.substeps_per_tick", "must be at least 1")
        if self.collision_radius < 0:
            raise ConfigError("scenario.collision_radius", "must be non-negative")
        if self.controller.guard_samples < 2:
            raise ConfigError("controller.guard_samples", "must be at least 2")
        if self.controller.guard_margin <= 0:
            raise ConfigError("controller.guard_margin", "must be positive")
        self.failure.validate()
        for o in self.failure.scheduled_outages:
            if not 0 <= o.robot_id < len(self.robots):
                raise ConfigError("failure.outages", f"unknown robot id {o.robot_id}")
        return self


def integrate_pose(pose: Pose, cmd: VelocityCommand, dt: float) -> Pose:
    """Exact constant-control unicycle flow for ``dt``."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    x, y = open_loop_position(pose, cmd, dt)
    return Pose(x, y, pose.heading + cmd.angular * dt)


def fallback_motion(state: RobotState, tick: int, period: float) -> tuple[VelocityCommand, float]:
    """Command a robot executes during tick ``tick`` if no packet arrives, and for how long.

    Replays the stored command while ``elapsed < horizon``, never past the
    horizon itself; otherwise stands still.
    """
    elapsed = (tick - state.last_cmd_tick) * period
    if elapsed < state.last_horizon:
        return state.last_cmd, min(period, state.last_horizon - elapsed)
    return STOP, 0.0


__all__ = [
    "CommandPacket",
    "ControllerParams",
    "FailureModel",
    "Mode",
    "Outage",
    "RobotSpec",
    "RobotState",
    "ScenarioConfig",
    "fallback_motion",
    "fmt",
    "integrate_pose",
]
