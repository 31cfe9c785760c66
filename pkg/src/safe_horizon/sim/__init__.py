from .controller import Controller, GoToGoal, decision_maker_tick, guard_commands, plan_tick
from .engine import SimulationLog, TickRecord, channel_deliver, robot_tick, run_scenario, tick_motion
from .model import (
    CommandPacket,
    ControllerParams,
    FailureModel,
    Mode,
    Outage,
    RobotSpec,
    RobotState,
    ScenarioConfig,
    fallback_motion,
    integrate_pose,
)
from .scenarios import outage_scenario, random_scenario
