"""Built-in scenarios: the six-robot outage comparison and a seeded random generator."""
from __future__ import annotations

import math

import numpy as np

from ..ellipse import Pose
from .model import ControllerParams, FailureModel, Outage, RobotSpec, ScenarioConfig

OUTAGE_START = 3.1
OUTAGE_END = 8.3
OUTAGE_ROBOTS = (1, 4)


def _square_patrol(cx: float, cy: float, half: float, phase: int) -> list[tuple[float, float]]:
    corners = [(cx + half, cy - half), (cx + half, cy + half), (cx - half, cy + half), (cx - half, cy - half)]
    return corners[phase:] + corners[:phase]


def outage_scenario(use_horizons: bool = True, seed: int = 0) -> ScenarioConfig:
    """Six robots patrolling neighbouring squares; two of them lose the link over [3.1, 8.3)."""
    robots = []
    spacing, half = 4.0, 1.0
    for k in range(6):
        cx, cy = (k % 3) * spacing, (k // 3) * spacing
        wps = _square_patrol(cx, cy, half, k % 4)
        start = wps[-1]
        heading = math.atan2(wps[0][1] - start[1], wps[0][0] - start[0])
        robots.append(RobotSpec(Pose(start[0], start[1], heading), wps, loop=True))
    failure = FailureModel(
        scheduled_outages=[Outage(r, OUTAGE_START, OUTAGE_END) for r in OUTAGE_ROBOTS],
        drop_probability=0.0,
        seed=seed,
    )
    return ScenarioConfig(
        robots=robots,
        update_period=0.1,
        horizon_cap=3.0,
        duration=12.0,
        failure=failure,
        controller=ControllerParams(),
        substeps_per_tick=10,
        collision_radius=0.0,
        use_horizons=use_horizons,
    )


def random_scenario(
    seed: int,
    n_min: int = 4,
    n_max: int = 8,
    arena: float = 6.0,
    drop_probability: float = 0.5,
    duration: float = 6.0,
    horizon_cap: float = 2.0,
) -> ScenarioConfig:
    """Crowded random fleet with random outages; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    pts: list[tuple[float, float]] = []
    while len(pts) < n:
        p = tuple(rng.uniform(0.0, arena, 2))
        if all(math.dist(p, q) > 0.6 for q in pts):
            pts.append(p)
    robots = []
    for p in pts:
        wps = [tuple(rng.uniform(0.0, arena, 2)) for _ in range(3)]
        robots.append(RobotSpec(Pose(p[0], p[1], rng.uniform(-math.pi, math.pi)), wps, loop=True))
    outages = []
    for i in range(n):
        if rng.random() < 0.5:
            a = float(rng.uniform(0.0, duration))
            outages.append(Outage(i, a, a + float(rng.uniform(0.5, 4.0))))
    return ScenarioConfig(
        robots=robots,
        update_period=0.1,
        horizon_cap=horizon_cap,
        duration=duration,
        failure=FailureModel(outages, drop_probability, seed),
        substeps_per_tick=10,
        collision_radius=0.0,
    )
