"""Oracle-backed verification suites shared by the CLI and the acceptance tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import geometry as geo
from . import oracles
from .ellipse import T_STAR, HorizonEllipse, Pose, min_ellipse_params
from .geometry import HALF_PI
from .sim import Mode, outage_scenario, random_scenario, run_scenario
from .sim.scenarios import OUTAGE_END, OUTAGE_ROBOTS, OUTAGE_START

OPTIMALITY_TIMES = (0.5, 1.0, 1.5, 2.5)
AREA_TIMES = (2.0, math.pi, 5.0, 10.0, 25.0)
JACCARD_TIMES = (5.0, 10.0, 25.0)
SAFETY_SUITES = {"soundness", "theorem3", "reproduction"}


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: measured={self.measured:.6g} {self.relation} tol={self.tolerance:.6g}"


def _le(name: str, measured: float, tol: float) -> Check:
    return Check(name, float(measured), tol, bool(measured <= tol))


def _lt(name: str, measured: float, tol: float) -> Check:
    return Check(name, float(measured), tol, bool(measured < tol), "<")


def _gt(name: str, measured: float, tol: float) -> Check:
    return Check(name, float(measured), tol, bool(measured > tol), ">")


def check_ellipse() -> list[Check]:
    out = []
    for t in OPTIMALITY_TIMES:
        A, B = min_ellipse_params(t)
        a, b = oracles.min_ellipse_bruteforce(t)
        out.append(_le(f"ellipse.optimality t={t:g}", abs(math.log(A * B) - math.log(a * b)), 1e-3))
    for label, tb in (("pi/2", HALF_PI), ("t*", T_STAR)):
        lo = min_ellipse_params(tb)
        hi = min_ellipse_params(math.nextafter(tb, math.inf))
        jump = max(abs(lo[0] - hi[0]), abs(lo[1] - hi[1]))
        out.append(_lt(f"ellipse.continuity at {label}", jump, 1e-9))
    worst = 0.0
    for t in np.linspace(0.01, T_STAR, 200):
        A, B = min_ellipse_params(t)
        al = geo.alpha(t)
        worst = max(worst, abs(B - (1.0 - A * (t * t - al * al)) / al ** 2) / B)
    out.append(_le("ellipse.B-from-A relation (relative)", worst, 1e-12))
    return out


def check_containment(n_times: int = 200, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_hull, worst_k = 0.0, 0.0
    for t in rng.uniform(0.0, 30.0, n_times):
        t = max(float(t), 1e-3)
        e = HorizonEllipse.at(t)
        for ring, key in ((geo.hull_boundary_polyline(t, 512), "h"), (geo.kset_boundary_polyline(t, 512), "k")):
            q = e.A * ring[:, 0] ** 2 + e.B * ring[:, 1] ** 2
            if key == "h":
                worst_hull = max(worst_hull, float(q.max()))
            else:
                worst_k = max(worst_k, float(q.max()))
    return [
        _le("containment.hull max membership", worst_hull, 1.0 + 1e-9),
        _le("containment.kset max membership", worst_k, 1.0 + 1e-9),
    ]


def check_areas() -> list[Check]:
    out = []
    for t in AREA_TIMES:
        ref = oracles.hull_area_polygon(t)
        out.append(_le(f"areas.hull t={t:g} rel err", abs(geo.hull_area_first_quadrant(t) - ref) / ref, 1e-4))
        ref = oracles.kset_area_quadrature(t)
        out.append(_le(f"areas.kset t={t:g} rel err", abs(geo.kset_area_first_quadrant(t) - ref) / ref, 1e-4))
    return out


def jaccard_table(times: Iterable[float]) -> list[tuple[float, float, float]]:
    """(t, d_J(hull, K), d_J(hull, ellipse)) from the independent area oracles."""
    rows = []
    for t in times:
        hull = oracles.hull_area_polygon(t)
        kset = oracles.kset_area_quadrature(t)
        A, B = min_ellipse_params(t)
        ell = math.pi / (4.0 * math.sqrt(A * B))
        rows.append((t, geo.jaccard_nested(hull, kset), geo.jaccard_nested(hull, ell)))
    return rows


def check_jaccard() -> list[Check]:
    rows = jaccard_table(JACCARD_TIMES)
    dk = [r[1] for r in rows]
    de = [r[2] for r in rows]
    steps_k = max(b - a for a, b in zip(dk, dk[1:]))
    steps_e = max(b - a for a, b in zip(de, de[1:]))
    out = [
        _lt("jaccard.hull-K strictly decreasing (max step)", steps_k, 0.0),
        _lt("jaccard.hull-ellipse strictly decreasing (max step)", steps_e, 0.0),
        _lt("jaccard.hull-ellipse at t=25", de[-1], 0.02),
        _lt("jaccard.hull-K at t=25", dk[-1], 0.01),
    ]
    return out


def check_derivative(n: int = 100, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        t = float(rng.uniform(0.05, 30.0))
        hi = min(t, HALF_PI)
        psi = float(rng.uniform(1e-4, hi - 1e-4))
        fd = oracles.finite_difference(lambda s: float(geo.hull_norm_sq(t, s)), psi, h=1e-6)
        worst = max(worst, abs(fd - float(geo.hull_norm_sq_derivative(t, psi))))
    return [_le("derivative.max |analytic - finite difference|", worst, 1e-6)]


def random_rollout_controls(rng: np.random.Generator, n: int) -> np.ndarray:
    """Admissible controls; half the pieces are bang-bang to push towards the boundary."""
    c = rng.uniform(-1.0, 1.0, (n, 2))
    bang = rng.random(n) < 0.5
    c[bang] = np.sign(c[bang])
    return c


SOUNDNESS_HORIZONS = (0.25, 0.5, 1.0, T_STAR, 2.5, 5.0, 10.0)


def check_soundness(n: int = 200, seed: int = 0, dt: float = 0.05,
                    horizons: Iterable[float] = SOUNDNESS_HORIZONS) -> list[Check]:
    """``n`` rollouts per horizon; every intermediate sample time is checked against its own ellipse."""
    rng = np.random.default_rng(seed)
    out = []
    for mu_end in horizons:
        worst = 0.0
        steps = int(math.ceil(mu_end / dt - 1e-9))
        for _ in range(n):
            x, y = rng.uniform(-5.0, 5.0, 2)
            h = float(rng.uniform(-math.pi, math.pi))
            controls = random_rollout_controls(rng, steps)
            # the final piece is shortened so the rollout ends exactly at mu_end
            pts = oracles.unicycle_rollout(x, y, h, controls[:-1], dt)
            last_dt = mu_end - dt * (steps - 1)
            tail = oracles.unicycle_rollout(*(_end_pose(x, y, h, controls[:-1], dt)), controls[-1:], last_dt)
            pts = np.vstack([pts, tail])
            mus = np.append(dt * np.arange(1, steps), mu_end)
            A, B = min_ellipse_params(mus)
            for a, b, p in zip(A, B, pts):
                worst = max(worst, oracles.local_membership(a, b, x, y, h, p))
        out.append(_le(f"soundness.max rollout membership mu={mu_end:.6g}", worst, 1.0 + 1e-6))
    return out


def _end_pose(x, y, h, controls, dt):
    for v, w in controls:
        p = oracles.unicycle_rollout(x, y, h, [(v, w)], dt)[0]
        x, y, h = p[0], p[1], h + w * dt
    return x, y, h


def check_collision_freedom(runs: int = 100, seed: int = 0, drop_probability: float = 0.5) -> list[Check]:
    collisions = 0
    min_d = math.inf
    for r in range(runs):
        log = run_scenario(random_scenario(seed * 100_003 + r, drop_probability=drop_probability))
        collisions += log.collisions()
        min_d = min(min_d, log.min_pair_distance())
    return [
        _le(f"theorem3.collision events over {runs} runs", collisions, 0),
        _gt("theorem3.min pairwise distance", min_d, 1e-9),
    ]


def outage_behaviour(log) -> dict[int, dict]:
    """Per outage robot: last delivery, horizon, expected/observed stop time and travel."""
    out = {}
    dt = log.config.update_period
    for r in OUTAGE_ROBOTS:
        recs = [x for x in log.ticks if x.robot_id == r]
        before = [x for x in recs if x.delivered and x.t < OUTAGE_START - 1e-9]
        last = before[-1]
        stop_at = last.t + last.sent_horizon
        during = [x for x in recs if OUTAGE_START - 1e-9 <= x.t < OUTAGE_END - 1e-9]
        open_loop_ok = all(
            (x.mode is Mode.OPEN_LOOP) == ((x.tick - last.tick) * dt < last.sent_horizon) for x in during
        )
        stop_obs = min(
            (x.t + x.active for x in during if x.active < dt - 1e-12), default=math.inf
        )
        out[r] = {
            "last_tick_time": last.t,
            "horizon": last.sent_horizon,
            "expected_stop": stop_at,
            "observed_stop": stop_obs,
            "modes_follow_horizon": open_loop_ok,
            "travel": log.path_length(r, OUTAGE_START, OUTAGE_END),
            "travel_after_stop": log.path_length(r, min(stop_obs, OUTAGE_END), OUTAGE_END),
        }
    return out


def check_reproduction(seed: int = 0) -> list[Check]:
    out = []
    with_h = run_scenario(outage_scenario(True, seed))
    base = run_scenario(outage_scenario(False, seed))
    for r, b in outage_behaviour(with_h).items():
        out.append(_gt(f"reproduction.horizons robot {r} travel during outage", b["travel"], 0.0))
        expected = min(b["expected_stop"], OUTAGE_END)
        out.append(_le(f"reproduction.horizons robot {r} |stop - (t_l + s)|", abs(b["observed_stop"] - expected), 1e-9))
        out.append(_le(f"reproduction.horizons robot {r} travel after stop", b["travel_after_stop"], 0.0))
        out.append(_le(f"reproduction.horizons robot {r} open-loop modes off-schedule",
                       0 if b["modes_follow_horizon"] else 1, 0))
    for r, b in outage_behaviour(base).items():
        out.append(_le(f"reproduction.baseline robot {r} travel during outage", b["travel"], 0.0))
    out.append(_le("reproduction.horizons collisions", with_h.collisions(), 0))
    out.append(_le("reproduction.baseline collisions", base.collisions(), 0))
    return out


def check_determinism(seed: int = 3) -> list[Check]:
    a = run_scenario(random_scenario(seed)).to_csv()
    b = run_scenario(random_scenario(seed)).to_csv()
    c = run_scenario(outage_scenario(True)).to_csv()
    d = run_scenario(outage_scenario(True)).to_csv()
    diff = int(a != b) + int(c != d)
    return [_le("determinism.differing logs", diff, 0)]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "ellipse": check_ellipse,
    "containment": check_containment,
    "areas": check_areas,
    "jaccard": check_jaccard,
    "derivative": check_derivative,
    "soundness": check_soundness,
    "theorem3": check_collision_freedom,
    "reproduction": check_reproduction,
    "determinism": check_determinism,
}


def run_suite(name: str, runs: int = 100, seed: int = 7) -> list[Check]:
    if name == "all":
        return [c for n in SUITES for c in run_suite(n, runs, seed)]
    if name not in SUITES:
        raise KeyError(name)
    if name == "theorem3":
        return check_collision_freedom(runs=runs, seed=seed)
    if name in ("containment", "derivative", "soundness"):
        return SUITES[name](seed=seed)
    return SUITES[name]()
