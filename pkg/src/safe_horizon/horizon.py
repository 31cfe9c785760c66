"""Safe open-loop time horizons against neighbours' ellipsoidal reachable sets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .ellipse import Pose, inflated_params, min_ellipse_params


@dataclass(frozen=True)
class VelocityCommand:
    linear: float = 0.0
    angular: float = 0.0

    def __post_init__(self):
        if not (abs(self.linear) <= 1.0 and abs(self.angular) <= 1.0):
            raise ValueError(f"velocity command out of bounds: ({self.linear}, {self.angular})")
        object.__setattr__(self, "linear", float(self.linear))
        object.__setattr__(self, "angular", float(self.angular))

    @classmethod
    def clipped(cls, linear: float, angular: float) -> "VelocityCommand":
        return cls(min(1.0, max(-1.0, linear)), min(1.0, max(-1.0, angular)))


STOP = VelocityCommand(0.0, 0.0)


@dataclass(frozen=True)
class SafeTimeResult:
    horizon: float
    limiting_neighbor: Optional[int] = None
    capped: bool = False


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the entry scan.

    ``step`` is the coarse grid, ``tol`` the final bracket width, ``margin_steps``
    subtracts ``margin_steps * step`` from each pairwise time and
    ``robot_radius`` grows every neighbour ellipse.
    """

    step: float = 0.01
    tol: float = 1e-6
    margin_steps: float = 0.0
    robot_radius: float = 0.0
    refine_points: int = 33


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class Obstacle:
    x: float
    y: float
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("obstacle radius must be positive")


@dataclass(frozen=True)
class UnitScale:
    """Map between physical units and the normalized model (|v|, |omega| <= 1)."""

    v_max: float
    omega_max: float

    @property
    def length_unit(self) -> float:
        return self.v_max / self.omega_max

    @property
    def time_unit(self) -> float:
        return 1.0 / self.omega_max

    def to_normalized(self, length: float = 0.0, time: float = 0.0) -> tuple[float, float]:
        return length / self.length_unit, time / self.time_unit

    def to_physical(self, length: float = 0.0, time: float = 0.0) -> tuple[float, float]:
        return length * self.length_unit, time * self.time_unit

    def command(self, v: float, omega: float) -> VelocityCommand:
        return VelocityCommand(v / self.v_max, omega / self.omega_max)


def _displacement(heading, v, w, mu):
    # chord form of the arc: exact for w != 0 and reduces to the segment for w == 0
    half = 0.5 * w * mu
    chord = v * mu * np.sinc(half / math.pi)
    ang = heading + half
    return chord * np.cos(ang), chord * np.sin(ang)


def open_loop_position(start: Pose, cmd: VelocityCommand, mu):
    """Position after repeating ``cmd`` for ``mu`` time units from ``start``.

    ``mu`` may be an array; the result then has shape ``mu.shape + (2,)``.
    """
    if np.ndim(mu) == 0:
        mu = float(mu)
        if mu < 0:
            raise ValueError("elapsed time must be non-negative")
        half = 0.5 * cmd.angular * mu
        chord = cmd.linear * mu * (math.sin(half) / half if half != 0.0 else 1.0)
        ang = start.heading + half
        return np.array([start.x + chord * math.cos(ang), start.y + chord * math.sin(ang)])
    if np.any(np.asarray(mu) < 0):
        raise ValueError("elapsed time must be non-negative")
    dx, dy = _displacement(start.heading, cmd.linear, cmd.angular, mu)
    return np.stack([start.x + dx, start.y + dy], axis=-1)


def neighbors(positions: Mapping[int, Sequence[float]], i: int, L: float, radius: float = 0.0) -> set[int]:
    """Robots strictly closer than ``2L (+ radius)`` to robot ``i``."""
    if L <= 0:
        raise ValueError("horizon cap must be positive")
    if i not in positions:
        raise ValueError(f"unknown robot id {i!r}")
    zi = np.asarray(positions[i], dtype=float)
    reach = 2.0 * L + radius
    return {
        j for j, zj in positions.items()
        if j != i and math.dist(zi, np.asarray(zj, dtype=float)) < reach
    }


# q-function: (mu of shape (R, K), row indices of shape (R,)) -> membership values (R, K)
QFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _ellipse_q(
    starts: Sequence[Pose],
    cmds: Sequence[VelocityCommand],
    others: Sequence[Pose],
    radius: float,
) -> QFunction:
    """Row r tests robot ``starts[r]`` replaying ``cmds[r]`` against the ellipse posed at ``others[r]``."""
    sx = np.array([p.x for p in starts])[:, None]
    sy = np.array([p.y for p in starts])[:, None]
    sh = np.array([p.heading for p in starts])[:, None]
    sv = np.array([c.linear for c in cmds])[:, None]
    sw = np.array([c.angular for c in cmds])[:, None]
    cx = np.array([p.x for p in others])[:, None]
    cy = np.array([p.y for p in others])[:, None]
    ch = np.array([p.heading for p in others])
    cos_h, sin_h = np.cos(ch)[:, None], np.sin(ch)[:, None]

    def q(mu, rows):
        mu = np.maximum(mu, 1e-6)
        dx, dy = _displacement(sh[rows], sv[rows], sw[rows], mu)
        rx = sx[rows] + dx - cx[rows]
        ry = sy[rows] + dy - cy[rows]
        c, s = cos_h[rows], sin_h[rows]
        ux = c * rx + s * ry
        uy = -s * rx + c * ry
        A, B = inflated_params(*min_ellipse_params(mu), radius)
        return A * ux * ux + B * uy * uy

    return q


def _obstacle_q(start: Pose, cmd: VelocityCommand, obstacles: Sequence[Obstacle]) -> QFunction:
    ox = np.array([o.x for o in obstacles])
    oy = np.array([o.y for o in obstacles])
    r2 = np.array([o.radius ** 2 for o in obstacles])

    def q(mu, rows):
        zi = open_loop_position(start, cmd, mu)
        dx = zi[..., 0] - ox[rows, None]
        dy = zi[..., 1] - oy[rows, None]
        return (dx * dx + dy * dy) / r2[rows, None]

    return q


def _entry_scan(q: QFunction, n_rows: int, L: float, opts: SolverOptions) -> np.ndarray:
    """Per-row largest time before the trajectory first enters the set, capped at ``L``.

    Coarse grid scan; local minima of the grid values are re-sampled on a
    finer sub-grid to catch entries that dip in and out between grid points;
    the first bracket is then narrowed on a sub-grid to ``opts.tol``. The left (outside)
    end of the bracket is returned.
    """
    h = opts.step
    m = max(1, int(math.ceil(L / h - 1e-9)))
    grid = np.minimum(np.arange(1, m + 1) * h, L)
    rows = np.arange(n_rows)
    qv = q(np.broadcast_to(grid, (n_rows, m)), rows)

    inside = qv <= 1.0
    first = np.where(inside.any(axis=1), inside.argmax(axis=1), m)
    lo = np.where(first > 0, grid[np.maximum(first - 1, 0)], 0.0)
    hi = np.where(first < m, grid[np.minimum(first, m - 1)], np.inf)

    prev = np.concatenate([np.full((n_rows, 1), np.inf), qv[:, :-1]], axis=1)
    nxt = np.concatenate([qv[:, 1:], np.full((n_rows, 1), np.inf)], axis=1)
    k_idx = np.arange(m)
    dips = (qv <= prev) & (qv <= nxt) & ~inside & (k_idx[None, :] < first[:, None])
    dr, dk = np.nonzero(dips)
    if dr.size:
        left = np.where(dk > 0, grid[np.maximum(dk - 1, 0)], 0.0)
        right = grid[np.minimum(dk + 1, m - 1)]
        frac = np.linspace(0.0, 1.0, opts.refine_points)
        sub = left[:, None] + (right - left)[:, None] * frac[None, :]
        sub[:, 0] = np.maximum(sub[:, 0], 1e-12)
        qs = q(sub, dr)
        hit = qs <= 1.0
        for r, row_hit, row_mu in zip(dr, hit, sub):
            if not row_hit.any():
                continue
            c = int(row_hit.argmax())
            if c == 0 or row_mu[c] >= hi[r]:
                continue
            hi[r] = row_mu[c]
            lo[r] = row_mu[c - 1]

    found = np.isfinite(hi)
    out = np.full(n_rows, float(L))
    if not found.any():
        return out
    fr = rows[found]
    a, b = lo[found].copy(), hi[found].copy()
    frac = np.linspace(0.0, 1.0, opts.refine_points)
    while np.any(b - a > opts.tol):
        # multi-section: keep the first outside/inside pair of a uniform sub-grid
        sub = a[:, None] + (b - a)[:, None] * frac[None, :]
        ins = q(sub, fr) <= 1.0
        ins[:, 0] = False
        ins[:, -1] = True
        c = ins.argmax(axis=1)
        idx = np.arange(fr.size)
        a, b = sub[idx, c - 1], sub[idx, c]
    out[found] = np.clip(a - opts.margin_steps * h, 0.0, L)
    return out


def pairwise_safe_time(
    i_state: tuple[Pose, VelocityCommand],
    j_pose: Pose,
    L: float,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> float:
    """Longest time robot i can replay its command while staying outside j's posed ellipse."""
    if L <= 0:
        raise ValueError("horizon cap must be positive")
    pose, cmd = i_state
    d = math.hypot(pose.x - j_pose.x, pose.y - j_pose.y)
    if d < 1e-12:
        return 0.0
    if d >= 2.0 * L + opts.robot_radius:
        return float(L)
    return float(_entry_scan(_ellipse_q([pose], [cmd], [j_pose], opts.robot_radius), 1, L, opts)[0])


def obstacle_safe_time(
    i_state: tuple[Pose, VelocityCommand],
    obstacle: Obstacle,
    L: float,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> float:
    """Time until the open-loop path first comes within ``obstacle.radius`` of a static point."""
    pose, cmd = i_state
    if math.hypot(pose.x - obstacle.x, pose.y - obstacle.y) <= obstacle.radius:
        return 0.0
    return float(_entry_scan(_obstacle_q(pose, cmd, [obstacle]), 1, L, opts)[0])


def safe_horizon(
    fleet: Mapping[int, tuple[Pose, VelocityCommand]],
    i: int,
    L: float,
    opts: SolverOptions = DEFAULT_OPTIONS,
    obstacles: Iterable[Obstacle] = (),
) -> SafeTimeResult:
    """Minimum pairwise safe time of robot ``i`` over its neighbour set.

    Obstacles are reported as ``limiting_neighbor = -(index + 1)``.
    """
    if i not in fleet:
        raise ValueError(f"unknown robot id {i!r}")
    return fleet_horizons(fleet, L, opts, obstacles, ids=[i])[i]


def fleet_horizons(
    fleet: Mapping[int, tuple[Pose, VelocityCommand]],
    L: float,
    opts: SolverOptions = DEFAULT_OPTIONS,
    obstacles: Iterable[Obstacle] = (),
    ids: Optional[Sequence[int]] = None,
) -> dict[int, SafeTimeResult]:
    """Safe horizons for several robots of one snapshot, scanning all neighbour pairs in one batch."""
    if L <= 0:
        raise ValueError("horizon cap must be positive")
    ids = list(fleet) if ids is None else list(ids)
    positions = {j: (p.x, p.y) for j, (p, _) in fleet.items()}

    pairs = []
    for i in ids:
        for j in sorted(neighbors(positions, i, L, opts.robot_radius)):
            pairs.append((i, j))
    times = {}
    live = []
    for i, j in pairs:
        pi, pj = fleet[i][0], fleet[j][0]
        if math.hypot(pi.x - pj.x, pi.y - pj.y) < 1e-12:
            times[i, j] = 0.0
        else:
            live.append((i, j))
    if live:
        q = _ellipse_q(
            [fleet[i][0] for i, _ in live],
            [fleet[i][1] for i, _ in live],
            [fleet[j][0] for _, j in live],
            opts.robot_radius,
        )
        for pair, s in zip(live, _entry_scan(q, len(live), L, opts)):
            times[pair] = float(s)

    obstacles = list(obstacles)
    out = {}
    for i in ids:
        best, who = float(L), None
        for (a, j), s in times.items():
            if a == i and s < best:
                best, who = s, j
        pose, cmd = fleet[i]
        for n, o in enumerate(obstacles):
            if math.hypot(pose.x - o.x, pose.y - o.y) >= L + o.radius:
                continue
            s = obstacle_safe_time((pose, cmd), o, L, opts)
            if s < best:
                best, who = s, -(n + 1)
        out[i] = SafeTimeResult(best, who, capped=who is None)
    return out
