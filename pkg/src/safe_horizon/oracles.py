"""Brute-force references used by the verification suites and tests.

Nothing here calls into the analytic ellipse formulas or the entry scan;
each function re-derives its answer by sampling, quadrature or simulation.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize


def _alpha(t: float) -> float:
    # independent copy of the slab half-width: top of the turn-then-straight family
    psi = min(t, 0.5 * math.pi)
    return 1.0 - math.cos(psi) + (t - psi) * math.sin(psi)


def kset_samples(t: float, n: int = 720) -> np.ndarray:
    """``n`` points on the boundary of K(t), spread over all four quadrants, corners included."""
    a = _alpha(t)
    theta_c = math.asin(min(a / t, 1.0))
    per_q = n // 4
    n_arc = max(2, per_q // 2)
    th = np.linspace(0.0, theta_c, n_arc)
    arc = np.column_stack([t * np.cos(th), t * np.sin(th)])
    xs = np.linspace(arc[-1, 0], 0.0, per_q - n_arc + 1)[1:]
    top = np.column_stack([xs, np.full_like(xs, a)])
    q1 = np.vstack([arc, top])
    return np.vstack([q1, q1 * [-1, 1], q1 * [-1, -1], q1 * [1, -1]])


def min_ellipse_bruteforce(t: float, n: int = 720) -> tuple[float, float]:
    """Minimum-area origin-centred axis-aligned ellipse through sampled K(t).

    For a fixed ``A`` the largest feasible ``B`` is a minimum over the sample
    points, so ``log A + log B_max(A)`` is maximised with a dense grid
    followed by bounded scalar refinement.
    """
    pts = kset_samples(t, n)
    x2, y2 = pts[:, 0] ** 2, pts[:, 1] ** 2
    a_max = 1.0 / x2.max()
    has_y = y2 > 1e-300

    def b_max(A):
        return np.min((1.0 - A * x2[has_y]) / y2[has_y])

    def neg(A):
        b = b_max(A)
        return math.inf if b <= 0 else -(math.log(A) + math.log(b))

    grid = np.linspace(a_max * 1e-3, a_max, 4001)
    bg = np.min((1.0 - grid[:, None] * x2[has_y]) / y2[has_y], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(bg > 0, -(np.log(grid) + np.log(np.where(bg > 0, bg, 1.0))), np.inf)
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    A = float(res.x) if res.fun <= vals[k] else float(grid[k])
    return A, float(b_max(A))


def min_ellipse_general(t: float, n: int = 180) -> float:
    """-log det H of the minimum-volume ellipse with free centre and orientation (convex program)."""
    import cvxpy as cp

    pts = kset_samples(t, n)
    M = cp.Variable((2, 2), PSD=True)
    b = cp.Variable(2)
    cons = [cp.norm(M @ p + b) <= 1 for p in pts]
    prob = cp.Problem(cp.Maximize(cp.log_det(M)), cons)
    prob.solve(solver=cp.CLARABEL)
    return -2.0 * float(prob.value)


def hull_area_polygon(t: float, n: int = 200_000) -> float:
    """First-quadrant hull area by shoelace over a densely sampled boundary."""
    psi = np.linspace(0.0, min(t, 0.5 * math.pi), n)
    g = t - psi
    x = np.sin(psi) + g * np.cos(psi)
    y = 1.0 - np.cos(psi) + g * np.sin(psi)
    X = np.concatenate([[0.0], x, [0.0]])
    Y = np.concatenate([[0.0], y, [y[-1]]])
    return 0.5 * abs(float(np.dot(X, np.roll(Y, -1)) - np.dot(Y, np.roll(X, -1))))


def kset_area_quadrature(t: float) -> float:
    a = _alpha(t)
    val, _ = integrate.quad(lambda y: math.sqrt(max(t * t - y * y, 0.0)), 0.0, a, epsabs=1e-13, epsrel=1e-13)
    return val


def finite_difference(f, x: float, h: float = 1e-5) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def unicycle_rollout(x: float, y: float, heading: float, controls: np.ndarray, dt: float) -> np.ndarray:
    """Positions after each piecewise-constant control ``(v, w)`` held for ``dt``, exact arcs."""
    out = np.empty((len(controls), 2))
    for k, (v, w) in enumerate(controls):
        if abs(w * dt) < 1e-6:
            # straight step at the mid-arc heading; the arc formula cancels badly here
            mid = heading + 0.5 * w * dt
            x += v * dt * math.cos(mid)
            y += v * dt * math.sin(mid)
            heading += w * dt
        else:
            r = v / w
            x += r * (math.sin(heading + w * dt) - math.sin(heading))
            y += r * (math.cos(heading) - math.cos(heading + w * dt))
            heading += w * dt
        out[k] = x, y
    return out


def local_membership(A: float, B: float, cx: float, cy: float, ch: float, p) -> float:
    """Quadratic form of ``p`` for the ellipse diag(A, B) posed at (cx, cy) with heading ch."""
    dx, dy = p[0] - cx, p[1] - cy
    c, s = math.cos(ch), math.sin(ch)
    u, v = c * dx + s * dy, -s * dx + c * dy
    return A * u * u + B * v * v


def dense_entry_time(traj, member, L: float, h: float = 1e-4) -> float:
    """First grid time in (0, L] where ``member(mu, traj(mu)) <= 1``; ``L`` if none."""
    for mu in np.arange(h, L + 0.5 * h, h):
        if member(mu, traj(mu)) <= 1.0:
            return float(mu)
    return float(L)
