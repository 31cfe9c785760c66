"""Convex hull of the unicycle reachable set and its slab-disk enclosure K(t).

All positions are in normalized units (|v| <= 1, |omega| <= 1), so time and
arc length coincide. Area helpers return *first-quadrant* areas; multiply by
four for the full set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

HALF_PI = 0.5 * math.pi
BOUNDARY_TOL = 1e-9
DEFAULT_SAMPLES = 1024


def _check_time(t):
    if np.any(np.asarray(t) <= 0):
        raise DomainError(f"time must be positive, got {t!r}")


def alpha(t):
    """Half-width of the slab |y| <= alpha(t) bounding the reachable set.

    Accepts a scalar or an array of times. ``1 - cos t`` is evaluated as
    ``2 sin^2(t/2)`` to keep precision near zero.
    """
    _check_time(t)
    if np.ndim(t) == 0:
        t = float(t)
        return 2.0 * math.sin(0.5 * t) ** 2 if t <= HALF_PI else t - HALF_PI + 1.0
    t = np.asarray(t, dtype=float)
    return np.where(t <= HALF_PI, 2.0 * np.sin(0.5 * np.minimum(t, HALF_PI)) ** 2, t - HALF_PI + 1.0)


def psi_max(t: float) -> float:
    return min(t, HALF_PI)


@dataclass(frozen=True)
class HullBoundaryPoint:
    t: float
    psi: float
    point: tuple[float, float]


@dataclass(frozen=True)
class KSetParams:
    t: float
    alpha: float

    @classmethod
    def at(cls, t: float) -> "KSetParams":
        return cls(t, alpha(t))


def hull_boundary_point(t: float, psi: float) -> np.ndarray:
    """Point of the curved first-quadrant hull boundary: turn for ``psi``, then go straight."""
    _check_time(t)
    hi = psi_max(t)
    if psi < -1e-12 or psi > hi + 1e-12:
        raise DomainError(f"psi={psi!r} outside [0, {hi!r}]")
    psi = min(max(psi, 0.0), hi)
    g = t - psi
    return np.array([math.sin(psi) + g * math.cos(psi), -math.cos(psi) + g * math.sin(psi) + 1.0])


def hull_curve(t: float, n: int = DEFAULT_SAMPLES) -> np.ndarray:
    """``n`` points of the first-quadrant curve, uniform in psi, from (t, 0) to the top corner."""
    _check_time(t)
    psi = np.linspace(0.0, psi_max(t), n)
    g = t - psi
    return np.column_stack([np.sin(psi) + g * np.cos(psi), 1.0 - np.cos(psi) + g * np.sin(psi)])


def hull_norm_sq(t, psi):
    g = t - psi
    return g * g + 2.0 - 2.0 * np.cos(psi) + 2.0 * g * np.sin(psi)


def hull_norm_sq_derivative(t, psi):
    """d/dpsi of the squared norm of the hull boundary point; never positive on the domain."""
    return 2.0 * (t - psi) * (np.cos(psi) - 1.0)


def _mirror_quadrants(q1: np.ndarray) -> np.ndarray:
    """Assemble a closed counterclockwise ring from a first-quadrant arc running
    from the +x axis towards the +y side."""
    flip_x = np.array([-1.0, 1.0])
    q2 = (q1 * flip_x)[::-1]
    q3 = -q1
    q4 = (q1 * -flip_x)[::-1]
    ring = np.vstack([q1, q2, q3[1:], q4[:-1]])
    return np.vstack([ring, ring[:1]])


def hull_boundary_polyline(t: float, n: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Closed ring approximating the boundary of conv(R(t)), ``n`` samples per quadrant.

    The first vertex is repeated at the end.
    """
    if n < 4:
        raise ValueError(f"need at least 4 samples per quadrant, got {n}")
    return _mirror_quadrants(hull_curve(t, n))


def kset_boundary_polyline(t: float, n: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Closed ring on the boundary of K(t); includes the four arc/slab corners exactly."""
    if n < 4:
        raise ValueError(f"need at least 4 samples per quadrant, got {n}")
    a = alpha(t)
    theta_c = math.asin(min(a / t, 1.0))
    n_arc = max(2, (3 * n) // 4)
    theta = np.linspace(0.0, theta_c, n_arc)
    arc = t * np.column_stack([np.cos(theta), np.sin(theta)])
    x_c = arc[-1, 0]
    xs = np.linspace(x_c, 0.0, n - n_arc + 1)[1:]
    top = np.column_stack([xs, np.full_like(xs, a)])
    return _mirror_quadrants(np.vstack([arc, top[:-1]]))


def polygon_area(points: np.ndarray) -> float:
    """Shoelace area of a simple polygon (open or closed ring)."""
    x, y = np.asarray(points, dtype=float).T
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def hull_area_first_quadrant(t: float) -> float:
    """Closed-form first-quadrant area of conv(R(t)); only valid for t > pi/2."""
    if t <= HALF_PI:
        raise DomainError("closed-form hull area requires t > pi/2; use hull_area_first_quadrant_sampled")
    pi = math.pi
    return (12.0 * pi * (t * t - 1.0) + t * (48.0 - 6.0 * pi * pi) + pi ** 3) / 48.0


def hull_area_first_quadrant_sampled(t: float, n: int = DEFAULT_SAMPLES) -> float:
    curve = hull_curve(t, n)
    region = np.vstack([[0.0, 0.0], curve, [0.0, curve[-1, 1]]])
    return polygon_area(region)


def kset_area_first_quadrant(t: float) -> float:
    if t <= HALF_PI:
        raise DomainError("closed-form K(t) area requires t > pi/2")
    s = math.asin(1.0 - (HALF_PI - 1.0) / t)
    return 0.5 * t * t * (s + 0.5 * math.sin(2.0 * s))


def kset_area_first_quadrant_sampled(t: float, n: int = DEFAULT_SAMPLES) -> float:
    ring = kset_boundary_polyline(t, n)
    return 0.25 * polygon_area(ring)


def kset_contains(t: float, p) -> bool:
    _check_time(t)
    px, py = float(p[0]), float(p[1])
    return math.hypot(px, py) <= t + BOUNDARY_TOL and abs(py) <= alpha(t) + BOUNDARY_TOL


def jaccard_nested(area_inner: float, area_outer: float) -> float:
    """Jaccard distance between nested sets given their areas."""
    if area_inner <= 0 or area_outer <= 0:
        raise ValueError("areas must be positive")
    if area_inner > area_outer * (1.0 + 1e-12):
        raise ValueError(f"inner area {area_inner} exceeds outer area {area_outer}")
    return max(0.0, 1.0 - area_inner / area_outer)
