"""Analytic minimum-area ellipse around K(t) and posed membership tests.

The ellipse is origin-centred and axis-aligned in the robot frame,
``{u : A u_x^2 + B u_y^2 <= 1}``. Three regimes:

* ``0 < t <= pi/2`` and ``pi/2 < t <= T_STAR``: ``A = 1/(2(t^2 - alpha^2))``,
  ``B = 1/(2 alpha^2)``, with the matching branch of ``alpha``;
* ``t > T_STAR``: the radius-``t`` circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .geometry import HALF_PI, alpha

T_STAR = (1.0 + 1.0 / math.sqrt(2.0)) * (math.pi - 2.0)
DEGENERATE_T = 1e-9


def wrap_angle(a: float) -> float:
    """Map an angle into [-pi, pi]."""
    return math.remainder(a, 2.0 * math.pi)


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def transformed(self, dx: float, dy: float, rotation: float) -> "Pose":
        """Rigid motion: rotate about the origin by ``rotation`` then translate."""
        c, s = math.cos(rotation), math.sin(rotation)
        return Pose(c * self.x - s * self.y + dx, s * self.x + c * self.y + dy, self.heading + rotation)


def min_ellipse_params(t):
    """Return ``(A, B)`` of the minimum-area ellipse enclosing K(t).

    Works elementwise on arrays.
    """
    if np.any(np.asarray(t) <= 0):
        raise DomainError(f"time must be positive, got {t!r}")
    if np.ndim(t) == 0:
        t = float(t)
        if t > T_STAR:
            a = 1.0 / (t * t)
            return a, a
        al = alpha(t)
        return 1.0 / (2.0 * (t * t - al * al)), 1.0 / (2.0 * al * al)
    t = np.asarray(t, dtype=float)
    al = alpha(t)
    circle = t > T_STAR
    t2 = t * t
    with np.errstate(divide="ignore"):
        A = np.where(circle, 1.0 / t2, 1.0 / (2.0 * (t2 - al * al)))
        B = np.where(circle, 1.0 / t2, 1.0 / (2.0 * al * al))
    return A, B


def ellipse_area_first_quadrant(t: float) -> float:
    A, B = min_ellipse_params(t)
    return math.pi / (4.0 * math.sqrt(A * B))


@dataclass(frozen=True)
class HorizonEllipse:
    t: float
    A: float
    B: float
    pose: Optional[Pose] = None

    @classmethod
    def at(cls, t: float, pose: Optional[Pose] = None) -> "HorizonEllipse":
        A, B = min_ellipse_params(t)
        return cls(float(t), float(A), float(B), pose)

    @property
    def semi_axes(self) -> tuple[float, float]:
        return 1.0 / math.sqrt(self.A), 1.0 / math.sqrt(self.B)

    def to_local(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.pose is None:
            return p
        d = p - self.pose.position
        c, s = math.cos(self.pose.heading), math.sin(self.pose.heading)
        return np.array([c * d[0] + s * d[1], -s * d[0] + c * d[1]])

    def membership(self, p, inflate: float = 0.0) -> float:
        return ellipse_membership(self, p, inflate)

    def boundary(self, n: int = 256) -> np.ndarray:
        """Closed boundary ring in the world frame (first vertex repeated)."""
        a, b = self.semi_axes
        th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        pts = np.column_stack([a * np.cos(th), b * np.sin(th)])
        if self.pose is not None:
            c, s = math.cos(self.pose.heading), math.sin(self.pose.heading)
            pts = pts @ np.array([[c, s], [-s, c]]) + self.pose.position
        return np.vstack([pts, pts[:1]])


def inflated_params(A, B, radius: float):
    """``(A, B)`` of an axis-aligned ellipse containing the ellipse grown by ``radius``.

    Outer bound of the Minkowski sum with a disk, ``(1 + 1/p) Q + (1 + p) r^2 I``
    with ``p = major / r``: the major semi-axis becomes ``major + r`` and the
    minor one ``sqrt(minor^2 + r^2 + r major + r minor^2 / major)``. Shrinks to
    the radius disk as the ellipse collapses to a point. Works elementwise.
    """
    if radius <= 0:
        return A, B
    ax, ay = 1.0 / np.sqrt(A), 1.0 / np.sqrt(B)
    major, minor = np.maximum(ax, ay), np.minimum(ax, ay)
    big = major + radius
    small = np.sqrt(minor * minor + radius * radius + radius * major + radius * minor * minor / major)
    x_major = ax >= ay
    nx = np.where(x_major, big, small)
    ny = np.where(x_major, small, big)
    if np.ndim(nx) == 0:
        return float(1.0 / (nx * nx)), float(1.0 / (ny * ny))
    return 1.0 / (nx * nx), 1.0 / (ny * ny)


def ellipse_membership(e: HorizonEllipse, p, inflate: float = 0.0) -> float:
    """Quadratic form ``u^T diag(A, B) u`` of ``p`` in the ellipse frame; inside iff <= 1."""
    u = e.to_local(p)
    if e.t < DEGENERATE_T:
        if inflate > 0:
            return float(u @ u) / (inflate * inflate)
        return 0.0 if not np.any(u) else math.inf
    A, B = inflated_params(e.A, e.B, inflate)
    return float(A * u[0] * u[0] + B * u[1] * u[1])


def contact_points(t: float) -> np.ndarray:
    """The four points where the ellipse touches the corners of K(t); regimes 1-2 only."""
    if t <= 0 or t > T_STAR:
        raise DomainError(f"contact points are discrete only for 0 < t <= {T_STAR!r}")
    al = alpha(t)
    x = math.sqrt(t * t - al * al)
    return np.array([[x, al], [-x, al], [-x, -al], [x, -al]])


__all__ = [
    "HALF_PI",
    "T_STAR",
    "Pose",
    "HorizonEllipse",
    "min_ellipse_params",
    "ellipse_membership",
    "ellipse_area_first_quadrant",
    "contact_points",
    "inflated_params",
    "wrap_angle",
]
