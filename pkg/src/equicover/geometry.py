"""Planar primitives: points, rays, lines, half-planes and wedges.

Angles are radians. Ray and wedge angles are *winding* coordinates: they are
never reduced mod 2*pi, so a construction that turns one and a half times
keeps monotone angles. Membership tests reduce mod 2*pi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point2:
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    return Point2(x, y)


def direction(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def wrap_angle(angle):
    """Reduce to [0, 2*pi)."""
    return np.mod(angle, TWO_PI)


@dataclass(frozen=True)
class Ray:
    origin: Point2
    angle: float

    def point_at(self, r: float) -> Point2:
        return Point2(self.origin.x + r * math.cos(self.angle), self.origin.y + r * math.sin(self.angle))


@dataclass(frozen=True)
class Line:
    """An undirected line through ``point``; ``angle`` is kept in [0, pi)."""

    point: Point2
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))
        object.__setattr__(self, "angle", float(np.mod(self.angle, math.pi)))

    @property
    def normal(self) -> np.ndarray:
        """Unit normal pointing to the left of the direction ``angle``."""
        return np.array([-math.sin(self.angle), math.cos(self.angle)])

    @property
    def offset(self) -> float:
        """Signed offset c such that the line is {x : normal . x = c}."""
        return float(self.normal @ np.asarray(self.point))

    def signed_distance(self, pts) -> np.ndarray:
        """Positive on the left of the direction ``angle``."""
        pts = np.asarray(pts, dtype=float)
        return pts @ self.normal - self.offset

    def intersect(self, other: Line) -> Point2:
        d1, d2 = direction(self.angle), direction(other.angle)
        det = d1[0] * d2[1] - d1[1] * d2[0]
        if abs(det) < 1e-15:
            raise ValueError("parallel lines do not intersect")
        diff = np.asarray(other.point) - np.asarray(self.point)
        t = (diff[0] * d2[1] - diff[1] * d2[0]) / det
        return as_point(np.asarray(self.point) + t * d1)


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane on one side of ``boundary`` (relative to its direction angle)."""

    boundary: Line
    side: Side = Side.LEFT

    def complement(self) -> HalfPlane:
        return HalfPlane(self.boundary, Side.RIGHT if self.side is Side.LEFT else Side.LEFT)

    @property
    def start_angle(self) -> float:
        """Direction, seen from a boundary point, at which the half-plane begins counter-clockwise."""
        a = self.boundary.angle
        return a if self.side is Side.LEFT else a + math.pi

    def contains(self, pts) -> np.ndarray:
        d = self.boundary.signed_distance(pts)
        return d >= 0 if self.side is Side.LEFT else d <= 0


@dataclass(frozen=True)
class Wedge:
    """Region swept counter-clockwise from direction ``start`` through ``sweep`` radians around ``apex``."""

    apex: Point2
    start: float
    sweep: float

    def __post_init__(self):
        object.__setattr__(self, "apex", as_point(self.apex))
        if not (math.isfinite(self.start) and math.isfinite(self.sweep)):
            raise ValueError("wedge angles must be finite")
        if not (0.0 < self.sweep <= TWO_PI + 1e-12):
            raise ValueError(f"wedge sweep must lie in (0, 2*pi], got {self.sweep}")

    @property
    def end(self) -> float:
        return self.start + self.sweep

    @property
    def is_convex(self) -> bool:
        # A full turn is the whole plane.
        return self.sweep <= math.pi + 1e-9 or self.sweep >= TWO_PI

    def contains(self, pts) -> np.ndarray:
        """Closed membership; the apex itself belongs to every wedge."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rel = pts - np.asarray(self.apex)
        if self.sweep >= TWO_PI:
            return np.ones(len(pts), dtype=bool)
        phi = np.arctan2(rel[:, 1], rel[:, 0])
        offset = wrap_angle(phi - self.start)
        at_apex = (rel[:, 0] == 0) & (rel[:, 1] == 0)
        return (offset <= self.sweep) | at_apex

    def boundary_distance(self, pts) -> np.ndarray:
        """Distance from each point to the nearer of the two bounding rays."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.full(len(pts), np.inf)
        for ang in (self.start, self.end):
            out = np.minimum(out, ray_distance(pts, self.apex, ang))
        return out


def ray_distance(pts, origin, angle) -> np.ndarray:
    rel = np.atleast_2d(np.asarray(pts, dtype=float)) - np.asarray(origin)
    u = direction(angle)
    along = rel @ u
    perp = np.abs(rel[:, 0] * u[1] - rel[:, 1] * u[0])
    return np.where(along >= 0, perp, np.hypot(rel[:, 0], rel[:, 1]))


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counter-clockwise order."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def clip_halfplane(vertices, normal, offset) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to {x : normal . x >= offset}."""
    v = np.asarray(vertices, dtype=float)
    if len(v) == 0:
        return v.reshape(0, 2)
    d = v @ np.asarray(normal, dtype=float) - offset
    out = []
    n = len(v)
    for i in range(n):
        j = (i + 1) % n
        di, dj = d[i], d[j]
        if di >= 0:
            out.append(v[i])
        if (di >= 0) != (dj >= 0):
            t = di / (di - dj)
            out.append(v[i] + t * (v[j] - v[i]))
    return np.array(out).reshape(-1, 2)


def is_convex_ccw(vertices, eps: float = 1e-12) -> bool:
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return False
    e = np.roll(v, -1, axis=0) - v
    f = np.roll(e, -1, axis=0)
    cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
    scale = max(1.0, float(np.abs(v).max())) ** 2
    if np.any(cross < -eps * scale):
        return False
    # Reject polygons that wind more than once.
    ang = np.arctan2(e[:, 1], e[:, 0])
    turn = np.mod(np.diff(np.append(ang, ang[0])), TWO_PI)
    turn = np.where(turn > math.pi, turn - TWO_PI, turn)
    return polygon_area(v) > 0 and abs(turn.sum() - TWO_PI) < 1e-6
