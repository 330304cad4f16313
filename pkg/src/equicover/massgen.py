"""Seeded test masses."""

import math

import numpy as np
from scipy.spatial import ConvexHull

from .errors import PreconditionError
from .mass import Mass


def uniform_square() -> Mass:
    """Uniform mass on [-1, 1]^2."""
    return Mass.from_polygons([[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]])


def random_mass(seed: int, k: int = 5, points_per_part: int = 8) -> Mass:
    """k convex hulls of random points, each inside a random disk within the unit disk.

    Weights are uniform on [0.2, 1) and normalised to sum to 1.
    """
    if k < 1:
        raise PreconditionError("random_mass needs k >= 1")
    rng = np.random.default_rng(seed)
    polys = []
    for _ in range(k):
        r0 = math.sqrt(rng.uniform()) * 0.8
        a0 = rng.uniform(0.0, 2 * math.pi)
        center = np.array([r0 * math.cos(a0), r0 * math.sin(a0)])
        radius = rng.uniform(0.15, 0.5)
        rr = radius * np.sqrt(rng.uniform(size=points_per_part))
        aa = rng.uniform(0.0, 2 * math.pi, size=points_per_part)
        pts = center + np.stack([rr * np.cos(aa), rr * np.sin(aa)], axis=1)
        hull = ConvexHull(pts)
        # 2-d hulls list vertices counter-clockwise.
        polys.append(pts[hull.vertices])
    weights = rng.uniform(0.2, 1.0, size=k)
    return Mass.from_polygons(polys, weights)


def tight_mass(epsilon: float = 0.01) -> Mass:
    """Three small squares at the corners of a unit equilateral triangle, 1/3 each.

    Every point of the plane lies on a closed half-plane of measure at most
    1/3 + O(epsilon), so the centerpoint bound is essentially attained.
    """
    if not 0.0 < epsilon < 0.1:
        raise PreconditionError("tight_mass needs 0 < epsilon < 0.1")
    R = 1.0 / math.sqrt(3.0)
    polys = []
    for ang in (math.pi / 2, math.pi / 2 + 2 * math.pi / 3, math.pi / 2 + 4 * math.pi / 3):
        cx, cy = R * math.cos(ang), R * math.sin(ang)
        e = epsilon
        polys.append([(cx - e, cy - e), (cx + e, cy - e), (cx + e, cy + e), (cx - e, cy + e)])
    return Mass.from_polygons(polys, [1.0, 1.0, 1.0])


def generate(kind: str, seed: int = 0, epsilon: float = 0.01, k: int = 5) -> Mass:
    if kind == "square":
        return uniform_square()
    if kind == "random":
        return random_mass(seed, k)
    if kind == "tight":
        return tight_mass(epsilon)
    raise PreconditionError(f"unknown mass kind {kind!r}")
