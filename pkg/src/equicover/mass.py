"""Masses as finite sums of uniform-density convex polygons.

Wedge measures use a closed form rather than clipping. For a polygon P and a
cone C with apex O, the boundary of P n C consists of pieces of the polygon
boundary plus pieces of the two cone rays, and the rays contribute nothing to
the area integral 1/2 * (x - O) x dx. What remains is a sum over polygon edges
of signed triangle areas between the apex and the part of the edge whose
direction lies inside the cone. For an edge on a line at distance d from the
apex whose foot of perpendicular has direction w, the triangle swept between
directions s < t has area d**2 / 2 * (tan(t - w) - tan(s - w)). This works for
any sweep up to a full turn and vectorises over many apexes at once.

Half-plane measures use plain Sutherland-Hodgman clipping, which keeps an
independent route for cross-checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InvalidMassError, QuantileUnreachable
from .geometry import TWO_PI, HalfPlane, Point2, Side, Wedge, as_point, clip_halfplane, is_convex_ccw, polygon_area

WEIGHT_TOL = 1e-12
ANGLE_TOL = 1e-12
ROUNDING_SLACK = 1e-12


@dataclass(frozen=True)
class WeightedPolygon:
    vertices: tuple[Point2, ...]
    weight: float

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "weight", float(self.weight))
        if len(verts) < 3:
            raise InvalidMassError("polygon needs at least 3 vertices")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise InvalidMassError(f"polygon weight must be positive, got {self.weight}")
        if polygon_area(verts) <= 0:
            raise InvalidMassError("polygon must be counter-clockwise with positive area")
        if not is_convex_ccw(verts):
            raise InvalidMassError("polygon must be convex")

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @cached_property
    def area(self) -> float:
        return polygon_area(self.array)

    @property
    def density(self) -> float:
        return self.weight / self.area


@dataclass(frozen=True)
class Mass:
    parts: tuple[WeightedPolygon, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise InvalidMassError("mass needs at least one polygon")
        total = math.fsum(p.weight for p in parts)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidMassError(f"weights must sum to 1, got {total!r}")

    @classmethod
    def from_polygons(cls, polygons, weights=None) -> Mass:
        """Build a mass, normalising ``weights`` (default: proportional to area)."""
        polys = [np.asarray(p, dtype=float) for p in polygons]
        if weights is None:
            weights = [polygon_area(p) for p in polys]
        weights = np.asarray(weights, dtype=float)
        weights = weights / math.fsum(weights)
        parts = [WeightedPolygon(tuple(map(tuple, p)), w) for p, w in zip(polys, weights)]
        # Renormalise once more so the fsum check is exact to rounding.
        drift = 1.0 - math.fsum(p.weight for p in parts)
        if drift:
            last = parts[-1]
            parts[-1] = WeightedPolygon(last.vertices, last.weight + drift)
        return cls(tuple(parts))

    @cached_property
    def _edges(self):
        a, b, rho = [], [], []
        for part in self.parts:
            v = part.array
            a.append(v)
            b.append(np.roll(v, -1, axis=0))
            rho.append(np.full(len(v), part.density))
        return np.concatenate(a), np.concatenate(b), np.concatenate(rho)

    @cached_property
    def vertices(self) -> np.ndarray:
        return np.concatenate([p.array for p in self.parts])

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    @property
    def scale(self) -> float:
        x0, y0, x1, y1 = self.bounds
        return max(x1 - x0, y1 - y0, 1e-300)

    def transformed(self, rotation: float = 0.0, translation=(0.0, 0.0)) -> Mass:
        """Image of the mass under a rotation about the origin followed by a translation."""
        c, s = math.cos(rotation), math.sin(rotation)
        rot = np.array([[c, -s], [s, c]])
        t = np.asarray(translation, dtype=float)
        return Mass(tuple(WeightedPolygon(tuple(map(tuple, p.array @ rot.T + t)), p.weight) for p in self.parts))

    def to_dict(self) -> dict:
        return {"parts": [{"vertices": [list(v) for v in p.vertices], "weight": p.weight} for p in self.parts]}

    @classmethod
    def from_dict(cls, data: dict) -> Mass:
        try:
            raw = data["parts"]
            parts = tuple(WeightedPolygon(tuple(tuple(v) for v in p["vertices"]), p["weight"]) for p in raw)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidMassError):
                raise
            raise InvalidMassError(f"malformed mass document: {exc}") from exc
        return cls(parts)


def load_mass(path) -> Mass:
    return Mass.from_dict(json.loads(Path(path).read_text()))


def save_mass(mass: Mass, path) -> None:
    Path(path).write_text(json.dumps(mass.to_dict(), indent=2) + "\n")


class AngularProfile:
    """Angular measure distribution of a mass seen from one or many apexes.

    ``apex`` is a single point or an (N, 2) array. Query arrays broadcast
    against a leading apex axis: for N apexes, pass shape (N,) or (N, K).
    """

    def __init__(self, mass: Mass, apex):
        apex = np.asarray(apex, dtype=float)
        self.single = apex.ndim == 1
        P = apex.reshape(-1, 2)
        A, B, rho = mass._edges
        a = A[None, :, :] - P[:, None, :]
        b = B[None, :, :] - P[:, None, :]
        cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
        dot = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
        phi = np.arctan2(a[..., 1], a[..., 0])
        delta = np.arctan2(cross, dot)
        e = B - A
        e = e / np.hypot(e[:, 0], e[:, 1])[:, None]
        along = a[..., 0] * e[None, :, 0] + a[..., 1] * e[None, :, 1]
        foot = a - along[..., None] * e[None, :, :]
        dist2 = foot[..., 0] ** 2 + foot[..., 1] ** 2
        tiny = (1e-14 * mass.scale) ** 2
        self.valid = (dist2 > tiny) & (delta != 0)
        self.omega = np.where(self.valid, np.arctan2(foot[..., 1], foot[..., 0]), 0.0)
        self.coef = np.where(self.valid, 0.5 * dist2 * np.sign(delta) * rho[None, :], 0.0)
        self.lo = np.where(self.valid, phi + np.minimum(delta, 0.0), 0.0)
        self.hi = np.where(self.valid, phi + np.maximum(delta, 0.0), 0.0)
        self.n_apex = len(P)

    def _flatten(self, *arrays):
        """Broadcast query arrays against the apex axis; return apex row per query plus flat arrays."""
        arrays = [np.asarray(x, dtype=float) for x in arrays]
        if self.single:
            arrays = [x[None, ...] for x in arrays]
        else:
            arrays = [np.broadcast_to(x, (self.n_apex,)) if x.ndim == 0 else x for x in arrays]
        arrays = np.broadcast_arrays(*arrays)
        shape = arrays[0].shape
        rows = np.broadcast_to(np.arange(shape[0]).reshape((-1,) + (1,) * (len(shape) - 1)), shape).ravel()
        return rows, [x.ravel() for x in arrays], shape

    def _unflatten(self, values, shape):
        values = values.reshape(shape)
        return values[0] if self.single else values

    def _cone(self, rows, start, sweep):
        alpha = np.mod(start, TWO_PI)[:, None]
        beta = alpha + np.clip(sweep, 0.0, TWO_PI)[:, None]
        lo, hi, om = self.lo[rows], self.hi[rows], self.omega[rows]
        total = np.zeros(lo.shape)
        with np.errstate(invalid="ignore", over="ignore"):
            for k in range(3):
                shift = TWO_PI * k
                L = np.maximum(lo + shift, alpha)
                H = np.minimum(hi + shift, beta)
                total += np.where(H > L, np.tan(H - om) - np.tan(L - om), 0.0)
        res = np.einsum("qe,qe->q", np.where(self.valid[rows], total, 0.0), self.coef[rows])
        return np.where(sweep >= TWO_PI, 1.0, np.clip(res, 0.0, 1.0))

    def _density(self, rows, theta):
        x = np.mod(theta, TWO_PI)[:, None]
        lo, hi = self.lo[rows], self.hi[rows]
        inside = ((x >= lo) & (x <= hi)) | ((x >= lo + TWO_PI) & (x <= hi + TWO_PI))
        inside &= self.valid[rows]
        with np.errstate(invalid="ignore", over="ignore"):
            sec2 = 1.0 + np.tan(x - self.omega[rows]) ** 2
        return np.maximum(np.einsum("qe,qe->q", np.where(inside, sec2, 0.0), self.coef[rows]), 0.0)

    def gap_end(self, theta, eps: float = 1e-10):
        """End of the zero-density run of directions starting at ``theta``.

        Returns ``theta`` itself when the mass is visible just past it.
        """
        rows, (theta,), shape = self._flatten(theta)
        x = np.mod(theta, TWO_PI)[:, None]
        lo, hi, valid = self.lo[rows], self.hi[rows], self.valid[rows]
        covered = ((lo <= x + eps) & (hi > x + eps)) | ((lo + TWO_PI <= x + eps) & (hi + TWO_PI > x + eps))
        covered = (covered & valid).any(axis=1)
        ahead = np.where(valid, np.mod(lo - x, TWO_PI), np.inf).min(axis=1)
        out = np.where(covered, theta, theta + np.where(np.isfinite(ahead), ahead, TWO_PI))
        return self._unflatten(out, shape)

    def measure(self, start, sweep):
        """Measure of the cone [start, start + sweep]; sweep in [0, 2*pi]."""
        rows, (start, sweep), shape = self._flatten(start, sweep)
        return self._unflatten(self._cone(rows, start, sweep), shape)

    def density(self, theta):
        """Derivative of the cone measure with respect to its end angle."""
        rows, (theta,), shape = self._flatten(theta)
        return self._unflatten(self._density(rows, theta), shape)

    def quantile(self, theta0, t, tol: float = ANGLE_TOL):
        """Smallest winding angle theta >= theta0 whose cone [theta0, theta] has measure t.

        Safeguarded Newton on the cone measure: iterates stay inside a bracket
        [lo, hi] with measure(lo) < t <= measure(hi), falling back to bisection
        where the density vanishes. A root is accepted early only where the
        density is positive, which is what makes it the smallest one. Where the
        density vanishes, measures within ROUNDING_SLACK of ``t`` count as
        reaching it.
        """
        rows, (theta0, t), shape = self._flatten(theta0, t)
        if np.any(t > 1.0 + 1e-12):
            raise QuantileUnreachable(f"quantile unreachable: requested measure {float(t.max())} exceeds 1")
        out = theta0 + TWO_PI
        out[t <= 0] = theta0[t <= 0]
        act = np.nonzero(t > 0)[0]
        lo = theta0[act].copy()
        hi = lo + TWO_PI
        x = theta0[act] + TWO_PI * np.minimum(t[act], 1.0)
        for _ in range(200):
            if not len(act):
                break
            r, th0, tt = rows[act], theta0[act], t[act]
            f = self._cone(r, th0, x - th0) - tt
            d = self._density(r, x)
            # On a plateau the target is only reached up to rounding; do not jump the gap for that.
            reached = (f >= 0) | ((f >= -ROUNDING_SLACK) & (d == 0))
            hi = np.where(reached, x, hi)
            lo = np.where(reached, lo, x)
            step = np.divide(f, d, out=np.full_like(f, np.inf), where=d > 0)
            converged = (d > 0) & ((np.abs(f) <= 1e-15) | (np.abs(step) <= tol))
            narrow = hi - lo <= tol
            out[act[converged]] = np.minimum(x - step, hi)[converged]
            out[act[narrow & ~converged]] = hi[narrow & ~converged]
            keep = ~(converged | narrow)
            cand = x - step
            ok = np.isfinite(cand) & (cand > lo) & (cand < hi)
            x = np.where(ok, cand, 0.5 * (lo + hi))
            act, lo, hi, x = act[keep], lo[keep], hi[keep], x[keep]
        return self._unflatten(out, shape)


def measure_halfplane(mass: Mass, h: HalfPlane) -> float:
    normal = h.boundary.normal
    offset = h.boundary.offset
    if h.side is Side.RIGHT:
        normal, offset = -normal, -offset
    total = 0.0
    for part in mass.parts:
        clipped = clip_halfplane(part.array, normal, offset)
        if len(clipped) >= 3:
            total += part.weight * max(polygon_area(clipped), 0.0) / part.area
    return min(max(total, 0.0), 1.0)


def measure_wedge(mass: Mass, w: Wedge) -> float:
    if w.sweep >= TWO_PI:
        return 1.0
    return float(AngularProfile(mass, np.asarray(w.apex)).measure(w.start, w.sweep))


def ray_at_measure(mass: Mass, apex, theta0: float, t: float, tol: float = ANGLE_TOL) -> float:
    """Winding angle of the ray from ``apex`` that cuts off measure ``t`` counter-clockwise from ``theta0``.

    Zero-density gaps make the answer non-unique; the smallest angle is returned.
    """
    if not t <= 1.0 + 1e-12:
        raise QuantileUnreachable(f"quantile unreachable: requested measure {t} exceeds 1")
    if t <= 0:
        return float(theta0)
    return float(AngularProfile(mass, np.asarray(apex, dtype=float)).quantile(theta0, t, tol))


def halfplane_measures(mass: Mass, normals, offsets) -> np.ndarray:
    """Vectorised measures of {x : n . x >= c} for rows n of ``normals`` and entries c of ``offsets``."""
    normals = np.asarray(normals, dtype=float).reshape(-1, 2)
    offsets = np.asarray(offsets, dtype=float).reshape(-1)
    apex = normals * offsets[:, None]
    start = np.arctan2(normals[:, 1], normals[:, 0]) - 0.5 * math.pi
    prof = AngularProfile(mass, apex)
    return prof.measure(start, np.full_like(start, math.pi))
