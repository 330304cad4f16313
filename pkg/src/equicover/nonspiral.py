"""A non-spiral (8, 3)-equicovering built from two winding families.

A halving line l_H and two crossing lines l_L, l_R give two centers on l_H.
Around each center, twelve wedges of measure 1/8 wind one and a half turns;
grouped in four disjoint blocks of three they cover one side of l_H twice and
the other once. The two families together cover every point three times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SolverError, VerificationError
from .geometry import Line, Point2, Wedge, direction
from .mass import AngularProfile, Mass
from .partitions import cross_quantile_line, halving_line
from .verify import VerifyReport, verify_general

CENTER_TOL = 1e-9
RETRY_SHIFT = 1e-3
# Base wedges per region, in winding order from the start ray: the quadrant
# pattern repeated for one and a half turns.
BLOCK_COUNTS = (3, 1, 2, 2, 3, 1)


@dataclass(frozen=True)
class Family:
    """Four 3-wedges around one center and the twelve base rays they come from."""

    name: str
    center: Point2
    cross: Line
    rays: tuple[float, ...]
    pieces: tuple[Wedge, ...]


@dataclass(frozen=True)
class GeneralCover:
    pieces: tuple[Wedge, ...]
    target_multiplicity: int
    target_measure: Fraction
    hline: Line | None = None
    hline_angle: float = 0.0
    families: tuple[Family, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if len(self.pieces) * self.target_measure != self.target_multiplicity:
            raise ValueError("piece count times target measure must equal the multiplicity")

    @property
    def centers(self) -> tuple[Point2, ...]:
        return tuple(f.center for f in self.families)

    def family(self, name: str) -> Family:
        for f in self.families:
            if f.name == name:
                return f
        raise KeyError(name)

    def upper_side(self, pts) -> np.ndarray:
        """Signed distance to l_H, positive on the left of the direction ``hline_angle``."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = direction(self.hline_angle + 0.5 * math.pi)
        return (pts - np.asarray(self.hline.point)) @ n


def _winding_family(mass: Mass, name: str, center: Point2, cross: Line, start: float, delta: float) -> Family:
    """Twelve 1/8 wedges from ``start`` over 1.5 turns, anchored on both lines.

    ``delta`` in (0, pi) is the angle from the start ray to the next ray of the
    crossing line, so anchors alternate start + k*pi and start + delta + k*pi.
    """
    prof = AngularProfile(mass, np.asarray(center))
    anchors = []
    for k in range(3):
        anchors += [start + k * math.pi, start + delta + k * math.pi]
    anchors.append(start + 3 * math.pi)
    rays = []
    for j, n in enumerate(BLOCK_COUNTS):
        a, b = anchors[j], anchors[j + 1]
        rays.append(a)
        if n > 1:
            region = float(prof.measure(a, b - a))
            inner = prof.quantile(np.full(n - 1, a), region * np.arange(1, n) / n)
            rays.extend(float(min(x, b)) for x in inner)
    rays.append(anchors[-1])
    pieces = tuple(Wedge(center, rays[3 * i], rays[3 * i + 3] - rays[3 * i]) for i in range(4))
    return Family(name, center, cross, tuple(rays), pieces)


def _build(mass: Mass, h: float) -> GeneralCover:
    hline = halving_line(mass, h)
    left = cross_quantile_line(mass, hline, 5 / 8, 3 / 8, h_angle=h)
    right = cross_quantile_line(mass, hline, 3 / 8, 2 / 8, h_angle=h)
    o_left, o_right = hline.intersect(left), hline.intersect(right)
    gap = float((np.asarray(o_right) - np.asarray(o_left)) @ direction(h))
    if abs(gap) <= CENTER_TOL:
        raise SolverError("degenerate: centers coincide", residual=abs(gap), diagnostics={"hline_angle": h})
    if gap < 0:
        raise SolverError(
            "left center does not precede the right center along the halving line",
            residual=-gap,
            diagnostics={"hline_angle": h, "O_L": o_left, "O_R": o_right},
        )
    # Crossing directions are stored mod pi; pick the one pointing upwards.
    delta_l = float(np.mod(left.angle - h, math.pi))
    delta_r = float(np.mod(right.angle - h, math.pi))
    fam_l = _winding_family(mass, "L", o_left, left, h, delta_l)
    fam_r = _winding_family(mass, "R", o_right, right, h + math.pi, delta_r)
    return GeneralCover(fam_l.pieces + fam_r.pieces, 3, Fraction(3, 8), hline, h, (fam_l, fam_r))


def construct_83(
    mass: Mass, hline_angle: float = 0.0, tol: float = 1e-8, n_samples: int = 10_000, seed: int = 0
) -> GeneralCover:
    """Non-spiral (8, 3)-equicovering with two apexes on the halving line of direction ``hline_angle``.

    If the two centers coincide the direction is nudged once and the
    construction retried. The result is verified before it is returned.
    """
    try:
        cover = _build(mass, hline_angle)
    except SolverError as exc:
        if not str(exc).startswith("degenerate"):
            raise
        cover = _build(mass, hline_angle + RETRY_SHIFT)
    report = verify_83(mass, cover, tol, n_samples, seed)
    if not report.ok:
        raise VerificationError("(8,3) cover failed verification", report)
    return cover


def verify_83(mass: Mass, cover: GeneralCover, tol: float = 1e-8, n_samples: int = 10_000, seed: int = 0) -> VerifyReport:
    """verify_general plus the ordering of the two centers along l_H."""
    report = verify_general(mass, cover, tol, n_samples, seed)
    if len(cover.families) == 2:
        o_l, o_r = cover.centers
        gap = float((np.asarray(o_r) - np.asarray(o_l)) @ direction(cover.hline_angle))
        if gap <= CENTER_TOL:
            report.failures.append({"kind": "centers", "gap": gap})
    return report
