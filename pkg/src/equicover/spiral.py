"""Convex (q, p)-spiral equicoverings.

A q-fan around one apex has consecutive wedges of measure 1/q; its p-wedges
(p consecutive base wedges each) cover almost every point exactly p times.
The constructions here choose the apex and rays so that every p-wedge is
convex, following the regime of p/q.
"""

from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PreconditionError, SolverError, VerificationError
from .geometry import TWO_PI, Point2, Wedge, as_point
from .mass import AngularProfile, Mass
from .partitions import (
    DEFAULT_M,
    SixPartition,
    _depth_region,
    buck_buck,
    centerpoint,
    deepest_point,
    halving_line,
)
from .verify import SWEEP_SLACK, VerifyReport, verify_spiral

log = logging.getLogger(__name__)


class Regime(enum.Enum):
    INFEASIBLE_ALL_MASSES = "InfeasibleAllMasses"
    EXISTS_BAD_MASS = "ExistsBadMass"
    OPEN_EVEN_CASE = "OpenEvenCase"
    GUARANTEED_3P_MINUS_3 = "Guaranteed3pMinus3"
    GUARANTEED_3P_MINUS_2 = "Guaranteed3pMinus2"
    GUARANTEED_3P_MINUS_1 = "Guaranteed3pMinus1"
    GUARANTEED_CENTERPOINT = "GuaranteedCenterpoint"
    TRIVIAL_HALVING = "TrivialHalving"

    @property
    def guaranteed(self) -> bool:
        return self.value.startswith("Guaranteed") or self is Regime.TRIVIAL_HALVING


@dataclass(frozen=True)
class CoverParams:
    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, (int, np.integer)) and isinstance(self.q, (int, np.integer))):
            raise PreconditionError("p and q must be integers")
        if not 0 < self.p < self.q:
            raise PreconditionError(f"need 0 < p < q, got p={self.p}, q={self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise PreconditionError(f"p/q = {self.p}/{self.q} is not reduced")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.p, self.q)


def classify_regime(p: int, q: int) -> Regime:
    CoverParams(p, q)
    if q < 2 * p:
        return Regime.INFEASIBLE_ALL_MASSES
    if q < 3 * p - 3:
        return Regime.EXISTS_BAD_MASS
    if q == 3 * p - 3:
        return Regime.GUARANTEED_3P_MINUS_3 if p % 2 else Regime.OPEN_EVEN_CASE
    if q == 3 * p - 2 and p >= 2:
        return Regime.GUARANTEED_3P_MINUS_2
    if q == 3 * p - 1 and p >= 2:
        return Regime.GUARANTEED_3P_MINUS_1
    if (p, q) == (1, 2):
        return Regime.TRIVIAL_HALVING
    return Regime.GUARANTEED_CENTERPOINT


@dataclass(frozen=True)
class FanConstruction:
    """Apex plus strictly increasing winding ray angles; the fan closes at ray_angles[0] + 2*pi."""

    apex: Point2
    ray_angles: tuple[float, ...]
    unit: float

    @property
    def k(self) -> int:
        return len(self.ray_angles)

    def ray(self, i: int) -> float:
        """Winding angle of ray i (0-based), extended periodically by 2*pi."""
        turns, j = divmod(i, self.k)
        return self.ray_angles[j] + TWO_PI * turns

    def base_wedges(self) -> list[Wedge]:
        return [Wedge(self.apex, self.ray(i), self.ray(i + 1) - self.ray(i)) for i in range(self.k)]


class Orbit(enum.Enum):
    SINGLE = "Single"
    ODD = "OrbitOdd"
    EVEN = "OrbitEven"


@dataclass(frozen=True)
class SpiralCover:
    params: CoverParams
    apex: Point2
    pieces: tuple[Wedge, ...]
    orbit_tag: Orbit = Orbit.SINGLE
    fan: FanConstruction | None = None
    six: SixPartition | None = None

    @property
    def rays(self) -> tuple[float, ...]:
        return tuple(w.start for w in self.pieces)


def basic_construction(mass: Mass, apex, theta0: float, k: int) -> FanConstruction:
    """k rays from ``apex`` starting at ``theta0`` with consecutive wedges of measure 1/k.

    Ray j is the smallest angle cutting off j/k counter-clockwise from theta0,
    which is what chaining one-step quantiles produces.
    """
    if k < 2:
        raise PreconditionError("basic construction needs k >= 2")
    apex = as_point(apex)
    prof = AngularProfile(mass, np.asarray(apex))
    targets = np.arange(1, k) / k
    rays = prof.quantile(np.full(k - 1, float(theta0)), targets)
    return FanConstruction(apex, (float(theta0),) + tuple(float(r) for r in rays), 1.0 / k)


def anchored_fan(mass: Mass, apex, anchors, counts) -> FanConstruction:
    """Subdivide each region between consecutive anchor rays into ``counts[j]`` wedges of equal measure.

    ``anchors`` are increasing winding angles spanning one full turn; the last
    region closes at anchors[0] + 2*pi. Every anchor is itself a fan ray.
    """
    apex = as_point(apex)
    prof = AngularProfile(mass, np.asarray(apex))
    ext = list(anchors) + [anchors[0] + TWO_PI]
    rays = []
    total = sum(counts)
    for j, n in enumerate(counts):
        a, b = ext[j], ext[j + 1]
        if n <= 0:
            continue
        rays.append(a)
        if n > 1:
            region = float(prof.measure(a, b - a))
            inner = prof.quantile(np.full(n - 1, a), region * np.arange(1, n) / n)
            rays.extend(float(min(x, b)) for x in inner)
    return FanConstruction(apex, tuple(rays), 1.0 / total)


def p_wedges(fan: FanConstruction, p: int, stride: int = 1, offset: int = 0) -> list[Wedge]:
    """The wedges from ray i to ray i + p, for i = offset, offset + stride, ..."""
    if not 1 <= p <= fan.k:
        raise PreconditionError(f"p must lie in [1, {fan.k}]")
    out = []
    for i in range(offset, fan.k, stride):
        sweep = TWO_PI if p == fan.k else fan.ray(i + p) - fan.ray(i)
        out.append(Wedge(fan.apex, fan.ray(i), sweep))
    return out


def _checked(mass, cover, tol) -> SpiralCover:
    report = verify_spiral(mass, cover, tol)
    if not report.ok:
        raise VerificationError(f"cover for p/q={cover.params.p}/{cover.params.q} failed verification", report)
    return cover


def construct_halving(mass: Mass, angle: float = 0.0, tol: float = 1e-8) -> SpiralCover:
    """The (2, 1) cover: the two closed sides of a halving line."""
    line = halving_line(mass, angle)
    apex = line.point
    fan = FanConstruction(apex, (float(angle), float(angle) + math.pi), 0.5)
    pieces = tuple(p_wedges(fan, 1))
    return _checked(mass, SpiralCover(CoverParams(1, 2), apex, pieces, Orbit.SINGLE, fan), tol)


def construct_centerpoint_spiral(
    mass: Mass, p: int, q: int, theta0: float = 0.0, M: int = DEFAULT_M, tol: float = 1e-8
) -> SpiralCover:
    """q >= 3p: basic construction around a centerpoint; every p-wedge then fits in a half-plane.

    If sampling slack makes the check fail, other initial rays, a finer
    direction grid and finally an approximate Tukey median are tried.
    """
    params = CoverParams(p, q)
    if q < 3 * p:
        raise PreconditionError("centerpoint construction needs q >= 3p")
    apex_sources = [lambda: centerpoint(mass, M), lambda: centerpoint(mass, 4 * M), lambda: deepest_point(mass, M)]
    initial = [theta0] + [theta0 + TWO_PI * j / 16 for j in range(1, 16)]
    last = None
    for source in apex_sources:
        apex = source()
        for th in initial:
            fan = basic_construction(mass, apex, th, q)
            cover = SpiralCover(params, apex, tuple(p_wedges(fan, p)), Orbit.SINGLE, fan)
            report = verify_spiral(mass, cover, tol)
            if report.ok:
                return cover
            last = report
    raise VerificationError("centerpoint spiral failed verification after retries", last)


def _doubled_targets(p: int, kind: str):
    if kind == "3p-1":
        r = p - 1
        den = 6 * r + 4
        return (r / den, (r + 1) / den, (r + 1) / den), [r, r + 1, r + 1, r, r + 1, r + 1]
    r = (p - 1) // 2
    den = 12 * r + 2
    return (2 * r / den, 2 * r / den, (2 * r + 1) / den), [2 * r, 2 * r, 2 * r + 1, 2 * r, 2 * r, 2 * r + 1]


def construct_3p_minus_3(mass: Mass, p: int, tol: float = 1e-8, lines_tol: float = 1e-10) -> SpiralCover:
    """q = 3p - 3 with p odd: three lines cutting six regions of 1/6, r base wedges in each."""
    if p % 2 == 0 or p < 3:
        raise PreconditionError("3p-3 construction needs odd p >= 3")
    q = 3 * p - 3
    params = CoverParams(p, q)
    r = (p - 1) // 2
    six = buck_buck(mass, 1 / 6, 1 / 6, 1 / 6, tol=lines_tol)
    fan = anchored_fan(mass, six.apex, six.rays, [r] * 6)
    cover = SpiralCover(params, six.apex, tuple(p_wedges(fan, p)), Orbit.SINGLE, fan, six)
    return _checked(mass, cover, tol)


def construct_3p_minus_1(
    mass: Mass, p: int, orbit: Orbit = Orbit.ODD, tol: float = 1e-8, lines_tol: float = 1e-10
) -> SpiralCover:
    """q = 3p - 1: a 2q-fan of half-size wedges anchored on three lines; one orbit of its 2p-wedges."""
    if p < 2:
        raise PreconditionError("3p-1 construction needs p >= 2")
    q = 3 * p - 1
    params = CoverParams(p, q)
    (a, b, c), counts = _doubled_targets(p, "3p-1")
    six = buck_buck(mass, a, b, c, tol=lines_tol)
    fan = anchored_fan(mass, six.apex, six.rays, counts)
    offset = 0 if orbit is Orbit.ODD else 1
    cover = SpiralCover(params, six.apex, tuple(p_wedges(fan, 2 * p, 2, offset)), orbit, fan, six)
    return _checked(mass, cover, tol)


def critical_wedges(fan: FanConstruction, p: int) -> tuple[Wedge, Wedge]:
    """W_{6r+1} and W_{12r+2} of the 3p-2 construction: the only 2p-wedges that may span four regions."""
    r = (p - 1) // 2
    all_w = p_wedges(fan, 2 * p)
    return all_w[6 * r], all_w[12 * r + 1]


def construct_3p_minus_2(mass: Mass, p: int, tol: float = 1e-8, lines_tol: float = 1e-10) -> SpiralCover:
    """q = 3p - 2 (p odd): like 3p-1, but the orbit is chosen by which critical wedge is convex."""
    if p % 2 == 0 or p < 3:
        raise PreconditionError("3p-2 construction needs odd p >= 3")
    q = 3 * p - 2
    params = CoverParams(p, q)
    (a, b, c), counts = _doubled_targets(p, "3p-2")
    six = buck_buck(mass, a, b, c, tol=lines_tol)
    fan = anchored_fan(mass, six.apex, six.rays, counts)
    w_odd, w_even = critical_wedges(fan, p)
    if w_odd.sweep <= math.pi + SWEEP_SLACK:
        orbit, offset = Orbit.ODD, 0
    elif w_even.sweep <= math.pi + SWEEP_SLACK:
        orbit, offset = Orbit.EVEN, 1
    else:
        raise SolverError(
            "both critical wedges exceed pi; the three-line partition is numerically off",
            residual=six.residual,
            diagnostics={"sweeps": (w_odd.sweep, w_even.sweep)},
        )
    cover = SpiralCover(params, six.apex, tuple(p_wedges(fan, 2 * p, 2, offset)), orbit, fan, six)
    return _checked(mass, cover, tol)


@dataclass
class SearchReport:
    cover: SpiralCover | None
    attempts: int
    min_worst_sweep: float
    best_apex: Point2 | None
    best_theta0: float
    worst_sweeps: np.ndarray = field(repr=False)
    apexes: list[Point2] = field(default_factory=list, repr=False)

    @property
    def all_attempts_nonconvex(self) -> bool:
        return bool(np.all(self.worst_sweeps > math.pi + SWEEP_SLACK))

    def to_dict(self) -> dict:
        return {
            "found": self.cover is not None,
            "attempts": self.attempts,
            "min_worst_sweep": self.min_worst_sweep,
            "best_apex": list(self.best_apex) if self.best_apex else None,
            "best_theta0": self.best_theta0,
            "all_attempts_nonconvex": self.all_attempts_nonconvex,
        }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("EQUICOVER_THREADS", "1")))
    except ValueError:
        return 1


def _apex_candidates(mass: Mass, n: int) -> list[Point2]:
    center = centerpoint(mass, 180)
    region = _depth_region(mass, 180, 1.0 / 3.0 - 1e-7)
    if len(region) >= 3:
        lo, hi = region.min(axis=0), region.max(axis=0)
    else:
        lo = hi = np.asarray(center)
    span = np.maximum(hi - lo, 0.05 * mass.scale)
    mid = 0.5 * (lo + hi)
    lo, hi = mid - 0.75 * span, mid + 0.75 * span
    g = max(2, math.ceil(math.sqrt(max(n - 1, 1))) + 1)
    xs, ys = np.linspace(lo[0], hi[0], g), np.linspace(lo[1], hi[1], g)
    grid = [(float(x), float(y)) for x in xs for y in ys]
    c = np.asarray(center)
    grid.sort(key=lambda pt: (round(math.hypot(pt[0] - c[0], pt[1] - c[1]), 12), pt))
    return [center] + [as_point(pt) for pt in grid[: max(n - 1, 0)]]


def heuristic_search(mass: Mass, p: int, q: int, budget=(50, 64), tol: float = 1e-8) -> SearchReport:
    """Basic constructions over a grid of apexes x initial rays; first verified cover wins.

    Apexes are taken around the sampled centerpoint region, ordered by
    distance from the centerpoint. Grid points are scanned in that order so
    the result does not depend on the thread count.
    """
    params = CoverParams(p, q)
    n_apex, n_angles = budget
    apexes = _apex_candidates(mass, n_apex)
    theta0 = TWO_PI * np.arange(n_angles) / n_angles
    targets = np.arange(1, q) / q

    def scan(apex):
        prof = AngularProfile(mass, np.asarray(apex))
        inner = prof.quantile(np.repeat(theta0[:, None], q - 1, axis=1), np.broadcast_to(targets, (n_angles, q - 1)))
        rays = np.concatenate([theta0[:, None], inner, theta0[:, None] + TWO_PI], axis=1)
        ext = np.concatenate([rays[:, :-1], rays[:, :-1] + TWO_PI], axis=1)
        sweeps = ext[:, p : p + q] - ext[:, :q]
        return sweeps.max(axis=1)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        worst = np.array(list(pool.map(scan, apexes)))

    for i, apex in enumerate(apexes):
        for j in np.nonzero(worst[i] <= math.pi + SWEEP_SLACK)[0]:
            fan = basic_construction(mass, apex, float(theta0[j]), q)
            cover = SpiralCover(params, apex, tuple(p_wedges(fan, p)), Orbit.SINGLE, fan)
            if verify_spiral(mass, cover, tol).ok:
                return SearchReport(cover, worst.size, float(worst.min()), apex, float(theta0[j]), worst, apexes)
    i, j = np.unravel_index(int(np.argmin(worst)), worst.shape)
    return SearchReport(None, worst.size, float(worst[i, j]), apexes[i], float(theta0[j]), worst, apexes)


class Status(enum.Enum):
    COVER = "cover"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass
class ConstructionResult:
    status: Status
    regime: Regime
    cover: SpiralCover | None = None
    reason: str = ""
    search: SearchReport | None = None
    report: VerifyReport | None = None


def construct(mass: Mass, p: int, q: int, budget=(50, 64), tol: float = 1e-8) -> ConstructionResult:
    """Dispatch on the regime of p/q and return a verified cover, an infeasibility reason, or a search report."""
    regime = classify_regime(p, q)
    if regime is Regime.INFEASIBLE_ALL_MASSES:
        reason = (
            f"q < 2p: two p-wedges W_1 and W_(p+1) would have combined measure 2p/q = {2 * p}/{q} > 1, "
            "so their angles sum to more than 2*pi and they cannot both be convex"
        )
        return ConstructionResult(Status.INFEASIBLE, regime, reason=reason)
    if regime in (Regime.EXISTS_BAD_MASS, Regime.OPEN_EVEN_CASE):
        search = heuristic_search(mass, p, q, budget, tol)
        if search.cover is not None:
            return ConstructionResult(
                Status.COVER, regime, search.cover, "found by heuristic search", search, verify_spiral(mass, search.cover, tol)
            )
        return ConstructionResult(Status.UNKNOWN, regime, reason="no convex spiral found within budget", search=search)
    if regime is Regime.TRIVIAL_HALVING:
        cover = construct_halving(mass, tol=tol)
    elif regime is Regime.GUARANTEED_CENTERPOINT:
        cover = construct_centerpoint_spiral(mass, p, q, tol=tol)
    elif regime is Regime.GUARANTEED_3P_MINUS_3:
        cover = construct_3p_minus_3(mass, p, tol=tol)
    elif regime is Regime.GUARANTEED_3P_MINUS_1:
        cover = construct_3p_minus_1(mass, p, tol=tol)
    else:
        cover = construct_3p_minus_2(mass, p, tol=tol)
    return ConstructionResult(Status.COVER, regime, cover, report=verify_spiral(mass, cover, tol))
