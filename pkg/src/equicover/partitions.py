"""Quantile lines, Tukey depth, centerpoints and three-line six-region partitions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull

from .errors import CenterpointError, PreconditionError, SolverError
from .geometry import TWO_PI, Line, Point2, as_point, clip_halfplane, direction
from .mass import ANGLE_TOL, AngularProfile, Mass, WeightedPolygon

log = logging.getLogger(__name__)

DEFAULT_M = 720
GRID_REFINE = 10


def _left_normals(angles) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    return np.stack([-np.sin(angles), np.cos(angles)], axis=-1)


def _chord_density(mass: Mass, normals, offsets) -> np.ndarray:
    """Mass per unit offset along each line n . x = c (weighted chord length)."""
    A, B, rho = mass._edges
    pa = normals @ A.T
    pb = normals @ B.T
    c = offsets[:, None]
    cross = (pa - c) * (pb - c) < 0
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = np.where(cross, (c - pa) / (pb - pa), 0.0)
    dirs = np.stack([normals[:, 1], -normals[:, 0]], axis=1)
    da = dirs @ A.T
    db = dirs @ B.T
    along = da + lam * (db - da)
    signed = np.where(cross, np.sign(pa - pb) * along, 0.0)
    return np.abs(signed @ rho if signed.ndim == 1 else (signed * rho[None, :]).sum(axis=1))


def left_offsets(mass: Mass, angles, t, tol: float = 1e-14) -> np.ndarray:
    """Offsets c with mu{x : n . x >= c} = t, n the left normal of each direction angle.

    Safeguarded Newton over the projection range of the support (the
    derivative is minus the weighted chord length), vectorised over angles.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), angles.shape)
    normals = _left_normals(angles)
    proj = mass.vertices @ normals.T
    lo = proj.min(axis=0)
    hi = proj.max(axis=0)
    x = hi - t * (hi - lo)
    eps = tol * mass.scale
    done = np.zeros(angles.shape, dtype=bool)
    out = 0.5 * (lo + hi)
    for _ in range(200):
        above = AngularProfile(mass, normals * x[:, None]).measure(angles, np.full_like(angles, math.pi))
        f = above - t
        d = _chord_density(mass, normals, x)
        lo = np.where(f >= 0, x, lo)
        hi = np.where(f < 0, x, hi)
        step = np.divide(f, d, out=np.full_like(f, np.inf), where=d > 0)
        converged = (d > 0) & ((np.abs(f) <= 1e-15) | (np.abs(step) <= eps))
        narrow = hi - lo <= eps
        newly = ~done & (converged | narrow)
        out = np.where(newly & converged, x + step, out)
        out = np.where(newly & ~converged, 0.5 * (lo + hi), out)
        done |= newly
        if done.all():
            break
        cand = x + step
        ok = np.isfinite(cand) & (cand > lo) & (cand < hi)
        x = np.where(ok, cand, 0.5 * (lo + hi))
    return out


def quantile_line(mass: Mass, angle: float, t: float) -> Line:
    """Line of direction ``angle`` whose left side has measure ``t``."""
    if not 0.0 < t < 1.0:
        raise PreconditionError(f"quantile level must lie in (0, 1), got {t}")
    c = float(left_offsets(mass, [angle], t)[0])
    n = _left_normals(angle)
    return Line(Point2(*(c * n)), angle)


def halving_line(mass: Mass, angle: float) -> Line:
    return quantile_line(mass, angle, 0.5)


@dataclass(frozen=True)
class DepthReport:
    point: Point2
    min_halfplane_measure: float
    num_directions: int
    worst_direction: float = float("nan")


def depth(mass: Mass, point, M: int = 360) -> DepthReport:
    """Minimum measure over M closed half-planes whose boundary passes through ``point``.

    An upper estimate of the Tukey depth that converges as M grows.
    """
    if M < 8:
        raise PreconditionError("depth needs M >= 8 directions")
    point = as_point(point)
    phis = TWO_PI * np.arange(M) / M
    vals = AngularProfile(mass, np.asarray(point)).measure(phis, np.full(M, math.pi))
    k = int(np.argmin(vals))
    return DepthReport(point, float(min(vals[k], 0.5)), M, float(phis[k]))


def _depth_region(mass: Mass, M: int, level: float) -> np.ndarray:
    """Polygon of points x with x . u_k <= s_k for every sampled direction, mu{x . u_k >= s_k} = level."""
    phis = TWO_PI * np.arange(M) / M
    # u_k is the left normal of direction phi_k - pi/2.
    s = left_offsets(mass, phis - 0.5 * math.pi, level)
    u = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    x0, y0, x1, y1 = mass.bounds
    pad = mass.scale
    poly = np.array([[x0 - pad, y0 - pad], [x1 + pad, y0 - pad], [x1 + pad, y1 + pad], [x0 - pad, y1 + pad]])
    for uk, sk in zip(u, s):
        poly = clip_halfplane(poly, -uk, -sk)
        if len(poly) < 3:
            return poly
    return poly


def _centroid(poly: np.ndarray) -> Point2:
    """Area centroid; vertex mean for degenerate polygons.

    The vertex mean is biased by the duplicate vertices clipping leaves behind
    when a cut passes through an existing corner.
    """
    if len(poly) >= 3:
        x, y = poly[:, 0], poly[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        area = 0.5 * cr.sum()
        if area > 1e-300:
            return as_point((float(((x + xn) * cr).sum() / (6 * area)), float(((y + yn) * cr).sum() / (6 * area))))
    return as_point(poly.mean(axis=0))


def centerpoint(mass: Mass, M: int = DEFAULT_M, level: float = 1.0 / 3.0) -> Point2:
    """Centroid of the intersection of the sampled 2/3-quantile half-planes.

    ``level`` is the depth being targeted; 1/3 gives the classical centerpoint.
    """
    if M < 8:
        raise PreconditionError("centerpoint needs M >= 8 directions")
    for slack in (0.0, 1e-9, 1e-7):
        poly = _depth_region(mass, M, level - slack)
        if len(poly):
            return _centroid(poly)
        log.debug("empty depth region at level %.12g, loosening", level - slack)
    raise CenterpointError(
        f"centerpoint region empty at M={M}; increase M",
        diagnostics={"M": M, "level": level},
    )


def deepest_point(mass: Mass, M: int = DEFAULT_M, iters: int = 30) -> Point2:
    """Approximate Tukey median: centroid of the deepest nonempty sampled depth region."""
    lo, hi = 1.0 / 3.0 - 1e-7, 0.5
    best = None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        poly = _depth_region(mass, M, mid)
        if len(poly) >= 3:
            lo, best = mid, poly
        else:
            hi = mid
    if best is None:
        return centerpoint(mass, M)
    return _centroid(best)


@dataclass(frozen=True)
class SixPartition:
    """Three concurrent lines through ``apex``; ray j separates regions j-1 and j."""

    apex: Point2
    rays: tuple[float, ...]
    targets: tuple[float, float, float]
    region_measures: tuple[float, ...]

    @property
    def residual(self) -> float:
        a, b, c = self.targets
        want = (a, b, c, a, b, c)
        return max(abs(m - w) for m, w in zip(self.region_measures, want))

    def region(self, j: int) -> tuple[float, float]:
        """(start, sweep) of region R_j, 1-based, in winding coordinates."""
        rays = list(self.rays) + [self.rays[0] + TWO_PI]
        return rays[j - 1], rays[j] - rays[j - 1]


def _place_in_gap(prof, m, limit, opposite, target, tol):
    """Move quantile rays that sit at the start of an empty angular gap.

    Any direction in the gap cuts the same measure on its own side, so the
    ray is slid inside the gap (never past ``limit``) towards the position
    where the opposite ray, starting from ``opposite``, also cuts ``target``.
    """
    end = np.minimum(prof.gap_end(m), limit)
    rows = np.nonzero(end > m)[0]
    if not len(rows):
        return m
    m = m.copy()
    want = prof.quantile(opposite, np.full_like(m, target), tol) - math.pi
    m[rows] = np.clip(want[rows], m[rows], end[rows])
    return m


def _three_line_eval(mass, theta, s, a, b, c0=None, tol=ANGLE_TOL):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if c0 is None:
        c0 = left_offsets(mass, theta, 0.5)
    n = _left_normals(theta)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    apex = c0[:, None] * n + s[:, None] * u
    prof = AngularProfile(mass, apex)
    th = np.repeat(theta[:, None], 2, axis=1)
    targets = np.broadcast_to(np.array([a, a + b]), th.shape)
    m = prof.quantile(th, targets, tol)
    m2 = _place_in_gap(prof, m[:, 0], theta + math.pi, theta + math.pi, a, tol)
    m3 = _place_in_gap(prof, np.maximum(m[:, 1], m2), theta + math.pi, m2 + math.pi, b, tol)
    r1 = prof.measure(theta + math.pi, m2 - theta) - a
    r2 = prof.measure(m2 + math.pi, m3 - m2) - b
    return apex, m2, m3, r1, r2


def _sign_change(v0, v1):
    return (np.sign(v0) != np.sign(v1)) | (v0 == 0)


def _six_from(mass, theta, s, a, b, c, ray_mass=None):
    """Partition at (theta, s); rays are placed using ``ray_mass``, regions measured with ``mass``."""
    apex, m2, m3, _, _ = _three_line_eval(mass if ray_mass is None else ray_mass, theta, s, a, b, tol=1e-13)
    theta = float(np.atleast_1d(theta)[0])
    rays = (theta, float(m2[0]), float(m3[0]), theta + math.pi, float(m2[0]) + math.pi, float(m3[0]) + math.pi)
    prof = AngularProfile(mass, apex[0])
    ext = list(rays) + [theta + TWO_PI]
    sweeps = np.diff(ext)
    meas = tuple(float(prof.measure(ext[j], sweeps[j])) if sweeps[j] > 0 else 0.0 for j in range(6))
    return SixPartition(as_point(apex[0]), rays, (a, b, c), meas)


def hull_blend(mass: Mass, lam: float) -> Mass:
    """(1 - lam) * mass + lam * uniform mass on the convex hull of its support."""
    pts = mass.vertices
    hull = ConvexHull(pts)
    parts = [WeightedPolygon(p.vertices, p.weight * (1.0 - lam)) for p in mass.parts]
    rest = 1.0 - math.fsum(p.weight for p in parts)
    parts.append(WeightedPolygon(tuple(map(tuple, pts[hull.vertices])), rest))
    return Mass(tuple(parts))


def _slide_bounds(mass, theta, pad):
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    proj = mass.vertices @ u.T
    return proj.min(axis=0) - pad, proj.max(axis=0) + pad


def _slide_root(mass, theta, a, b, iters=80, ftol=1e-14):
    """Per direction, the slide where r1 vanishes, and r2 there.

    r1 is nondecreasing in the slide, so a bracketed Illinois (modified
    regula falsi) iteration converges from the support's projection range.
    """
    theta = np.asarray(theta, dtype=float)
    c0 = left_offsets(mass, theta, 0.5)
    lo, hi = _slide_bounds(mass, theta, 0.05 * mass.scale)
    _, _, _, f_lo, _ = _three_line_eval(mass, theta, lo, a, b, c0, tol=1e-13)
    _, _, _, f_hi, _ = _three_line_eval(mass, theta, hi, a, b, c0, tol=1e-13)
    x = np.where(f_lo >= 0, lo, hi)
    act = np.nonzero((f_lo < 0) & (f_hi > 0))[0]
    side = np.zeros(len(theta))
    xtol = 1e-15 * mass.scale
    for _ in range(iters):
        if not len(act):
            break
        l, h, fl, fh = lo[act], hi[act], f_lo[act], f_hi[act]
        xa = h - fh * (h - l) / (fh - fl)
        xa = np.where((xa > l) & (xa < h), xa, 0.5 * (l + h))
        _, _, _, f, _ = _three_line_eval(mass, theta[act], xa, a, b, c0[act], tol=1e-13)
        x[act] = xa
        neg, pos = f < 0, f > 0
        f_hi[act] = np.where(neg & (side[act] < 0), 0.5 * fh, np.where(pos, f, fh))
        f_lo[act] = np.where(pos & (side[act] > 0), 0.5 * fl, np.where(neg, f, fl))
        lo[act] = np.where(neg, xa, l)
        hi[act] = np.where(pos, xa, h)
        side[act] = np.where(neg, -1.0, np.where(pos, 1.0, 0.0))
        done = (np.abs(f) <= ftol) | (hi[act] - lo[act] <= xtol)
        act = act[~done]
    _, _, _, r1, r2 = _three_line_eval(mass, theta, x, a, b, c0, tol=1e-13)
    return x, r1, r2


def _nested_bisection(mass, a, b, n_theta, sections=16, xtol=1e-13):
    """Bracket r2 along the slide-root branch over theta and shrink the first bracket."""
    thetas = TWO_PI * np.arange(n_theta + 1) / n_theta
    s, _, r2 = _slide_root(mass, thetas, a, b)
    flips = np.nonzero(_sign_change(r2[:-1], r2[1:]))[0]
    if not len(flips):
        return None
    k = flips[0]
    grid, vals, slides = thetas[k : k + 2], r2[k : k + 2], s[k : k + 2]
    while True:
        j = int(np.argmin(np.abs(vals)))
        if vals[j] == 0 or grid[-1] - grid[0] <= xtol:
            return float(grid[j]), float(slides[j])
        i = int(np.nonzero(_sign_change(vals[:-1], vals[1:]))[0][0])
        lo, hi = grid[i], grid[i + 1]
        th = lo + (hi - lo) * np.arange(1, sections) / sections
        sk, _, rk = _slide_root(mass, th, a, b)
        grid = np.concatenate([[lo], th, [hi]])
        vals = np.concatenate([[vals[i]], rk, [vals[i + 1]]])
        slides = np.concatenate([[slides[i]], sk, [slides[i + 1]]])


def buck_buck(
    mass: Mass,
    a: float,
    b: float,
    c: float,
    tol: float = 1e-9,
    n_theta: int = 72,
    n_slide: int = 41,
) -> SixPartition:
    """Three concurrent lines cutting regions of measure a, b, c, a, b, c counter-clockwise.

    The first line is the halving line of direction theta; the apex slides
    along it by s. Rays m2, m3 are then placed so the upper regions measure a
    and b, and the lower rays are their antipodes, leaving two residuals
    r1(theta, s), r2(theta, s).

    Sliding the apex forward shrinks the wedge R1 for a fixed m2 direction and
    grows the opposite wedge, so r1 is nondecreasing in s. With a strictly
    positive angular density its root s*(theta) is unique and continuous, and
    r2 along that branch changes sign between theta and theta + pi. The main
    solver therefore bisects r1 in s and then r2 in theta, working on the
    mass blended with weight tol/4 of a uniform density on its convex hull
    (which removes empty angular gaps); regions are re-measured on the mass
    itself, which moves each by at most the blend weight.

    Near-degenerate masses can make this ill-conditioned: if a line runs
    through a small cluster, r1 may depend on theta alone and r2 jump in s.
    The bisection result is then polished by a Powell-hybrid solve of
    (r1, r2) = 0 on the mass itself, and failing that, seeds from a (theta, s)
    grid GRID_REFINE times finer than ``n_theta`` are polished the same way. The
    grid stage also covers a = 0, where r1 vanishes identically.
    """
    if min(a, b, c) < 0 or abs(a + b + c - 0.5) > 1e-12:
        raise PreconditionError(f"need a, b, c >= 0 with a + b + c = 1/2, got {(a, b, c)}")

    def residual(x):
        _, _, _, r1, r2 = _three_line_eval(mass, x[0], x[1], a, b, tol=1e-13)
        return np.array([r1[0], r2[0]])

    best = [math.inf]
    tried = []

    def polish(seeds):
        for th, sl in seeds:
            sol = optimize.root(residual, np.array([th, sl], dtype=float), method="hybr", options={"xtol": 1e-15, "maxfev": 200})
            six = _six_from(mass, sol.x[0], sol.x[1], a, b, c)
            tried.append((float(th), float(sl), six.residual))
            best[0] = min(best[0], six.residual)
            if six.residual <= tol:
                return six
        return None

    if a > 0:
        smooth = hull_blend(mass, 0.25 * tol)
        found = _nested_bisection(smooth, a, b, n_theta)
        if found is not None:
            six = _six_from(mass, found[0], found[1], a, b, c, ray_mass=smooth)
            tried.append((found[0], found[1], six.residual))
            best[0] = min(best[0], six.residual)
            if six.residual <= tol:
                return six
            six = polish([found])
            if six is not None:
                return six
    # Coarse grids rarely bracket the small basins near clusters, so go straight to a fine one.
    six = polish(_grid_seeds(mass, a, b, GRID_REFINE * n_theta, n_slide))
    if six is not None:
        return six
    raise SolverError(
        f"three-line partition not found within tol={tol}; best residual {best[0]:.3g}",
        residual=best[0],
        diagnostics={"seeds": tried},
    )


def _grid_seeds(mass, a, b, n_theta, n_slide, n_best=12):
    """Polishing seeds from a (theta, slide) grid on the mass itself.

    Per theta the first slide bracket of r1 is bisected; theta brackets of r2
    along that branch come first, then the grid points with the smallest
    max residual.
    """
    thetas = TWO_PI * np.arange(n_theta) / n_theta
    c0 = left_offsets(mass, thetas, 0.5)
    smin, smax = _slide_bounds(mass, thetas, 0.05 * mass.scale)
    grid = np.linspace(0.0, 1.0, n_slide)
    S = smin[:, None] + (smax - smin)[:, None] * grid[None, :]
    T = np.repeat(thetas[:, None], n_slide, axis=1)
    C = np.repeat(c0[:, None], n_slide, axis=1)
    _, _, _, R1, R2 = _three_line_eval(mass, T.ravel(), S.ravel(), a, b, C.ravel(), tol=1e-10)
    R1 = R1.reshape(T.shape)
    R2 = R2.reshape(T.shape)

    flips = _sign_change(R1[:, :-1], R1[:, 1:])
    j = np.argmax(flips, axis=1)
    rows = np.nonzero(flips.any(axis=1))[0]
    s_root = np.full(n_theta, np.nan)
    r2_root = np.full(n_theta, np.nan)
    if len(rows):
        lo = S[rows, j[rows]]
        hi = S[rows, j[rows] + 1]
        f_lo = R1[rows, j[rows]]
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            _, _, _, f_mid, _ = _three_line_eval(mass, thetas[rows], mid, a, b, c0[rows], tol=1e-11)
            same = np.sign(f_mid) == np.sign(f_lo)
            lo = np.where(same, mid, lo)
            f_lo = np.where(same, f_mid, f_lo)
            hi = np.where(same, hi, mid)
        s_root[rows] = 0.5 * (lo + hi)
        _, _, _, _, r2_root[rows] = _three_line_eval(mass, thetas[rows], s_root[rows], a, b, c0[rows], tol=1e-11)

    seeds = []
    for i in range(n_theta):
        k = (i + 1) % n_theta
        if np.isnan(r2_root[i]) or np.isnan(r2_root[k]):
            continue
        if _sign_change(r2_root[i], r2_root[k]):
            w = abs(r2_root[i]) / (abs(r2_root[i]) + abs(r2_root[k]) + 1e-300)
            th = thetas[i] + w * (TWO_PI / n_theta)
            seeds.append((th, s_root[i] + w * (s_root[k] - s_root[i])))
    order = np.argsort(np.maximum(np.abs(R1), np.abs(R2)), axis=None)
    for flat in order[:n_best]:
        i, jj = np.unravel_index(flat, R1.shape)
        seeds.append((thetas[i], S[i, jj]))
    return seeds


def cross_quantile_line(
    mass: Mass,
    hline: Line,
    t_right: float,
    t_top_right: float,
    tol: float = 1e-9,
    h_angle: float | None = None,
    n_sweep: int = 181,
) -> Line:
    """Line whose right side has measure ``t_right``, of which ``t_top_right`` lies above ``hline``.

    "Above" is the left side of ``hline`` seen along ``h_angle`` (default: the
    line's own direction). The crossing line is parametrised by its direction
    sigma in (h, h + pi), pointing upwards; for each sigma the offset is fixed
    by the ``t_right`` constraint and the upper-right residual is scanned for
    a sign change, then refined by Brent's method.
    """
    if not 0.0 < t_top_right < t_right < 1.0:
        raise PreconditionError("need 0 < t_top_right < t_right < 1")
    h = hline.angle if h_angle is None else float(h_angle)
    hpt = np.asarray(hline.point)
    hdir = direction(h)

    def geometry(sig):
        sig = np.atleast_1d(np.asarray(sig, dtype=float))
        c = left_offsets(mass, sig, 1.0 - t_right)
        n = _left_normals(sig)
        # Crossing point of the sigma line with hline: hpt + lam * hdir.
        lam = (c - n @ hpt) / (n @ hdir)
        apex = hpt[None, :] + lam[:, None] * hdir[None, :]
        return apex

    def g(sig):
        sig = np.atleast_1d(np.asarray(sig, dtype=float))
        apex = geometry(sig)
        prof = AngularProfile(mass, apex)
        return prof.measure(np.full_like(sig, h), sig - h) - t_top_right

    eps = 1e-6
    sig_grid = h + eps + (math.pi - 2 * eps) * np.linspace(0.0, 1.0, n_sweep)
    vals = g(sig_grid)
    flips = np.nonzero(_sign_change(vals[:-1], vals[1:]))[0]
    if len(flips) == 0:
        raise SolverError(
            "no sign change of the upper-right residual over the direction sweep",
            residual=float(np.min(np.abs(vals))),
            diagnostics={"sigma": sig_grid.tolist(), "residual": vals.tolist()},
        )
    k = flips[0]
    if vals[k] == 0:
        sig = sig_grid[k]
    else:
        sig = optimize.brentq(lambda x: float(g(x)[0]), sig_grid[k], sig_grid[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    apex = geometry(sig)[0]
    line = Line(as_point(apex), sig)
    err = abs(float(g(sig)[0]))
    if err > tol:
        raise SolverError(f"cross quantile line residual {err:.3g} exceeds tol", residual=err)
    return line
