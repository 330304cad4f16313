"""Independent checks for covers: piece measures, convexity and multiplicity.

Single-apex spirals get an exact combinatorial multiplicity check over the
arcs between consecutive ray directions. Covers with several apexes are
checked by sampling points from the mass.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import TWO_PI, HalfPlane, Wedge, direction
from .mass import Mass, measure_wedge

SWEEP_SLACK = 1e-9
BOUNDARY_BAND = 1e-6
ARC_EPS = 1e-12


@dataclass
class VerifyReport:
    per_piece_measure_error: list[float]
    max_sweep: float
    multiplicity_ok: bool
    multiplicity_method: str
    samples_tested: int = 0
    failures: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def sample_mass(mass: Mass, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points distributed according to the mass (area-weighted triangle fans)."""
    tris, probs = [], []
    for part in mass.parts:
        v = part.array
        for i in range(1, len(v) - 1):
            tri = np.array([v[0], v[i], v[i + 1]])
            e1, e2 = tri[1] - tri[0], tri[2] - tri[0]
            area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
            tris.append(tri)
            probs.append(part.weight * area / part.area)
    tris = np.array(tris)
    probs = np.array(probs)
    idx = rng.choice(len(tris), size=n, p=probs / probs.sum())
    r1 = np.sqrt(rng.uniform(size=n))
    r2 = rng.uniform(size=n)
    t = tris[idx]
    return (1 - r1)[:, None] * t[:, 0] + (r1 * (1 - r2))[:, None] * t[:, 1] + (r1 * r2)[:, None] * t[:, 2]


def monte_carlo_measure(mass: Mass, region: Wedge | HalfPlane, n: int = 10**6, seed: int = 0) -> tuple[float, float]:
    """Sampling estimate of the measure of ``region`` and its binomial standard error."""
    if n < 1:
        raise ValueError("need at least one sample")
    pts = sample_mass(mass, n, np.random.default_rng(seed))
    hits = region.contains(pts)
    est = float(hits.mean())
    return est, math.sqrt(max(est * (1 - est), 0.0) / n)


def _check_pieces(mass, pieces, target, tol, failures):
    errors = []
    for i, w in enumerate(pieces):
        err = measure_wedge(mass, w) - target
        errors.append(float(err))
        if abs(err) > tol:
            failures.append({"kind": "measure", "piece": i, "error": float(err)})
        if not w.is_convex:
            failures.append({"kind": "convexity", "piece": i, "sweep": float(w.sweep)})
    return errors


def arc_multiplicities(pieces) -> list[tuple[float, float, int]]:
    """(arc start, arc end, number of pieces covering it) for every open arc between piece boundary directions."""
    dirs = np.sort(np.mod([a for w in pieces for a in (w.start, w.end)], TWO_PI))
    keep = np.concatenate([[True], np.diff(dirs) > ARC_EPS])
    dirs = dirs[keep]
    if len(dirs) > 1 and dirs[0] + TWO_PI - dirs[-1] <= ARC_EPS:
        dirs = dirs[:-1]
    ends = np.append(dirs[1:], dirs[0] + TWO_PI)
    out = []
    for a, b in zip(dirs, ends):
        mid = 0.5 * (a + b)
        count = sum(1 for w in pieces if w.sweep >= TWO_PI or np.mod(mid - w.start, TWO_PI) < w.sweep)
        out.append((float(a), float(b), count))
    return out


def verify_spiral(mass: Mass, cover, tol: float = 1e-8) -> VerifyReport:
    """Check a single-apex cover: measures p/q, sweeps at most pi, arc multiplicity exactly p."""
    pieces = list(cover.pieces)
    apexes = {tuple(w.apex) for w in pieces}
    if len(apexes) != 1:
        raise ValueError("verify_spiral needs pieces sharing one apex")
    p, q = cover.params.p, cover.params.q
    failures: list[dict] = []
    errors = _check_pieces(mass, pieces, p / q, tol, failures)
    if len(pieces) != q:
        failures.append({"kind": "count", "expected": q, "found": len(pieces)})
    mult_ok = True
    for a, b, count in arc_multiplicities(pieces):
        if count != p:
            mult_ok = False
            failures.append({"kind": "multiplicity", "arc": [a, b], "count": count, "expected": p})
    return VerifyReport(
        per_piece_measure_error=errors,
        max_sweep=max(w.sweep for w in pieces),
        multiplicity_ok=mult_ok,
        multiplicity_method="ExactArc",
        failures=failures,
    )


def _line_distance(pts, origin, angle):
    rel = pts - np.asarray(origin)
    u = direction(angle)
    return np.abs(rel[:, 0] * u[1] - rel[:, 1] * u[0])


def verify_general(
    mass: Mass,
    cover,
    tol: float = 1e-8,
    n_samples: int = 10_000,
    seed: int = 0,
) -> VerifyReport:
    """Check a cover whose pieces may have different apexes; multiplicity by sampling the mass."""
    if n_samples < 1000:
        raise ValueError("verify_general needs at least 1000 samples")
    pieces = list(cover.pieces)
    target = float(cover.target_measure)
    failures: list[dict] = []
    warnings: list[str] = []
    errors = _check_pieces(mass, pieces, target, tol, failures)

    pts = sample_mass(mass, n_samples, np.random.default_rng(seed))
    near = np.zeros(len(pts), dtype=bool)
    counts = np.zeros(len(pts), dtype=int)
    for w in pieces:
        counts += w.contains(pts)
        if w.sweep < TWO_PI:
            for ang in (w.start, w.end):
                near |= _line_distance(pts, w.apex, ang) <= BOUNDARY_BAND
    kept = ~near
    n_kept = int(kept.sum())
    if n_samples - n_kept > 0.05 * n_samples:
        warnings.append(f"{n_samples - n_kept} of {n_samples} samples discarded near boundaries")
    bad = kept & (counts != cover.target_multiplicity)
    mult_ok = not bad.any()
    if not mult_ok:
        idx = np.nonzero(bad)[0]
        failures.append(
            {
                "kind": "multiplicity",
                "bad_samples": int(len(idx)),
                "fraction": float(len(idx) / max(n_kept, 1)),
                "examples": [{"point": pts[i].tolist(), "count": int(counts[i])} for i in idx[:5]],
                "expected": cover.target_multiplicity,
            }
        )
    return VerifyReport(
        per_piece_measure_error=errors,
        max_sweep=max(w.sweep for w in pieces),
        multiplicity_ok=mult_ok,
        multiplicity_method="Sampled",
        samples_tested=n_kept,
        failures=failures,
        warnings=warnings,
    )
