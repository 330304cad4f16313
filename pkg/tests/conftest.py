import math

import numpy as np
import pytest

from equicover.massgen import random_mass, tight_mass, uniform_square


def mass_set():
    """The masses every construction is exercised on."""
    out = [("square", uniform_square()), ("tight", tight_mass(0.01))]
    out += [(f"random{s}", random_mass(s, k=5)) for s in range(1, 11)]
    return out


MASS_SET = mass_set()
MASS_IDS = [name for name, _ in MASS_SET]


@pytest.fixture(params=MASS_SET, ids=MASS_IDS)
def any_mass(request):
    return request.param[1]


def _clip(poly, a, b, c):
    """Keep the part of ``poly`` with a*x + b*y >= c (plain Sutherland-Hodgman)."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = a * p[0] + b * p[1] - c, a * q[0] + b * q[1] - c
        if fp >= 0:
            out.append(p)
        if fp * fq < 0:
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _area(poly):
    if len(poly) < 3:
        return 0.0
    s = 0.0
    for i in range(len(poly)):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % len(poly)]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def oracle_halfplane(mass, point, angle):
    """Measure left of the directed line through ``point`` with direction ``angle``."""
    a, b = -math.sin(angle), math.cos(angle)
    c = a * point[0] + b * point[1]
    total = 0.0
    for part in mass.parts:
        poly = [tuple(v) for v in part.vertices]
        total += part.weight * _area(_clip(poly, a, b, c)) / _area(poly)
    return total


def oracle_wedge(mass, apex, start, sweep):
    """Wedge measure by clipping against its two bounding half-planes.

    Sweeps above pi are handled through the complementary wedge.
    """
    if sweep >= 2 * math.pi:
        return 1.0
    if sweep > math.pi:
        return 1.0 - oracle_wedge(mass, apex, start + sweep, 2 * math.pi - sweep)
    end = start + sweep
    a1, b1 = -math.sin(start), math.cos(start)
    a2, b2 = math.sin(end), -math.cos(end)
    total = 0.0
    for part in mass.parts:
        poly = [tuple(v) for v in part.vertices]
        clipped = _clip(poly, a1, b1, a1 * apex[0] + b1 * apex[1])
        if len(clipped) >= 3:
            clipped = _clip(clipped, a2, b2, a2 * apex[0] + b2 * apex[1])
        total += part.weight * _area(clipped) / _area(poly)
    return total


def hand_regime(p, q):
    """Regime conditions rewritten in terms of the offset d = 3p - q, plus the (1, 2) halving case."""
    d = 3 * p - q
    if 2 * p > q:
        return "InfeasibleAllMasses"
    if d > 3:
        return "ExistsBadMass"
    if d == 3:
        return "OpenEvenCase" if p % 2 == 0 else "Guaranteed3pMinus3"
    if d in (1, 2) and p >= 2:
        return {1: "Guaranteed3pMinus1", 2: "Guaranteed3pMinus2"}[d]
    if p == 1 and q == 2:
        return "TrivialHalving"
    assert d <= 0
    return "GuaranteedCenterpoint"


def three_line_triples():
    """(a, b, c) used by the three-line constructions, for r = 1, 2, 3."""
    out = [(1 / 6, 1 / 6, 1 / 6)]
    for r in (1, 2, 3):
        den = 6 * r + 4
        out.append((r / den, (r + 1) / den, (r + 1) / den))
    for r in (1, 2, 3):
        den = 12 * r + 2
        out.append((2 * r / den, 2 * r / den, (2 * r + 1) / den))
    return out


def sample_points(rng, mass, n):
    x0, y0, x1, y1 = mass.bounds
    pad = 0.3 * mass.scale
    return np.column_stack([rng.uniform(x0 - pad, x1 + pad, n), rng.uniform(y0 - pad, y1 + pad, n)])
