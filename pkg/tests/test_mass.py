import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MASS_SET, oracle_halfplane, oracle_wedge, sample_points
from equicover.errors import InvalidMassError, QuantileUnreachable
from equicover.geometry import HalfPlane, Line, Side, Wedge
from equicover.mass import (
    AngularProfile,
    Mass,
    WeightedPolygon,
    halfplane_measures,
    load_mass,
    measure_halfplane,
    measure_wedge,
    ray_at_measure,
    save_mass,
)
from equicover.massgen import random_mass, tight_mass, uniform_square

SQUARE = uniform_square()
angles = st.floats(-20.0, 20.0, allow_nan=False)
sweeps = st.floats(1e-3, 2 * math.pi - 1e-3)
coords = st.floats(-1.5, 1.5, allow_nan=False)
seeds = st.integers(0, 10_000)


# Oracles: hand-computed square values.
def test_square_quadrant_is_quarter():
    assert measure_wedge(SQUARE, Wedge((0, 0), 0.0, math.pi / 2)) == pytest.approx(0.25, abs=1e-14)


def test_square_corner_wedge_from_edge_midpoint():
    # From (1, 0), between (1, 1) and (-1, 1): a triangle of area 1 out of 4.
    w = Wedge((1.0, 0.0), math.pi / 2, math.atan2(1, -2) - math.pi / 2)
    assert measure_wedge(SQUARE, w) == pytest.approx(0.25, abs=1e-13)


def test_wedge_with_apex_outside_mass():
    # From (3, 0) the whole square lies within atan(1/2) of direction pi.
    half = math.atan2(1, 2) + 1e-9
    assert measure_wedge(SQUARE, Wedge((3.0, 0.0), math.pi - half, 2 * half)) == pytest.approx(1.0, abs=1e-12)
    assert measure_wedge(SQUARE, Wedge((3.0, 0.0), -0.5, 1.0)) == 0.0


def test_full_turn_wedge():
    assert measure_wedge(SQUARE, Wedge((5.0, 5.0), 1.0, 2 * math.pi)) == 1.0


@pytest.mark.parametrize("name,mass", MASS_SET, ids=[n for n, _ in MASS_SET])
def test_wedge_matches_clipping_oracle(name, mass):
    rng = np.random.default_rng(11)
    for apex in sample_points(rng, mass, 15):
        start = rng.uniform(-10, 10)
        for sweep in (0.3, 1.5, math.pi, 4.0, 6.0):
            got = measure_wedge(mass, Wedge(apex, start, sweep))
            assert got == pytest.approx(oracle_wedge(mass, apex, start, sweep), abs=1e-12)


@pytest.mark.parametrize("name,mass", MASS_SET, ids=[n for n, _ in MASS_SET])
def test_halfplane_matches_oracle(name, mass):
    rng = np.random.default_rng(5)
    for pt in sample_points(rng, mass, 20):
        ang = rng.uniform(0, 2 * math.pi)
        line = Line(pt, ang)
        left = measure_halfplane(mass, HalfPlane(line, Side.LEFT))
        expect = oracle_halfplane(mass, pt, line.angle)
        assert left == pytest.approx(expect, abs=1e-12)
        assert measure_halfplane(mass, HalfPlane(line, Side.RIGHT)) == pytest.approx(1 - expect, abs=1e-12)


def test_vectorised_halfplanes_agree_with_clipping():
    mass = random_mass(3)
    rng = np.random.default_rng(0)
    phis = rng.uniform(0, 2 * math.pi, 50)
    normals = np.column_stack([np.cos(phis), np.sin(phis)])
    offsets = rng.uniform(-0.5, 0.5, 50)
    got = halfplane_measures(mass, normals, offsets)
    for n, c, g in zip(normals, offsets, got):
        # {n . x >= c} is the left side of direction angle(n) - pi/2 through c*n.
        assert g == pytest.approx(oracle_halfplane(mass, c * n, math.atan2(n[1], n[0]) - math.pi / 2), abs=1e-12)


# Properties.
@settings(max_examples=60, deadline=None)
@given(seeds, coords, coords, angles, sweeps, st.floats(0.01, 0.99))
def test_additivity(seed, x, y, start, sweep, frac):
    mass = random_mass(seed % 50, k=3)
    prof = AngularProfile(mass, np.array([x, y]))
    a = sweep * frac
    whole = prof.measure(start, sweep)
    parts = prof.measure(start, a) + prof.measure(start + a, sweep - a)
    assert whole == pytest.approx(parts, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, coords, coords, angles)
def test_opposite_halfplanes_sum_to_one(seed, x, y, start):
    mass = random_mass(seed % 50, k=3)
    prof = AngularProfile(mass, np.array([x, y]))
    # Lines carry no mass, so the two closed sides add up to exactly one.
    assert prof.measure(start, math.pi) + prof.measure(start + math.pi, math.pi) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, coords, coords, angles)
def test_degenerate_wedge_is_null(seed, x, y, start):
    mass = random_mass(seed % 50, k=3)
    assert AngularProfile(mass, np.array([x, y])).measure(start, 0.0) == 0.0


@settings(max_examples=40, deadline=None)
@given(seeds, coords, coords, angles, sweeps, st.floats(-math.pi, math.pi), coords, coords)
def test_rigid_motion_equivariance(seed, x, y, start, sweep, rot, tx, ty):
    mass = random_mass(seed % 50, k=3)
    moved = mass.transformed(rot, (tx, ty))
    c, s = math.cos(rot), math.sin(rot)
    apex2 = (c * x - s * y + tx, s * x + c * y + ty)
    a = measure_wedge(mass, Wedge((x, y), start, sweep))
    b = measure_wedge(moved, Wedge(apex2, start + rot, sweep))
    assert a == pytest.approx(b, abs=1e-11)


@settings(max_examples=60, deadline=None)
@given(seeds, coords, coords, angles, st.floats(0.001, 1.0))
def test_quantile_inverts_measure(seed, x, y, start, t):
    mass = random_mass(seed % 50, k=3)
    prof = AngularProfile(mass, np.array([x, y]))
    theta = float(prof.quantile(start, t))
    assert start <= theta <= start + 2 * math.pi
    assert prof.measure(start, theta - start) == pytest.approx(t, abs=1e-10)
    # Smallest such angle: slightly earlier falls short.
    assert prof.measure(start, max(theta - start - 1e-7, 0.0)) < t


def test_quantile_in_gap_returns_smallest_angle():
    # Seen from the origin, the tight mass has three narrow visible cones.
    mass = tight_mass(0.01)
    theta = ray_at_measure(mass, (0.0, 0.0), 0.0, 1 / 3)
    assert theta == pytest.approx(math.pi / 2 + math.atan2(0.01, 1 / math.sqrt(3) - 0.01), abs=1e-9)


def test_quantile_unreachable():
    with pytest.raises(QuantileUnreachable):
        ray_at_measure(SQUARE, (0, 0), 0.0, 1.5)


def test_gap_end_on_tight_mass():
    mass = tight_mass(0.01)
    prof = AngularProfile(mass, np.zeros(2))
    # Just past the top cluster the next visible directions start at the lower left one.
    after_top = math.pi / 2 + 0.2
    lower_left = 7 * math.pi / 6
    end = float(prof.gap_end(after_top))
    corners = mass.parts[1].array
    edge = float(np.mod(np.arctan2(corners[:, 1], corners[:, 0]), 2 * math.pi).min())
    assert end == pytest.approx(edge, abs=1e-12)
    assert after_top < end < lower_left
    # Inside a visible cone the gap is empty.
    assert float(prof.gap_end(math.pi / 2)) == math.pi / 2


# Validation and I/O.
def test_rejects_clockwise_polygon():
    with pytest.raises(InvalidMassError):
        WeightedPolygon(((0, 0), (0, 1), (1, 1), (1, 0)), 1.0)


def test_rejects_nonconvex_polygon():
    with pytest.raises(InvalidMassError):
        WeightedPolygon(((0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)), 1.0)


def test_rejects_bad_weights():
    poly = ((0, 0), (1, 0), (0, 1))
    with pytest.raises(InvalidMassError):
        Mass((WeightedPolygon(poly, 0.5),))
    with pytest.raises(InvalidMassError):
        WeightedPolygon(poly, -1.0)


def test_malformed_document():
    with pytest.raises(InvalidMassError):
        Mass.from_dict({"parts": [{"vertices": [[0, 0], [1, 0]]}]})


def test_json_round_trip(tmp_path):
    mass = random_mass(4)
    path = tmp_path / "m.json"
    save_mass(mass, path)
    assert load_mass(path) == mass
    assert json.loads(path.read_text()) == mass.to_dict()
