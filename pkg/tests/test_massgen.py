import math

import numpy as np
import pytest

from conftest import oracle_halfplane
from equicover.errors import PreconditionError
from equicover.mass import AngularProfile, Mass
from equicover.massgen import generate, random_mass, tight_mass, uniform_square
from equicover.partitions import depth
from equicover.verify import monte_carlo_measure
from equicover.geometry import HalfPlane, Line


def test_square_total_and_halving():
    m = uniform_square()
    assert sum(p.weight for p in m.parts) == 1.0
    assert oracle_halfplane(m, (0, 0), 0.0) == pytest.approx(0.5, abs=1e-15)
    assert depth(m, (0, 0), 360).min_halfplane_measure == pytest.approx(0.5, abs=0.01)


def test_random_mass_deterministic_and_normalised():
    a, b = random_mass(7), random_mass(7)
    assert a == b
    assert math.fsum(p.weight for p in a.parts) == pytest.approx(1.0, abs=1e-12)
    assert random_mass(8) != a


def test_random_mass_halfplane_vs_sampling():
    m = random_mass(11)
    line = Line((0.1, -0.2), 0.9)
    est, se = monte_carlo_measure(m, HalfPlane(line), n=400_000, seed=3)
    assert abs(est - oracle_halfplane(m, line.point, line.angle)) <= 3 * se


def test_random_mass_rejects_k():
    with pytest.raises(PreconditionError):
        random_mass(1, k=0)


@pytest.mark.parametrize("eps", [0.01, 0.05])
def test_tight_mass_depths(eps):
    m = tight_mass(eps)
    assert sum(p.weight for p in m.parts) == pytest.approx(1.0)
    assert depth(m, (0, 0), 720).min_halfplane_measure == pytest.approx(1 / 3, abs=2 * eps)
    for part in m.parts:
        c = part.array.mean(axis=0)
        assert depth(m, c, 720).min_halfplane_measure <= 1 / 3 + 2 * eps


def test_tight_mass_grid_depth_bound():
    eps = 0.01
    m = tight_mass(eps)
    xs = np.linspace(-0.7, 0.7, 100)
    pts = np.array([(x, y) for x in xs for y in xs])
    phis = 2 * math.pi * np.arange(360) / 360
    prof = AngularProfile(m, pts)
    vals = prof.measure(np.broadcast_to(phis, (len(pts), 360)), np.full((len(pts), 360), math.pi))
    assert vals.min(axis=1).max() <= 1 / 3 + 3 * eps


def test_tight_mass_rejects_epsilon():
    with pytest.raises(PreconditionError):
        tight_mass(0.2)


def test_generated_masses_validate():
    for kind in ("square", "random", "tight"):
        m = generate(kind, seed=2)
        assert Mass.from_dict(m.to_dict()) == m
    with pytest.raises(PreconditionError):
        generate("disk")
