"""Convex equicoverings of planar masses by wedges."""

from .errors import (
    CenterpointError,
    EquicoverError,
    InvalidMassError,
    PreconditionError,
    QuantileUnreachable,
    SolverError,
    VerificationError,
)
from .geometry import HalfPlane, Line, Point2, Ray, Side, Wedge
from .mass import AngularProfile, Mass, WeightedPolygon, load_mass, measure_halfplane, measure_wedge, ray_at_measure, save_mass
from .massgen import random_mass, tight_mass, uniform_square
from .nonspiral import GeneralCover, construct_83, verify_83
from .partitions import (
    SixPartition,
    buck_buck,
    centerpoint,
    cross_quantile_line,
    deepest_point,
    depth,
    halving_line,
    quantile_line,
)
from .spiral import (
    ConstructionResult,
    CoverParams,
    FanConstruction,
    Orbit,
    Regime,
    SpiralCover,
    Status,
    anchored_fan,
    basic_construction,
    classify_regime,
    construct,
    construct_3p_minus_1,
    construct_3p_minus_2,
    construct_3p_minus_3,
    construct_centerpoint_spiral,
    heuristic_search,
    p_wedges,
)
from .verify import VerifyReport, monte_carlo_measure, verify_general, verify_spiral

__version__ = "0.1.0"
