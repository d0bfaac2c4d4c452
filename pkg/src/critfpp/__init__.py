"""Critical first-passage percolation on the square lattice: environments,
geodesics, circuit topology, the distinguished-geodesic construction, arm
events, and near-critical estimators."""

from .arms import ArmQuery, EstimateResult, edge_rooted_3arm, estimate_pi, has_arms
from .circuits import Circuit, StatusWindow, join, meet, trace_boundaries
from .construction import (
    ConstructionError,
    GeodesicConstruction,
    circuit_sequence,
    consistency_check,
    construct,
    dual_path_zeta,
    verify,
)
from .environment import Environment, WeightDistribution, mix_seed
from .lattice import (
    DUAL,
    EAST,
    NORTH,
    PRIMAL,
    Box,
    Edge,
    Vertex,
    dual_edge,
    edge_between,
)
from .nearcritical import (
    AnnulusGeodesicStats,
    CrossingQuery,
    annulus_stats,
    correlation_length_hat,
    kesten_product,
    p_R_hat,
    sigma_hat,
)
from .shortest_path import (
    GridWindow,
    LatticePath,
    fast_boundary_TN,
    grid_geodesic,
    passage_time,
    rectangle_crossing_time,
)

__version__ = "0.1.0"

__all__ = [
    "ArmQuery",
    "AnnulusGeodesicStats",
    "Box",
    "Circuit",
    "ConstructionError",
    "CrossingQuery",
    "DUAL",
    "EAST",
    "Edge",
    "Environment",
    "EstimateResult",
    "GeodesicConstruction",
    "GridWindow",
    "LatticePath",
    "NORTH",
    "PRIMAL",
    "StatusWindow",
    "Vertex",
    "WeightDistribution",
    "annulus_stats",
    "circuit_sequence",
    "consistency_check",
    "construct",
    "correlation_length_hat",
    "dual_edge",
    "dual_path_zeta",
    "edge_between",
    "edge_rooted_3arm",
    "estimate_pi",
    "fast_boundary_TN",
    "grid_geodesic",
    "has_arms",
    "join",
    "kesten_product",
    "meet",
    "mix_seed",
    "p_R_hat",
    "passage_time",
    "rectangle_crossing_time",
    "sigma_hat",
    "trace_boundaries",
    "verify",
]
