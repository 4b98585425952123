"""Online sum-of-radii clustering: algorithms, reductions, lower bounds."""

from .adversary import certificate_floor, run_hst_adversary, run_plane_adversary
from .fractional import FracSumRad, PhasedFrac, phase_plan, radius_types
from .generators import (
    gen_finite,
    gen_hst,
    gen_line_uniform,
    gen_permit,
    gen_plane_uniform,
    gen_planted_plane,
    rng_from,
)
from .metric import (
    FiniteMetric,
    PlaneMetric,
    StrictHst,
    build_strict_hst,
    distortion,
    embed_hst,
    embed_ternary_hst,
    validate_metric,
)
from .model import (
    Cluster,
    Instance,
    Solution,
    is_feasible,
    round_radii_pow2,
    solution_cost,
)
from .offline import ExactSizeError, exact_opt, exact_opt_pow2, permit_opt
from .online import (
    ALGORITHMS,
    FixedRadiusAdapter,
    FlexibleAdapter,
    InvariantViolation,
    NaiveOnline,
    PDSumRad,
    SimpleSumRad,
)
from .reductions import (
    PermitInstance,
    PermitTree,
    canonicalize_cluster,
    cluster_sol_to_permit_sol,
    hst_to_permit,
    permit_sol_to_cluster_sol,
    permit_to_cluster,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "Cluster",
    "ExactSizeError",
    "FiniteMetric",
    "FixedRadiusAdapter",
    "FlexibleAdapter",
    "FracSumRad",
    "Instance",
    "InvariantViolation",
    "NaiveOnline",
    "PDSumRad",
    "PermitInstance",
    "PermitTree",
    "PhasedFrac",
    "PlaneMetric",
    "SimpleSumRad",
    "Solution",
    "StrictHst",
    "build_strict_hst",
    "canonicalize_cluster",
    "certificate_floor",
    "cluster_sol_to_permit_sol",
    "distortion",
    "embed_hst",
    "embed_ternary_hst",
    "exact_opt",
    "exact_opt_pow2",
    "gen_finite",
    "gen_hst",
    "gen_line_uniform",
    "gen_permit",
    "gen_plane_uniform",
    "gen_planted_plane",
    "hst_to_permit",
    "is_feasible",
    "permit_opt",
    "permit_sol_to_cluster_sol",
    "permit_to_cluster",
    "phase_plan",
    "radius_types",
    "rng_from",
    "round_radii_pow2",
    "run_hst_adversary",
    "run_plane_adversary",
    "solution_cost",
    "validate_metric",
]
