"""Open FLRW scale factors, continuous extensions through t = 0, and SSS degeneracy checks."""

from __future__ import annotations

from .classifier import (
    EUCLIDEAN,
    HYPERBOLIC,
    FlrwReport,
    MilneReport,
    a_prime_at_zero,
    b_prime_at_zero,
    check_open_flrw,
    classify_milne_like,
    integral_one_over_a_diverges,
)
from .errors import (
    CausalityError,
    DegeneracyError,
    DomainError,
    DslError,
    DslSyntaxError,
    FlrwError,
    GaugeError,
    HypothesisViolation,
    NonConstantExponentError,
    OutOfRangeError,
    QuadratureError,
    RegionError,
    UnknownIdentifierError,
)
from .extensions import (
    BoundaryDiagnostic,
    MilneChart,
    NullChart2D,
    boundary_slice_length,
    build_2d_null_extension,
    build_milne_extension,
    invert_milne,
    verify_isometry,
)
from .geometry import (
    CurvePath,
    DistanceBound,
    MetricValue,
    distance_lower_bound,
    flrw_metric,
    geodesic_lift_check,
    lorentzian_length,
    numeric_ricci_scalar,
    scalar_curvature,
    t_of_tau,
    tau_of_t,
)
from .jet import Jet2
from .numerics import LimitEstimate, limit_at_zero
from .scale_factor import GaugeFunction, ScaleFactor, evaluate_jet, parse_gauge, parse_scale_factor
from .sss import (
    DegeneracyReport,
    SssChart,
    analyze_sss,
    degeneracy_curve,
    g_limit_along_R,
    s_and_T_divergence,
    sss_euclidean,
    sss_hyperbolic,
    verify_sss_identities,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryDiagnostic",
    "CausalityError",
    "CurvePath",
    "DegeneracyError",
    "DegeneracyReport",
    "DistanceBound",
    "DomainError",
    "DslError",
    "DslSyntaxError",
    "EUCLIDEAN",
    "FlrwError",
    "FlrwReport",
    "GaugeError",
    "GaugeFunction",
    "HYPERBOLIC",
    "HypothesisViolation",
    "Jet2",
    "LimitEstimate",
    "MetricValue",
    "MilneChart",
    "MilneReport",
    "NonConstantExponentError",
    "NullChart2D",
    "OutOfRangeError",
    "QuadratureError",
    "RegionError",
    "ScaleFactor",
    "SssChart",
    "UnknownIdentifierError",
    "a_prime_at_zero",
    "analyze_sss",
    "b_prime_at_zero",
    "boundary_slice_length",
    "build_2d_null_extension",
    "build_milne_extension",
    "check_open_flrw",
    "classify_milne_like",
    "degeneracy_curve",
    "distance_lower_bound",
    "evaluate_jet",
    "flrw_metric",
    "g_limit_along_R",
    "geodesic_lift_check",
    "integral_one_over_a_diverges",
    "invert_milne",
    "limit_at_zero",
    "lorentzian_length",
    "numeric_ricci_scalar",
    "parse_gauge",
    "parse_scale_factor",
    "s_and_T_divergence",
    "scalar_curvature",
    "sss_euclidean",
    "sss_hyperbolic",
    "t_of_tau",
    "tau_of_t",
    "verify_isometry",
    "verify_sss_identities",
]
