"""Moment comparison for weighted sums of symmetric discrete laws.

Exact and certified-tolerance moments of S = sum_i a_i X_i for independent
symmetric atomic X_i, plus verifiers for the majorization, convex-dominance
and characteristic-function inequalities that pin down the sharp Gaussian
constants and the zero-mass thresholds where they stop holding.
"""
from .exactprob import (
    GaussianRef,
    MomentMethod,
    MomentValue,
    StepLawParams,
    SumLaw,
    SymmetricAtomLaw,
    abs_moment,
    convolve_weighted,
    first_abs_moment,
    gaussian_norm,
    law_to_json,
    make_step_law,
    make_symmetric_law,
    plus_part_second_moment,
    second_moment,
    shifted_gaussian_moment,
    sigma_of,
    weighted_sum_norm,
)
from .haagerup import (
    CharFn,
    CriticalExponentResult,
    charfn,
    charfn_power_integral,
    concavity_in_zero_mass,
    first_abs_moment_integral,
    haagerup_function,
    l1_l2_verdict,
    solve_critical_exponent,
    two_weight_threshold,
    verify_charfn_power_floor,
)
from .lemmas import (
    Cone,
    ConvexityVerdict,
    SLOPE_LOWER_BOUNDS,
    TANGENT_LOWER_BOUNDS,
    check_cone_membership,
    endpoint_argument,
    endpoint_gap,
    endpoint_gap_slope,
    plus_part_gap,
    plus_part_gap_slope,
    signed_power_chord,
    signed_power_sum,
    slope_at_breakpoint,
    slope_table,
    sqrt_power_pair,
    tangent_values,
    two_point_best_constant,
    two_point_gap,
    verify_convex_dominance,
    verify_two_point,
)
from .quadrature import QuadratureError, QuadratureResult, integrate_adaptive, integrate_khinchin_tail
from .reports import VerdictReport, format_reports
from .schur import (
    MajorizationPair,
    SchurVerdict,
    comparison_threshold_by_L,
    comparison_zero_mass_limit,
    equal_weight_ratio_sequence,
    majorization_report,
    majorization_sample_test,
    ostrowski_check,
    schur_objective,
    schur_zero_mass_threshold,
    two_point_schur_check,
    verify_gaussian_comparison,
)

__version__ = "0.1.0"

__all__ = [
    "CharFn",
    "Cone",
    "ConvexityVerdict",
    "CriticalExponentResult",
    "GaussianRef",
    "MajorizationPair",
    "MomentMethod",
    "MomentValue",
    "QuadratureError",
    "QuadratureResult",
    "SLOPE_LOWER_BOUNDS",
    "SchurVerdict",
    "StepLawParams",
    "SumLaw",
    "SymmetricAtomLaw",
    "TANGENT_LOWER_BOUNDS",
    "VerdictReport",
    "abs_moment",
    "charfn",
    "charfn_power_integral",
    "check_cone_membership",
    "comparison_threshold_by_L",
    "comparison_zero_mass_limit",
    "concavity_in_zero_mass",
    "convolve_weighted",
    "endpoint_argument",
    "endpoint_gap",
    "endpoint_gap_slope",
    "equal_weight_ratio_sequence",
    "first_abs_moment",
    "first_abs_moment_integral",
    "format_reports",
    "gaussian_norm",
    "haagerup_function",
    "integrate_adaptive",
    "integrate_khinchin_tail",
    "l1_l2_verdict",
    "law_to_json",
    "majorization_report",
    "majorization_sample_test",
    "make_step_law",
    "make_symmetric_law",
    "ostrowski_check",
    "plus_part_gap",
    "plus_part_gap_slope",
    "plus_part_second_moment",
    "schur_objective",
    "schur_zero_mass_threshold",
    "second_moment",
    "shifted_gaussian_moment",
    "sigma_of",
    "signed_power_chord",
    "signed_power_sum",
    "slope_at_breakpoint",
    "slope_table",
    "solve_critical_exponent",
    "sqrt_power_pair",
    "tangent_values",
    "two_point_best_constant",
    "two_point_gap",
    "two_point_schur_check",
    "two_weight_threshold",
    "verify_charfn_power_floor",
    "verify_convex_dominance",
    "verify_gaussian_comparison",
    "verify_two_point",
    "weighted_sum_norm",
]
