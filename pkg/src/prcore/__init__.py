"""Theta-PR decision procedures."""

from .c2 import (
    c2_failure_witness,
    c2_normal_form,
    c2_oracle,
    c2_pr_oracle,
    c2_system,
    phases_for_real_ratio,
)
from .cover3 import fails_3pr_cover, span_coefficients, verify_cover
from .engine import (
    EngineOptions,
    analyze_assignment,
    build_constraint_matrix,
    decide_theta_pr,
    subspace_contains_independent_pair,
    verify_witness,
    witness_residual,
)
from .frames import fails_2pr_oracle, has_complement_property, is_complete, is_full_spark
from .generic import (
    arc_count_lower_bound,
    assignment_from_values,
    construct_invertible_system,
    expected_determinant,
    heinosaari_lower_bound,
    matching_partition,
)
from .oracles import (
    ORACLES,
    C2ClosedFormOracle,
    ComplementPropertyOracle,
    EngineOracle,
    ThreeCoverOracle,
    get_oracle,
)

__all__ = [
    "EngineOptions",
    "analyze_assignment",
    "build_constraint_matrix",
    "decide_theta_pr",
    "subspace_contains_independent_pair",
    "verify_witness",
    "witness_residual",
    "is_complete",
    "has_complement_property",
    "is_full_spark",
    "fails_2pr_oracle",
    "fails_3pr_cover",
    "span_coefficients",
    "verify_cover",
    "c2_system",
    "c2_oracle",
    "c2_pr_oracle",
    "c2_normal_form",
    "c2_failure_witness",
    "phases_for_real_ratio",
    "matching_partition",
    "assignment_from_values",
    "construct_invertible_system",
    "expected_determinant",
    "heinosaari_lower_bound",
    "arc_count_lower_bound",
    "ORACLES",
    "get_oracle",
    "EngineOracle",
    "ComplementPropertyOracle",
    "ThreeCoverOracle",
    "C2ClosedFormOracle",
]
