"""Intrinsic non-locality: extensions, bounds, LOSR and rounding."""

from .constructions import convexity_flag_extension, product_extension
from .extension import (
    ClassicalExtension,
    NlEstimate,
    column_cmi,
    extension_cmi,
    extension_residuals,
    extension_value,
    lhv_extension,
    trivial_extension,
    trivial_extension_bound,
)
from .losr import LosrBox, induced_input_dist, losr_apply, monotonicity_witness
from .optimize import OptimizeOptions, optimize_extension
from .prbox import PR_CHAIN, PR_CONSTRAINTS, ns_constraints, pr_box_exact, propagate_pr_constraints
from .rounding import (
    RoundingResult,
    cheat_sheet_rounding,
    faithfulness_bound,
    rounding_bound,
    typicality_epsilon,
    typicality_schedule,
)

__all__ = [
    "ClassicalExtension", "NlEstimate", "column_cmi", "extension_cmi", "extension_residuals",
    "extension_value", "lhv_extension", "trivial_extension", "trivial_extension_bound",
    "convexity_flag_extension", "product_extension",
    "LosrBox", "induced_input_dist", "losr_apply", "monotonicity_witness",
    "OptimizeOptions", "optimize_extension",
    "PR_CHAIN", "PR_CONSTRAINTS", "ns_constraints", "pr_box_exact", "propagate_pr_constraints",
    "RoundingResult", "cheat_sheet_rounding", "faithfulness_bound", "rounding_bound",
    "typicality_epsilon", "typicality_schedule",
]
