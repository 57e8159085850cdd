"""Network-friendly recommendation programs with diversity and fairness."""

from .builders import (FAIR_KINDS, FairnessSpec, build_diverse_lp,
                       build_fair_diverse_lp, build_fair_lp, build_nfr_lp)
from .convexity import relative_entropy_hessian, relative_entropy_hessian_minors
from .cuts import CutFamily, kl_log_cuts, make_cuts, xlogx
from .solution import (DiverseSolution, ValidationReport, fairness_metrics,
                       recover_policy, solve_and_recover, tangent_slack,
                       validate_solution, write_solution)

__all__ = [
    "FAIR_KINDS", "CutFamily", "DiverseSolution", "FairnessSpec", "ValidationReport",
    "build_diverse_lp", "build_fair_diverse_lp", "build_fair_lp", "build_nfr_lp",
    "fairness_metrics", "kl_log_cuts", "make_cuts", "recover_policy",
    "relative_entropy_hessian", "relative_entropy_hessian_minors",
    "solve_and_recover", "tangent_slack", "validate_solution", "write_solution", "xlogx",
]
