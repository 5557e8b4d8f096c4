"""Money-pump measures of departures from utility maximization in consumer demand data."""

__version__ = "0.1.0"

from .dataset import Dataset, ExpenditureMatrix, expenditure_matrix, load_dataset, load_fixture
from .graph import (
    Cycle,
    build_graph,
    check_cyclical_monotonicity,
    check_garp,
    enumerate_garp_violations,
)
from .indices import RationalityReport, a_tilde, ccei, full_report
from .lp import AfriatSolution, LinearProgram, simplex_solve, solve_afriat_lp
from .pump import PumpResult, els_average, scsd_max, tmp, tmp_bruteforce, tmp_constrained
from .utility import (
    PiecewiseLinearUtility,
    RationalizationCertificate,
    build_constrained_rationalizer,
    build_optimal_permutation_rationalizer,
    build_quasilinear_rationalizer,
    evaluate_utility,
    verify_quasilinear,
)

__all__ = [
    "AfriatSolution",
    "Cycle",
    "Dataset",
    "ExpenditureMatrix",
    "LinearProgram",
    "PiecewiseLinearUtility",
    "PumpResult",
    "RationalityReport",
    "RationalizationCertificate",
    "a_tilde",
    "build_constrained_rationalizer",
    "build_graph",
    "build_optimal_permutation_rationalizer",
    "build_quasilinear_rationalizer",
    "ccei",
    "check_cyclical_monotonicity",
    "check_garp",
    "els_average",
    "enumerate_garp_violations",
    "evaluate_utility",
    "expenditure_matrix",
    "full_report",
    "load_dataset",
    "load_fixture",
    "scsd_max",
    "simplex_solve",
    "solve_afriat_lp",
    "tmp",
    "tmp_bruteforce",
    "tmp_constrained",
    "verify_quasilinear",
]
