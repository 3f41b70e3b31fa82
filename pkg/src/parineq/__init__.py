"""Parametric Gini-type inequality indices.

``G_p`` uses a logarithmic pair kernel (p > 1) and ``H_q`` the gap between
power means of orders q and -q (q > 0); both tend to the Gini coefficient as
the parameter grows. Order-m versions tend to the m-th Gini index.
"""

from .errors import BudgetExceededError, ConvergenceError, DataError, DomainError
from .measures import (
    ConvergenceCurve,
    Estimate,
    IndexSpec,
    convergence_curve,
    estimate_index,
    estimate_with_ci,
    pair_estimate,
    population_value,
    sorted_gini,
)
from .rng import DistSpec, RngState, rng_new, split
from .ustat import Exact, Incomplete, Sample, XiEstimates, u_statistic, xi_components

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ConvergenceCurve",
    "ConvergenceError",
    "DataError",
    "DistSpec",
    "DomainError",
    "Estimate",
    "Exact",
    "Incomplete",
    "IndexSpec",
    "RngState",
    "Sample",
    "XiEstimates",
    "convergence_curve",
    "estimate_index",
    "estimate_with_ci",
    "pair_estimate",
    "population_value",
    "rng_new",
    "sorted_gini",
    "split",
    "u_statistic",
    "xi_components",
]
