"""College application portfolio optimization.

Maximize the expected utility of the best admission outcome across a set of
schools, subject to an application budget.  Unit-fee markets get an exact
O(hm) greedy with a nested solution family; general markets get branch and
bound, an exact pseudopolynomial DP, a (1 - eps) approximation scheme, and
a simulated-annealing heuristic.
"""

from .heterogeneous import (
    SaParams,
    SolveReport,
    branch_and_bound,
    dp_costs,
    fptas,
    lp_upper_bound,
    simulated_annealing,
)
from .homogeneous import Frontier, frontier, greedy_optimal, naive_portfolio
from .instances import (
    GeneratorConfig,
    KnapsackInstance,
    generate_market,
    knapsack_to_market,
    read_market,
    write_market,
)
from .market import (
    Market,
    MarketError,
    Portfolio,
    SolverRefusal,
    TrivialInstance,
    attendance_probs,
    brute_force,
    canonicalize,
    eliminate,
    valuate,
    valuate_variance_penalized,
)
from .solve import solve_document, solve_market, what_if

__version__ = "0.1.0"

__all__ = [
    "Market",
    "MarketError",
    "Portfolio",
    "SolverRefusal",
    "TrivialInstance",
    "Frontier",
    "SaParams",
    "SolveReport",
    "GeneratorConfig",
    "KnapsackInstance",
    "canonicalize",
    "attendance_probs",
    "valuate",
    "valuate_variance_penalized",
    "eliminate",
    "brute_force",
    "naive_portfolio",
    "greedy_optimal",
    "frontier",
    "lp_upper_bound",
    "branch_and_bound",
    "dp_costs",
    "fptas",
    "simulated_annealing",
    "generate_market",
    "knapsack_to_market",
    "read_market",
    "write_market",
    "solve_market",
    "solve_document",
    "what_if",
    "__version__",
]
