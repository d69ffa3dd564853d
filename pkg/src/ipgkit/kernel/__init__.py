"""In-house mathematical-programming kernel: LP, binary MILP, 0-1 knapsack."""

from .knapsack import KnapsackProblem, KnapsackSolution, solve_knapsack
from .lp import INFEASIBLE, OPTIMAL, LinearProgram, LpSolution, solve_lp
from .milp import MilpProblem, MilpSolution, linearize_products, solve_milp

__all__ = [
    "INFEASIBLE",
    "OPTIMAL",
    "KnapsackProblem",
    "KnapsackSolution",
    "LinearProgram",
    "LpSolution",
    "MilpProblem",
    "MilpSolution",
    "linearize_products",
    "solve_knapsack",
    "solve_lp",
    "solve_milp",
]
