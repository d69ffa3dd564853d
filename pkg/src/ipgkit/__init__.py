"""Equilibrium toolkit for integer programming games with bilinear payoffs
over binary strategy sets: exact game model, in-house LP/MILP/knapsack
kernel, improvement oracle, sampled-generation and cutting-plane solvers,
a critical-node defender-attacker model, and brute-force verification."""

from .cng import (
    CngInstance,
    GeneratorProfile,
    McnpResult,
    generate_instances,
    price_of_stability,
    solve_mcnp,
    to_game_instance,
)
from .game import (
    BinarizedInteger,
    GameInstance,
    LinearConstraint,
    MixedProfile,
    MixedStrategy,
    PayoffSpec,
    PureProfile,
    StrategySet,
    binarize_bounded_integer,
    evaluate_mixed,
    evaluate_pure,
    is_feasible,
)
from .kernel import (
    KnapsackProblem,
    KnapsackSolution,
    LinearProgram,
    LpSolution,
    MilpProblem,
    MilpSolution,
    linearize_products,
    solve_knapsack,
    solve_lp,
    solve_milp,
)
from .oracle import Deviation, OracleVerdict, best_response, epsilon_of, improve
from .sgm import SampledGame, SgmResult, initialize_sample, play_sampled, solve_sgm
from .verify import (
    ApproximationReport,
    EquilibriumSet,
    check_approximation_scenarios,
    enumerate_mixed_ne_2p,
    enumerate_pure_ne,
    equilibrium_set,
    feasible_strategies,
)
from .zero_regrets import (
    EquilibriumCut,
    SelectionFunction,
    ZeroRegretsResult,
    build_master_milp,
    make_cut,
    solve_zero_regrets,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximationReport",
    "BinarizedInteger",
    "CngInstance",
    "Deviation",
    "EquilibriumCut",
    "EquilibriumSet",
    "GameInstance",
    "GeneratorProfile",
    "KnapsackProblem",
    "KnapsackSolution",
    "LinearConstraint",
    "LinearProgram",
    "LpSolution",
    "McnpResult",
    "MilpProblem",
    "MilpSolution",
    "MixedProfile",
    "MixedStrategy",
    "OracleVerdict",
    "PayoffSpec",
    "PureProfile",
    "SampledGame",
    "SelectionFunction",
    "SgmResult",
    "StrategySet",
    "ZeroRegretsResult",
    "best_response",
    "binarize_bounded_integer",
    "build_master_milp",
    "check_approximation_scenarios",
    "enumerate_mixed_ne_2p",
    "enumerate_pure_ne",
    "epsilon_of",
    "equilibrium_set",
    "evaluate_mixed",
    "evaluate_pure",
    "feasible_strategies",
    "generate_instances",
    "improve",
    "initialize_sample",
    "is_feasible",
    "linearize_products",
    "make_cut",
    "play_sampled",
    "price_of_stability",
    "solve_knapsack",
    "solve_lp",
    "solve_mcnp",
    "solve_milp",
    "solve_sgm",
    "solve_zero_regrets",
    "to_game_instance",
]
