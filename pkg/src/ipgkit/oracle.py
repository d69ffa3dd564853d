"""Improvement oracle: membership and stability checks, best responses, and
equilibrium certification for pure and mixed profiles.

Stability comparisons run in exact rationals; the game tolerance enters only
as the acceptance slack, so a yes verdict is a machine-checkable certificate.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleStrategyError, MembershipError
from .game import (
    GameInstance,
    MixedProfile,
    PureProfile,
    evaluate_mixed,
    evaluate_pure,
    is_feasible,
    payoff_against_means,
)
from .kernel import (
    INFEASIBLE,
    KnapsackProblem,
    LinearProgram,
    MilpProblem,
    solve_knapsack,
    solve_milp,
)


@dataclass(frozen=True)
class Deviation:
    player: int
    strategy: tuple
    improvement: Fraction


@dataclass(frozen=True)
class OracleVerdict:
    """Yes/no answer with the profitable deviations found.

    `worst_violation` is the largest best-response improvement over the
    current payoff across players, floored at zero; a yes answer implies it
    does not exceed the game tolerance. Every violating player appears in
    `deviations`, not just the first one found.
    """

    is_equilibrium: bool
    deviations: tuple = ()
    worst_violation: Fraction = Fraction(0)
    infeasible_players: tuple = ()


def _single_knapsack(strategy_set):
    """Recognize a one-row knapsack with nonnegative integer data."""
    if len(strategy_set.constraints) != 1:
        return None
    con = strategy_set.constraints[0]
    if con.sense != "<=":
        return None
    if any(c.denominator != 1 or c < 0 for c in con.coeffs):
        return None
    if con.rhs.denominator != 1:
        return None
    return tuple(int(c) for c in con.coeffs), int(con.rhs)


def _opponent_means(game, player, profile):
    means = {}
    for j in range(game.num_players):
        if j == player:
            continue
        if isinstance(profile, PureProfile):
            means[j] = tuple(Fraction(v) for v in profile.strategies[j])
        else:
            means[j] = profile[j].mean()
    return means


def best_response(game: GameInstance, player: int, opponents) -> tuple:
    """Payoff-maximizing feasible strategy against fixed or mixed opponents.

    `opponents` is a full pure or mixed profile; the entry of `player` is
    ignored. Against mixed opponents the objective uses their mean vectors,
    which is exact for bilinear payoffs. Returns (strategy, exact value).
    """
    means = _opponent_means(game, player, opponents)
    obj, constant = payoff_against_means(game, player, means)
    sset = game.strategy_set(player)

    knap = _single_knapsack(sset)
    if knap is not None:
        weights, capacity = knap
        if capacity < 0:
            raise InfeasibleStrategyError(
                f"player {player}: empty strategy set (negative budget)"
            )
        res = solve_knapsack(KnapsackProblem(weights, capacity, obj))
        return res.selection, constant + res.primary_value

    lp = LinearProgram(
        obj,
        "max",
        sset.constraints,
        tuple((Fraction(0), Fraction(1)) for _ in range(sset.num_vars)),
    )
    res = solve_milp(MilpProblem(lp, tuple(range(sset.num_vars))))
    if res.status == INFEASIBLE:
        raise InfeasibleStrategyError(f"player {player}: empty strategy set")
    strategy = tuple(int(v) for v in res.point)
    return strategy, constant + res.value


def improve(game: GameInstance, profile) -> OracleVerdict:
    """Membership plus stability check of a pure or mixed profile.

    A yes verdict certifies a tolerance-approximate Nash equilibrium; a no
    verdict carries, for every violating player, a best response and the
    exact improvement it yields.
    """
    mixed = isinstance(profile, MixedProfile)
    infeasible = []
    for i in range(game.num_players):
        sset = game.strategy_set(i)
        own = profile[i].support if mixed else (profile.strategies[i],)
        if not all(is_feasible(sset, s) for s in own):
            infeasible.append(i)

    deviations = []
    worst = Fraction(0)
    for i in range(game.num_players):
        current = (
            evaluate_mixed(game, profile, i) if mixed else evaluate_pure(game, profile, i)
        )
        strategy, value = best_response(game, i, profile)
        gain = value - current
        if gain > worst:
            worst = gain
        if gain > game.tol:
            deviations.append(Deviation(i, strategy, gain))

    return OracleVerdict(
        is_equilibrium=not deviations and not infeasible,
        deviations=tuple(deviations),
        worst_violation=worst,
        infeasible_players=tuple(infeasible),
    )


def epsilon_of(game: GameInstance, profile) -> Fraction:
    """Smallest absolute slack for which the profile is an approximate
    equilibrium; undefined (an error) when membership fails."""
    verdict = improve(game, profile)
    if verdict.infeasible_players:
        raise MembershipError(
            f"players {verdict.infeasible_players} play infeasible strategies"
        )
    return verdict.worst_violation
