"""Shared fixtures: small reference games used across the suite."""

import itertools
import random
from fractions import Fraction

import pytest

from ipgkit.game import (
    GameInstance,
    LinearConstraint,
    PayoffSpec,
    PureProfile,
    StrategySet,
    evaluate_pure,
)


def make_knapsack_game():
    """Two knapsack players with item-overlap penalties.

    Player 0: max x1 + 2*x2 - 2*x1*y1 - 3*x2*y2  s.t. 3*x1 + 4*x2 <= 5
    Player 1: max 3*y1 + 5*y2 - 5*y1*x1 - 4*y2*x2  s.t. 2*y1 + 5*y2 <= 5
    Feasible strategies for both: (0,0), (0,1), (1,0).
    """
    p0 = (
        StrategySet(2, (LinearConstraint((3, 4), "<=", 5),)),
        PayoffSpec(own_linear=(1, 2), bilinear={1: ((-2, 0), (0, -3))}),
    )
    p1 = (
        StrategySet(2, (LinearConstraint((2, 5), "<=", 5),)),
        PayoffSpec(own_linear=(3, 5), bilinear={0: ((-5, 0), (0, -4))}),
    )
    return GameInstance((p0, p1), name="knapsack-game")


def make_matching_pennies():
    """One binary variable per player; matcher wins +1, mismatcher -1.

    f0 = 1 - 2x - 2y + 4xy and f1 = -f0; no pure equilibrium exists.
    """
    p0 = (
        StrategySet(1),
        PayoffSpec(constant=1, own_linear=(-2,), opp_linear={1: (-2,)}, bilinear={1: ((4,),)}),
    )
    p1 = (
        StrategySet(1),
        PayoffSpec(constant=-1, own_linear=(2,), opp_linear={0: (2,)}, bilinear={0: ((-4,),)}),
    )
    return GameInstance((p0, p1), name="matching-pennies")


@pytest.fixture
def knapsack_game():
    return make_knapsack_game()


@pytest.fixture
def matching_pennies():
    return make_matching_pennies()


def random_small_game(rng: random.Random, max_vars: int = 3, n_players: int = 2) -> GameInstance:
    """Random dense game with small integer data, for property tests."""
    sizes = [rng.randint(1, max_vars) for _ in range(n_players)]
    players = []
    for i in range(n_players):
        cons = []
        for _ in range(rng.randint(0, 2)):
            coeffs = [rng.randint(-3, 4) for _ in range(sizes[i])]
            sense = rng.choice(["<=", ">="])
            rhs = rng.randint(-2, 6)
            cons.append(LinearConstraint(tuple(coeffs), sense, rhs))
        own = tuple(rng.randint(-5, 5) for _ in range(sizes[i]))
        opp = {}
        bil = {}
        for j in range(n_players):
            if j == i:
                continue
            if rng.random() < 0.7:
                opp[j] = tuple(rng.randint(-4, 4) for _ in range(sizes[j]))
            if rng.random() < 0.9:
                bil[j] = tuple(
                    tuple(rng.randint(-4, 4) for _ in range(sizes[j]))
                    for _ in range(sizes[i])
                )
        players.append(
            (StrategySet(sizes[i], tuple(cons)), PayoffSpec(0, own, opp, bil))
        )
    return GameInstance(tuple(players), name="random")


def mixed_value_by_outcome_enumeration(game, profile, player) -> Fraction:
    """Expected payoff summed over the product of supports, the slow way."""
    supports = [list(zip(m.support, m.probs)) for m in profile.strategies]
    total = Fraction(0)
    for combo in itertools.product(*supports):
        prob = Fraction(1)
        for _, p in combo:
            prob *= p
        if prob:
            pure = PureProfile(tuple(s for s, _ in combo))
            total += prob * evaluate_pure(game, pure, player)
    return total
