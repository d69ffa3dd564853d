"""Improvement oracle: best responses, verdicts, epsilon values."""

import itertools
import random
from fractions import Fraction

import pytest

from ipgkit.errors import InfeasibleStrategyError, MembershipError
from ipgkit.game import (
    GameInstance,
    LinearConstraint,
    MixedProfile,
    MixedStrategy,
    PayoffSpec,
    PureProfile,
    StrategySet,
    evaluate_pure,
    is_feasible,
)
from ipgkit.oracle import best_response, epsilon_of, improve

from conftest import random_small_game

PURE_NE_A = PureProfile(((0, 1), (1, 0)))
PURE_NE_B = PureProfile(((1, 0), (0, 1)))
ZEROS = PureProfile(((0, 0), (0, 0)))


def knapsack_mixed_ne():
    return MixedProfile(
        (
            MixedStrategy(((1, 0), (0, 1)), (Fraction(2, 9), Fraction(7, 9))),
            MixedStrategy(((1, 0), (0, 1)), (Fraction(2, 5), Fraction(3, 5))),
        )
    )


def all_strategies(game, player):
    n = game.num_vars(player)
    sset = game.strategy_set(player)
    return [s for s in itertools.product((0, 1), repeat=n) if is_feasible(sset, s)]


class TestBestResponse:
    def test_vs_pure_opponent(self, knapsack_game):
        opponents = PureProfile(((0, 0), (1, 0)))
        strategy, value = best_response(knapsack_game, 0, opponents)
        assert strategy == (0, 1)
        assert value == 2

    def test_vs_mixed_opponent_hits_the_indifference_value(self, knapsack_game):
        profile = knapsack_mixed_ne()
        strategy, value = best_response(knapsack_game, 1, profile)
        assert value == Fraction(17, 9)
        assert strategy in {(1, 0), (0, 1)}

    def test_forced_all_zeros(self):
        game = GameInstance(
            (
                (
                    StrategySet(2, (LinearConstraint((1, 1), "<=", 0),)),
                    PayoffSpec(constant=4, own_linear=(9, 9)),
                ),
                (StrategySet(1), PayoffSpec(own_linear=(1,))),
            )
        )
        strategy, value = best_response(game, 0, PureProfile(((0, 0), (0,))))
        assert strategy == (0, 0)
        assert value == 4

    def test_empty_strategy_set_raises(self):
        game = GameInstance(
            (
                (
                    StrategySet(1, (LinearConstraint((1,), ">=", 2),)),
                    PayoffSpec(own_linear=(1,)),
                ),
                (StrategySet(1), PayoffSpec(own_linear=(1,))),
            )
        )
        with pytest.raises(InfeasibleStrategyError):
            best_response(game, 0, PureProfile(((0,), (0,))))

    def test_dominates_any_feasible_strategy(self):
        rng = random.Random(11)
        for _ in range(40):
            game = random_small_game(rng)
            profile = PureProfile(
                tuple(
                    tuple(rng.randint(0, 1) for _ in range(game.num_vars(j)))
                    for j in range(game.num_players)
                )
            )
            for i in range(game.num_players):
                feasible = all_strategies(game, i)
                if not feasible:
                    continue
                _, value = best_response(game, i, profile)
                for s in feasible:
                    alt = list(profile.strategies)
                    alt[i] = s
                    assert value >= evaluate_pure(game, PureProfile(tuple(alt)), i)


class TestImprove:
    def test_pure_equilibrium_certified(self, knapsack_game):
        verdict = improve(knapsack_game, PURE_NE_A)
        assert verdict.is_equilibrium
        assert verdict.deviations == ()
        assert verdict.worst_violation == 0

    def test_zero_profile_rejected_with_both_deviations(self, knapsack_game):
        verdict = improve(knapsack_game, ZEROS)
        assert not verdict.is_equilibrium
        found = {(d.player, d.strategy, d.improvement) for d in verdict.deviations}
        assert (0, (0, 1), Fraction(2)) in found
        assert (1, (0, 1), Fraction(5)) in found

    def test_mixed_equilibrium_certified(self, knapsack_game):
        verdict = improve(knapsack_game, knapsack_mixed_ne())
        assert verdict.is_equilibrium
        assert verdict.worst_violation == 0

    def test_infeasible_strategy_flagged(self, knapsack_game):
        verdict = improve(knapsack_game, PureProfile(((1, 1), (0, 0))))
        assert not verdict.is_equilibrium
        assert verdict.infeasible_players == (0,)


class TestEpsilon:
    def test_equilibria_have_zero_epsilon(self, knapsack_game):
        assert epsilon_of(knapsack_game, PURE_NE_A) == 0
        assert epsilon_of(knapsack_game, PURE_NE_B) == 0
        assert epsilon_of(knapsack_game, knapsack_mixed_ne()) == 0

    def test_zero_profile(self, knapsack_game):
        assert epsilon_of(knapsack_game, ZEROS) == 5

    def test_second_best_joint_profile(self, knapsack_game):
        assert epsilon_of(knapsack_game, PureProfile(((0, 1), (0, 1)))) == 2

    def test_undefined_for_infeasible_profiles(self, knapsack_game):
        with pytest.raises(MembershipError):
            epsilon_of(knapsack_game, PureProfile(((1, 1), (0, 0))))

    def test_invariant_under_player_relabeling(self, knapsack_game):
        # Swap the two players (remapping opponent indices) and compare.
        (s0, p0), (s1, p1) = knapsack_game.players

        def remap(payoff):
            return PayoffSpec(
                payoff.constant,
                payoff.own_linear,
                {1 - j: v for j, v in payoff.opp_linear},
                {1 - j: m for j, m in payoff.bilinear},
            )

        swapped = GameInstance(((s1, remap(p1)), (s0, remap(p0))))
        for a, b in itertools.product([(0, 0), (0, 1), (1, 0)], repeat=2):
            profile = PureProfile((a, b))
            mirrored = PureProfile((b, a))
            assert epsilon_of(knapsack_game, profile) == epsilon_of(swapped, mirrored)


class TestOpponentLinearIrrelevance:
    def test_zeroing_changes_neither_argmax_nor_verdict(self):
        rng = random.Random(23)
        for _ in range(30):
            game = random_small_game(rng)
            stripped = GameInstance(
                tuple(
                    (sset, PayoffSpec(p.constant, p.own_linear, (), p.bilinear))
                    for sset, p in game.players
                ),
                tol=game.tol,
            )
            profile = PureProfile(
                tuple(
                    tuple(rng.randint(0, 1) for _ in range(game.num_vars(j)))
                    for j in range(game.num_players)
                )
            )
            for i in range(game.num_players):
                feasible = all_strategies(game, i)
                if not feasible:
                    break

                def argmax_set(g):
                    values = {}
                    for s in feasible:
                        alt = list(profile.strategies)
                        alt[i] = s
                        values[s] = evaluate_pure(g, PureProfile(tuple(alt)), i)
                    top = max(values.values())
                    return {s for s, v in values.items() if v == top}

                assert argmax_set(game) == argmax_set(stripped)
            else:
                feasible_profile = all(
                    is_feasible(game.strategy_set(j), profile.strategies[j])
                    for j in range(game.num_players)
                )
                if feasible_profile:
                    assert (
                        improve(game, profile).is_equilibrium
                        == improve(stripped, profile).is_equilibrium
                    )
