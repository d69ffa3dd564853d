"""Critical-node games: payoff expansion, bilevel solve, PoS, generation."""

import itertools
import random
from fractions import Fraction

import pytest

from ipgkit.cng import (
    CngInstance,
    GeneratorProfile,
    generate_instances,
    price_of_stability,
    solve_mcnp,
    to_game_instance,
)
from ipgkit.errors import EnumerationCapError
from ipgkit.game import PureProfile, evaluate_pure
from ipgkit.verify import enumerate_pure_ne


def one_resource_instance(gamma=Fraction(1, 5)):
    return CngInstance(
        pd=(10,),
        pa=(10,),
        d=(1,),
        a=(1,),
        defense_budget=1,
        attack_budget=1,
        delta=Fraction(1, 10),
        eta=Fraction(1, 2),
        eps=Fraction(4, 5),
        gamma=gamma,
    )


def four_case_defender(c, x, alpha):
    """Straight-line per-resource case table; the reference formula."""
    total = Fraction(0)
    for i in range(c.resource_count):
        if x[i] and alpha[i]:
            total += c.eta * c.pd[i]
        elif x[i]:
            total += c.eps * c.pd[i]
        elif alpha[i]:
            total += c.delta * c.pd[i]
        else:
            total += c.pd[i]
    return total


def four_case_attacker(c, x, alpha):
    total = Fraction(0)
    for i in range(c.resource_count):
        if x[i] and alpha[i]:
            total += (1 - c.eta) * c.pa[i]
        elif alpha[i]:
            total += c.pa[i]
        elif not x[i]:
            total += -c.gamma * c.pa[i]
    return total


class TestToGameInstance:
    def test_one_resource_outcome_table(self):
        game = to_game_instance(one_resource_instance())
        table = {}
        for x, alpha in itertools.product((0, 1), repeat=2):
            profile = PureProfile(((x,), (alpha,)))
            table[(x, alpha)] = (
                evaluate_pure(game, profile, 0),
                evaluate_pure(game, profile, 1),
            )
        assert table == {
            (0, 0): (10, -2),
            (0, 1): (1, 10),
            (1, 0): (8, 0),
            (1, 1): (5, 5),
        }

    def test_zero_gamma_idle_attacker_earns_nothing(self):
        c = one_resource_instance(gamma=Fraction(0))
        game = to_game_instance(c)
        for x in (0, 1):
            profile = PureProfile(((x,), (0,)))
            assert evaluate_pure(game, profile, 1) == 0

    def test_expansion_matches_case_table_on_all_outcomes(self):
        for c in generate_instances(4, 6, seed=5):
            game = to_game_instance(c)
            for x in itertools.product((0, 1), repeat=4):
                for alpha in itertools.product((0, 1), repeat=4):
                    profile = PureProfile((x, alpha))
                    assert evaluate_pure(game, profile, 0) == four_case_defender(c, x, alpha)
                    assert evaluate_pure(game, profile, 1) == four_case_attacker(c, x, alpha)

    def test_unique_equilibrium_of_the_worked_instance(self):
        game = to_game_instance(one_resource_instance())
        assert [p.strategies for p in enumerate_pure_ne(game)] == [((1,), (1,))]


class TestSolveMcnp:
    def test_worked_instance(self):
        res = solve_mcnp(one_resource_instance())
        assert res.defense == (1,)
        assert res.attack == (1,)
        assert res.leader_value == 5

    def test_zero_attack_budget_means_no_protection(self):
        c = CngInstance(
            pd=(10, 7),
            pa=(10, 7),
            d=(1, 1),
            a=(1, 1),
            defense_budget=2,
            attack_budget=0,
            delta=Fraction(1, 10),
            eta=Fraction(1, 2),
            eps=Fraction(4, 5),
            gamma=Fraction(1, 5),
        )
        res = solve_mcnp(c)
        assert res.defense == (0, 0)
        assert res.attack == (0, 0)
        assert res.leader_value == 17

    def test_zero_defense_budget(self):
        c = CngInstance(
            pd=(10,),
            pa=(10,),
            d=(2,),
            a=(1,),
            defense_budget=0,
            attack_budget=1,
            delta=Fraction(1, 10),
            eta=Fraction(1, 2),
            eps=Fraction(4, 5),
            gamma=Fraction(1, 5),
        )
        res = solve_mcnp(c)
        assert res.defense == (0,)
        assert res.leader_value == 1

    def test_matches_exhaustive_bilevel_enumeration(self):
        rng = random.Random(31)
        for c in generate_instances(5, 8, seed=9):
            game = to_game_instance(c)
            best = None
            for x in itertools.product((0, 1), repeat=5):
                if sum(w * v for w, v in zip(c.d, x)) > c.defense_budget:
                    continue
                replies = []
                top = None
                for alpha in itertools.product((0, 1), repeat=5):
                    if sum(w * v for w, v in zip(c.a, alpha)) > c.attack_budget:
                        continue
                    value = four_case_attacker(c, x, alpha)
                    if top is None or value > top:
                        top = value
                replies = [
                    alpha
                    for alpha in itertools.product((0, 1), repeat=5)
                    if sum(w * v for w, v in zip(c.a, alpha)) <= c.attack_budget
                    and four_case_attacker(c, x, alpha) == top
                ]
                # Optimistic follower: best reply for the defender.
                leader = max(four_case_defender(c, x, alpha) for alpha in replies)
                if best is None or leader > best:
                    best = leader
            res = solve_mcnp(c)
            assert res.leader_value == best

    def test_pessimistic_never_beats_optimistic(self):
        for c in generate_instances(6, 10, seed=77):
            opt = solve_mcnp(c, tie_break="optimistic")
            pess = solve_mcnp(c, tie_break="pessimistic")
            assert opt.leader_value >= pess.leader_value

    def test_resource_cap(self):
        c = one_resource_instance()
        with pytest.raises(EnumerationCapError):
            solve_mcnp(c, max_resources=0)


class TestPriceOfStability:
    def test_worked_instance(self):
        c = one_resource_instance()
        assert price_of_stability(c, ((1,), (1,))) == 2

    def test_best_outcome_has_ratio_one(self):
        c = one_resource_instance()
        assert price_of_stability(c, ((0,), (0,))) == 1

    def test_never_below_one(self):
        for c in generate_instances(5, 6, seed=13):
            rng = random.Random(c.name)
            for _ in range(5):
                x = [0] * 5
                alpha = [0] * 5
                for i in rng.sample(range(5), 2):
                    if c.d[i] <= c.defense_budget - sum(
                        w * v for w, v in zip(c.d, x)
                    ):
                        x[i] = 1
                for i in rng.sample(range(5), 2):
                    if c.a[i] <= c.attack_budget - sum(
                        w * v for w, v in zip(c.a, alpha)
                    ):
                        alpha[i] = 1
                assert price_of_stability(c, (tuple(x), tuple(alpha))) >= 1

    def test_budget_violation_rejected(self):
        c = one_resource_instance()
        with pytest.raises(ValueError):
            price_of_stability(c, ((1,), (1, 1)))


class TestGenerateInstances:
    def test_deterministic(self):
        a = generate_instances(10, 20, seed=1)
        b = generate_instances(10, 20, seed=1)
        assert a == b

    def test_prefix_stability(self):
        long = generate_instances(10, 20, seed=3)
        short = generate_instances(10, 5, seed=3)
        assert long[:5] == short

    def test_invariants_and_budget_caps(self):
        for c in generate_instances(10, 20, seed=2):
            assert c.resource_count == 10
            assert c.delta < c.eta < c.eps
            assert 0 <= c.gamma <= Fraction(3, 10)
            assert c.defense_budget <= sum(c.d)
            assert c.attack_budget <= sum(c.a)
            assert all(1 <= v <= 100 for v in c.pd + c.pa)
            assert all(1 <= v <= 25 for v in c.d + c.a)

    def test_custom_profile(self):
        profile = GeneratorProfile(criticality_range=(5, 5), cost_range=(2, 2))
        for c in generate_instances(3, 4, seed=11, profile=profile):
            assert set(c.pd) == {5}
            assert set(c.d) == {2}
