"""Acceptance gate: every release-blocking criterion, one pass/fail line each.

Run with `pytest -s tests/test_acceptance.py` to see the lines as they pass.
Instance sets are fixed-seed so every run checks the same ground truth.
"""

import random
import time
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from ipgkit.cng import (
    CngInstance,
    generate_instances,
    price_of_stability,
    solve_mcnp,
    to_game_instance,
)
from ipgkit.game import (
    GameInstance,
    LinearConstraint,
    PureProfile,
    evaluate_pure,
)
from ipgkit.kernel import (
    INFEASIBLE,
    OPTIMAL,
    KnapsackProblem,
    LinearProgram,
    MilpProblem,
    solve_knapsack,
    solve_milp,
)
from ipgkit.oracle import improve
from ipgkit.sgm import EQUILIBRIUM, solve_sgm
from ipgkit.verify import check_approximation_scenarios, enumerate_mixed_ne_2p, enumerate_pure_ne
from ipgkit.zero_regrets import NO_PURE_NE, OPTIMAL_PURE_NE, SelectionFunction, solve_zero_regrets

from conftest import make_knapsack_game

SIZE10_SEED = 2024
MIX_SEED = 7

TOL = Fraction(1, 10**6)


def report(criterion, ok, detail):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module", autouse=True)
def warm_kernel():
    # First solve pays the compile cost of the jitted pivot loop; keep it
    # out of the timed criteria.
    lp = LinearProgram((1,), "max", (), ((Fraction(0), Fraction(1)),))
    solve_milp(MilpProblem(lp, (0,)))


@lru_cache(maxsize=None)
def size10_instances():
    return tuple(generate_instances(10, 50, seed=SIZE10_SEED))


@lru_cache(maxsize=None)
def size10_games():
    return tuple(to_game_instance(c) for c in size10_instances())


@lru_cache(maxsize=None)
def mixed_size_instances():
    out = []
    for size in (10, 20, 25, 50):
        out.extend(generate_instances(size, 20, seed=MIX_SEED))
    return tuple(out)


@lru_cache(maxsize=None)
def zero_regrets_runs():
    """Cutting-plane runs against the enumeration oracle, shared by several
    criteria: (instance, game, enumerated pure NE, solver result)."""
    out = []
    for c, game in zip(size10_instances(), size10_games()):
        reference = enumerate_pure_ne(game)
        h = SelectionFunction.player_payoff(game, 0)
        result = solve_zero_regrets(game, h, max_iterations=5000)
        out.append((c, game, reference, result))
    return out


def test_criterion_1_knapsack_game_equilibria():
    started = time.perf_counter()
    game = make_knapsack_game()
    found = enumerate_mixed_ne_2p(game)
    elapsed = time.perf_counter() - started

    ok = len(found) == 3
    pure = sorted(p.to_pure().strategies for p in found if p.is_degenerate())
    ok = ok and pure == [((0, 1), (1, 0)), ((1, 0), (0, 1))]
    mixed = [p for p in found if not p.is_degenerate()]
    ok = ok and len(mixed) == 1
    if ok:
        expected = {
            0: {(1, 0): Fraction(2, 9), (0, 1): Fraction(7, 9)},
            1: {(1, 0): Fraction(2, 5), (0, 1): Fraction(3, 5)},
        }
        for player, want in expected.items():
            got = dict(zip(mixed[0][player].support, mixed[0][player].probs))
            ok = ok and set(got) == set(want)
            ok = ok and all(abs(got[k] - want[k]) <= Fraction(1, 10**9) for k in want)
    ok = ok and elapsed < 1.0
    report(1, ok, f"3 equilibria with exact probabilities in {elapsed:.3f}s")


def test_criterion_2_sgm_certified():
    started = time.perf_counter()
    game = make_knapsack_game()
    result = solve_sgm(game, max_iterations=500)
    ok = result.status == EQUILIBRIUM and result.iterations <= 3
    certified = 0
    for cng_game in size10_games():
        res = solve_sgm(cng_game, max_iterations=500)
        if res.status != EQUILIBRIUM:
            continue
        verdict = improve(cng_game, res.profile)
        if not (verdict.is_equilibrium and verdict.worst_violation <= TOL):
            ok = False
            break
        certified += 1
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < 10.0
    report(
        2,
        ok,
        f"{certified}/50 sampled-method equilibria certified, knapsack in "
        f"{result.iterations} iterations, {elapsed:.2f}s",
    )


def test_criterion_3_zero_regrets_soundness_and_optimality():
    started = time.perf_counter()
    mismatches = 0
    with_ne = 0
    for _, game, reference, result in zero_regrets_runs():
        if reference:
            with_ne += 1
            h = SelectionFunction.player_payoff(game, 0)
            target = max(h.value_at(p) for p in reference)
            if result.status != OPTIMAL_PURE_NE or result.h_value != target:
                mismatches += 1
            elif not improve(game, result.profile).is_equilibrium:
                mismatches += 1
        else:
            if result.status != NO_PURE_NE:
                mismatches += 1
    elapsed = time.perf_counter() - started
    ok = mismatches == 0 and elapsed < 60.0
    report(
        3,
        ok,
        f"{with_ne} instances with pure equilibria and {50 - with_ne} without, "
        f"{mismatches} mismatches, {elapsed:.2f}s",
    )


def test_criterion_4_cut_validity():
    cuts_checked = 0
    violations = 0
    for _, _, reference, result in zero_regrets_runs():
        for cut in result.cuts:
            for eq in reference:
                cuts_checked += 1
                if cut.slack_at(eq) < 0:
                    violations += 1
    ok = violations == 0
    report(4, ok, f"{cuts_checked} cut evaluations at enumerated equilibria, {violations} violations")


def four_case_payoffs(c, x, alpha):
    defender = Fraction(0)
    attacker = Fraction(0)
    for i in range(c.resource_count):
        if x[i] and alpha[i]:
            defender += c.eta * c.pd[i]
            attacker += (1 - c.eta) * c.pa[i]
        elif x[i]:
            defender += c.eps * c.pd[i]
        elif alpha[i]:
            defender += c.delta * c.pd[i]
            attacker += c.pa[i]
        else:
            defender += c.pd[i]
            attacker += -c.gamma * c.pa[i]
    return defender, attacker


def test_criterion_5_payoff_identity():
    rng = random.Random(515)
    checked = 0
    exact = True
    for c in mixed_size_instances():
        game = to_game_instance(c)
        n = c.resource_count
        for _ in range(1000):
            x = tuple(rng.randint(0, 1) for _ in range(n))
            alpha = tuple(rng.randint(0, 1) for _ in range(n))
            profile = PureProfile((x, alpha))
            want_d, want_a = four_case_payoffs(c, x, alpha)
            if evaluate_pure(game, profile, 0) != want_d or evaluate_pure(game, profile, 1) != want_a:
                exact = False
                break
            checked += 1
        if not exact:
            break
    report(5, exact, f"{checked} outcomes across 80 instances match the case table exactly")


def test_criterion_6_mcnp_and_pos():
    worked = CngInstance(
        pd=(10,),
        pa=(10,),
        d=(1,),
        a=(1,),
        defense_budget=1,
        attack_budget=1,
        delta=Fraction(1, 10),
        eta=Fraction(1, 2),
        eps=Fraction(4, 5),
        gamma=Fraction(1, 5),
    )
    res = solve_mcnp(worked)
    ok = res.leader_value == 5 and res.defense == (1,) and res.attack == (1,)
    ok = ok and price_of_stability(worked, (res.defense, res.attack)) == 2

    checked = 0
    for c in mixed_size_instances():
        if c.resource_count != 10:
            continue
        game = to_game_instance(c)
        mcnp = solve_mcnp(c)
        ok = ok and price_of_stability(c, (mcnp.defense, mcnp.attack)) >= 1
        h = SelectionFunction.player_payoff(game, 0)
        zr = solve_zero_regrets(game, h, max_iterations=5000)
        if zr.status == OPTIMAL_PURE_NE:
            ok = ok and price_of_stability(c, zr.profile.strategies) >= 1
        checked += 1
    report(
        6,
        ok,
        f"worked instance gives leader value 5 and ratio 2; ratios >= 1 on {checked} size-10 instances",
    )


def test_criterion_7_report_structure_and_pure_eq_crosscheck(tmp_path):
    import csv

    from ipgkit.cli.main import main
    from ipgkit.cli.runner import run_algorithm
    from ipgkit.cli.serialize import load_instance, payload_to_profile

    gen_dir = tmp_path / "instances"
    assert main(["gen-cng", "--size", "10", "--count", "5", "--seed", "99", "--out", str(gen_dir)]) == 0
    out_csv = tmp_path / "report.csv"
    code = main(
        [
            "bench",
            "--dir",
            str(gen_dir),
            "--algos",
            "zeror,mcnp,sgm",
            "--selection",
            "player:0",
            "--time-limit",
            "50",
            "--out",
            str(out_csv),
        ]
    )
    ok = code == 0
    rows_part, summary_part = out_csv.read_text().split("\n\n")
    rows = list(csv.DictReader(rows_part.splitlines()))
    summary = list(csv.DictReader(summary_part.splitlines()))
    ok = ok and len(rows) == 15
    ok = ok and set(rows[0]) == {"instance", "algo", "status", "epsilon", "time_s", "iterations", "pos"}
    ok = ok and {s["algo"] for s in summary} == {"zeror", "mcnp", "sgm"}
    ok = ok and all(
        set(s) == {"size", "algo", "n_eq", "n_pure_eq", "n_tl", "mean_time_s", "mean_iterations", "mean_pos"}
        for s in summary
    )

    # Whenever the cutting-plane solver reports a pure equilibrium, the
    # exhaustive enumeration contains that exact profile.
    confirmed = 0
    for path in sorted(gen_dir.glob("*.json")):
        doc = load_instance(path)
        record = run_algorithm(doc, "zeror", selection="player:0", time_limit=50.0)
        if record.status == "pureEq":
            profile = payload_to_profile(record.payload)
            members = {p.strategies for p in enumerate_pure_ne(doc.game)}
            ok = ok and profile.strategies in members
            confirmed += 1
    report(
        7,
        ok,
        f"report emits 15 rows plus aggregates; {confirmed} pure-equilibrium results "
        f"all appear in the enumeration",
    )


def best_knapsack_pair_by_enumeration(problem: KnapsackProblem):
    """Exact lexicographic optimum over all subsets, integer-scaled."""
    n = len(problem.weights)
    seco = problem.secondary_profit or (Fraction(0),) * n
    codes = np.arange(2**n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)) & 1
    loads = bits @ np.array(problem.weights, dtype=np.int64)
    bits = bits[loads <= problem.capacity]
    scale_p = int(np.lcm.reduce([p.denominator for p in problem.primary_profit] or [1]))
    scale_s = int(np.lcm.reduce([p.denominator for p in seco] or [1]))
    prim = bits @ np.array([int(p * scale_p) for p in problem.primary_profit], dtype=np.int64)
    secs = bits @ np.array([int(p * scale_s) for p in seco], dtype=np.int64)
    top = prim.max()
    best_sec = secs[prim == top].max()
    return Fraction(int(top), scale_p), Fraction(int(best_sec), scale_s)


def brute_force_binary_program(problem: MilpProblem):
    lp = problem.lp
    n = lp.num_vars
    codes = np.arange(2**n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)) & 1
    mask = np.ones(len(codes), dtype=bool)
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo > 0:
            mask &= bits[:, j] == 1
        if hi < 1:
            mask &= bits[:, j] == 0
    for con in lp.constraints:
        coeffs = np.array([float(c) for c in con.coeffs])
        lhs = bits @ coeffs
        r = float(con.rhs)
        if con.sense == "<=":
            mask &= lhs <= r + 1e-9
        elif con.sense == ">=":
            mask &= lhs >= r - 1e-9
        else:
            mask &= np.abs(lhs - r) <= 1e-9
    if not mask.any():
        return None
    values = bits[mask] @ np.array([float(c) for c in lp.objective])
    return (values.max() if lp.sense == "max" else values.min())


def test_criterion_8_kernel_oracles():
    started = time.perf_counter()
    rng = random.Random(88)
    milp_mismatch = 0
    for _ in range(200):
        n = rng.randint(1, 12)
        cons = []
        for _ in range(rng.randint(0, 6)):
            coeffs = tuple(rng.randint(-6, 6) for _ in range(n))
            sense = rng.choice(["<=", ">=", "="])
            if sense == "=":
                bits = [rng.randint(0, 1) for _ in range(n)]
                rhs = sum(c * b for c, b in zip(coeffs, bits))
            else:
                rhs = rng.randint(-8, 10)
            cons.append(LinearConstraint(coeffs, sense, rhs))
        obj = tuple(rng.randint(-9, 9) for _ in range(n))
        lp = LinearProgram(
            obj,
            rng.choice(["max", "min"]),
            tuple(cons),
            tuple((Fraction(0), Fraction(1)) for _ in range(n)),
        )
        problem = MilpProblem(lp, tuple(range(n)))
        res = solve_milp(problem)
        ref = brute_force_binary_program(problem)
        if ref is None:
            if res.status != INFEASIBLE:
                milp_mismatch += 1
        elif res.status != OPTIMAL or abs(float(res.value) - ref) > 1e-9:
            milp_mismatch += 1

    knap_mismatch = 0
    for _ in range(100):
        n = rng.randint(1, 15)
        weights = tuple(rng.randint(0, 20) for _ in range(n))
        capacity = rng.randint(0, 60)
        primary = tuple(Fraction(rng.randint(-8, 15), rng.choice((1, 1, 2, 3))) for _ in range(n))
        secondary = None
        if rng.random() < 0.5:
            secondary = tuple(Fraction(rng.randint(-5, 5)) for _ in range(n))
        problem = KnapsackProblem(weights, capacity, primary, secondary)
        res = solve_knapsack(problem)
        best = best_knapsack_pair_by_enumeration(problem)
        if (res.primary_value, res.secondary_value) != best:
            knap_mismatch += 1

    elapsed = time.perf_counter() - started
    ok = milp_mismatch == 0 and knap_mismatch == 0 and elapsed < 30.0
    report(
        8,
        ok,
        f"200 binary programs and 100 knapsacks match enumeration "
        f"({milp_mismatch}+{knap_mismatch} mismatches) in {elapsed:.2f}s",
    )


def test_criterion_9_approximation_scenario():
    result = check_approximation_scenarios()
    ok = result.original_equilibria == ((1, 1),)
    ok = ok and result.restricted_equilibria == ((2, 1),)
    ok = ok and result.restricted_ne_fail_original
    report(
        9,
        ok,
        "restricting the first player flips the equilibrium to one the full game rejects",
    )
