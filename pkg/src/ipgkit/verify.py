"""Brute-force ground truth: exhaustive pure-equilibrium enumeration,
complete two-player mixed enumeration by supports, and the bounded
approximation-hierarchy scenario.

Everything here is an oracle for the faster solvers, so results are exact
and deterministic (profiles come back in lexicographic order).
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._support import (
    payoff_matrices_2p,
    profiles_match,
    solve_support_pair,
    support_pairs,
)
from .errors import EnumerationCapError
from .game import (
    GameInstance,
    LinearConstraint,
    PayoffSpec,
    PureProfile,
    StrategySet,
    binarize_bounded_integer,
    evaluate_pure,
)
from .oracle import improve
from .rational import common_denominator

_CHUNK = 1 << 16


def _feasible_matrix(strategy_set: StrategySet, max_vars: int) -> np.ndarray:
    """All feasible binary vectors as rows, in lexicographic order."""
    n = strategy_set.num_vars
    if n > max_vars:
        raise EnumerationCapError(
            f"{n} variables exceed the enumeration cap of {max_vars}"
        )
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    scaled = []
    for con in strategy_set.constraints:
        scale = common_denominator((*con.coeffs, con.rhs))
        coeffs = [int(c * scale) for c in con.coeffs]
        big = sum(abs(c) for c in coeffs) + abs(int(con.rhs * scale))
        dtype = np.int64 if big < 2**62 else object
        scaled.append((np.array(coeffs, dtype=dtype), con.sense, int(con.rhs * scale)))
    rows = []
    for start in range(0, 1 << n, _CHUNK):
        stop = min(start + _CHUNK, 1 << n)
        codes = np.arange(start, stop, dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.int64)
        mask = np.ones(len(codes), dtype=bool)
        for coeffs, sense, rhs in scaled:
            lhs = np.dot(bits.astype(coeffs.dtype), coeffs)
            if sense == "<=":
                mask &= lhs <= rhs
            elif sense == ">=":
                mask &= lhs >= rhs
            else:
                mask &= lhs == rhs
        if mask.any():
            rows.append(bits[mask])
    if not rows:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(rows)


def feasible_strategies(strategy_set: StrategySet, max_vars: int = 22) -> list:
    return [tuple(int(v) for v in row) for row in _feasible_matrix(strategy_set, max_vars)]


def enumerate_pure_ne(game: GameInstance, max_joint_vars: int = 24) -> list:
    """All pure equilibria, exactly, in lexicographic profile order."""
    total = sum(game.num_vars(i) for i in range(game.num_players))
    if total > max_joint_vars:
        raise EnumerationCapError(
            f"{total} joint variables exceed the cap of {max_joint_vars}"
        )
    if game.num_players == 2:
        return _enumerate_pure_2p(game, max_joint_vars)
    return _enumerate_pure_general(game, max_joint_vars)


def _enumerate_pure_2p(game, max_joint_vars):
    m0 = _feasible_matrix(game.strategy_set(0), max_joint_vars)
    m1 = _feasible_matrix(game.strategy_set(1), max_joint_vars)
    if not len(m0) or not len(m1):
        return []
    p0, p1, _, _ = payoff_matrices_2p(game, m0, m1)
    stable = (p0 == p0.max(axis=0)[None, :]) & (p1 == p1.max(axis=1)[:, None])
    out = []
    for i, j in np.argwhere(stable):
        out.append(
            PureProfile(
                (
                    tuple(int(v) for v in m0[i]),
                    tuple(int(v) for v in m1[j]),
                )
            )
        )
    return out


def _enumerate_pure_general(game, max_joint_vars):
    feas = [
        feasible_strategies(game.strategy_set(i), max_joint_vars)
        for i in range(game.num_players)
    ]
    if any(not f for f in feas):
        return []
    best_cache = {}
    out = []
    for combo in itertools.product(*feas):
        stable = True
        for i in range(game.num_players):
            others = combo[:i] + combo[i + 1 :]
            key = (i, others)
            best = best_cache.get(key)
            if best is None:
                best = max(
                    evaluate_pure(
                        game, PureProfile(combo[:i] + (s,) + combo[i + 1 :]), i
                    )
                    for s in feas[i]
                )
                best_cache[key] = best
            if evaluate_pure(game, PureProfile(combo), i) < best:
                stable = False
                break
        if stable:
            out.append(PureProfile(combo))
    return out


def enumerate_mixed_ne_2p(game: GameInstance, max_strategies: int = 12) -> list:
    """All mixed equilibria of a 2-player game by support enumeration.

    Pure equilibria appear as singleton supports. Solutions are deduplicated
    at 1e-9 on probability vectors after zero-probability support entries
    are shrunk away.
    """
    if game.num_players != 2:
        raise ValueError("mixed enumeration handles two-player games only")
    m0 = _feasible_matrix(game.strategy_set(0), 22)
    m1 = _feasible_matrix(game.strategy_set(1), 22)
    if len(m0) > max_strategies or len(m1) > max_strategies:
        raise EnumerationCapError(
            f"{len(m0)} x {len(m1)} feasible strategies exceed the cap of "
            f"{max_strategies} per player"
        )
    if not len(m0) or not len(m1):
        return []
    strategies0 = [tuple(int(v) for v in r) for r in m0]
    strategies1 = [tuple(int(v) for v in r) for r in m1]
    p0, p1, sc0, sc1 = payoff_matrices_2p(game, m0, m1)
    found = []
    for sup0, sup1 in support_pairs(len(strategies0), len(strategies1)):
        got = solve_support_pair(p0, p1, sc0, sc1, strategies0, strategies1, sup0, sup1)
        if got is None:
            continue
        profile, _ = got
        if not any(profiles_match(profile, seen) for seen in found):
            found.append(profile)
    return found


@dataclass(frozen=True)
class EquilibriumSet:
    """Enumerated equilibria plus whether the enumeration was exhaustive."""

    pure: tuple
    mixed: tuple
    complete: bool


def equilibrium_set(
    game: GameInstance, max_joint_vars: int = 24, max_strategies: int = 12
) -> EquilibriumSet:
    pure = tuple(enumerate_pure_ne(game, max_joint_vars))
    mixed = ()
    complete = False
    if game.num_players == 2:
        try:
            mixed = tuple(enumerate_mixed_ne_2p(game, max_strategies))
            complete = True
        except EnumerationCapError:
            complete = False
    return EquilibriumSet(pure, mixed, complete)


def _product_game(sign0, restrict_low):
    """Two players trading the product of their integer values.

    Player 0 holds an integer in [1, 4] (two bits); player 1 holds a sign in
    {-1, +1} (one bit, value 2b - 1). Player 0 maximizes sign0 * u * w,
    player 1 maximizes u * w. With `restrict_low`, player 0's value is
    additionally forced to be at least 2.
    """
    enc = binarize_bounded_integer(1, 4)
    constraints = list(enc.fragment().constraints)
    if restrict_low:
        constraints.append(LinearConstraint(enc.weights, ">=", 1))
    sset0 = StrategySet(enc.num_vars, tuple(constraints))
    s = Fraction(sign0)
    payoff0 = PayoffSpec(
        constant=-s,
        own_linear=tuple(-s * w for w in enc.weights),
        opp_linear={1: (2 * s,)},
        bilinear={1: tuple((2 * s * w,) for w in enc.weights)},
    )
    payoff1 = PayoffSpec(
        constant=-1,
        own_linear=(2,),
        opp_linear={0: tuple(-w for w in enc.weights)},
        bilinear={0: (tuple(2 * w for w in enc.weights),)},
    )
    game = GameInstance(
        ((sset0, payoff0), (StrategySet(1), payoff1)),
        name="product-game" + ("-restricted" if restrict_low else ""),
    )
    return game, enc


def _decode_product_profile(profile, enc):
    u = enc.decode(profile.strategies[0])
    w = 2 * profile.strategies[1][0] - 1
    return (u, w)


@dataclass(frozen=True)
class ApproximationReport:
    """Outcome of the restricted-strategy-set scenario.

    The restricted game shifts the first player's minimum up by one; its
    equilibrium is not an equilibrium of the unrestricted game.
    """

    original_equilibria: tuple
    restricted_equilibria: tuple
    restricted_profiles: tuple
    restricted_ne_fail_original: bool


def check_approximation_scenarios() -> ApproximationReport:
    """Build the bounded product game and its inner restriction, enumerate
    both, and check that the restriction's equilibrium does not survive."""
    original, enc = _product_game(-1, restrict_low=False)
    restricted, _ = _product_game(-1, restrict_low=True)
    orig_ne = enumerate_pure_ne(original)
    restr_ne = enumerate_pure_ne(restricted)
    fails = bool(restr_ne) and all(
        not improve(original, p).is_equilibrium for p in restr_ne
    )
    return ApproximationReport(
        original_equilibria=tuple(_decode_product_profile(p, enc) for p in orig_ne),
        restricted_equilibria=tuple(_decode_product_profile(p, enc) for p in restr_ne),
        restricted_profiles=tuple(restr_ne),
        restricted_ne_fail_original=fails,
    )
