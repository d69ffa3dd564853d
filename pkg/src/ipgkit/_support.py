"""Support-enumeration machinery shared by the sampled solver and the
brute-force enumerator: exact integer-scaled payoff tables for two-player
games, the support ordering, and the per-support feasibility system.

Feasibility of a support pair is decided by a float simplex solve and then
re-derived exactly: the tight equality system is square, so a rational
Gaussian solve recovers exact probabilities which are verified against every
inequality before a profile is accepted.
"""

import itertools
from fractions import Fraction

import numpy as np

from .game import GameInstance, MixedProfile, MixedStrategy
from .kernel import INFEASIBLE, LinearProgram, solve_lp
from .game import LinearConstraint
from .rational import common_denominator

_INT64_SAFE = 2**62


def payoff_matrices_2p(game: GameInstance, strategies0, strategies1):
    """Exact payoff tables for both players over explicit strategy lists.

    Returns (P0, P1, scale0, scale1): integer numpy matrices with
    P[i, j] / scale equal to the exact payoff when player 0 plays
    strategies0[i] against strategies1[j].
    """
    if game.num_players != 2:
        raise ValueError("payoff tables are built for two-player games only")
    x0 = np.array(strategies0, dtype=np.int64).reshape(len(strategies0), game.num_vars(0))
    x1 = np.array(strategies1, dtype=np.int64).reshape(len(strategies1), game.num_vars(1))
    out = []
    scales = []
    for player, own, opp in ((0, x0, x1), (1, x1, x0)):
        payoff = game.payoff(player)
        opp_index = 1 - player
        evec = dict(payoff.opp_linear).get(opp_index)
        qmat = dict(payoff.bilinear).get(opp_index)
        entries = [payoff.constant, *payoff.own_linear]
        if evec:
            entries.extend(evec)
        if qmat:
            entries.extend(v for row in qmat for v in row)
        scale = common_denominator(entries)
        bound = scale * sum(abs(v) for v in entries)
        dtype = np.int64 if bound < _INT64_SAFE else object
        const = int(payoff.constant * scale)
        c = np.array([int(v * scale) for v in payoff.own_linear], dtype=dtype)
        table = np.full((own.shape[0], opp.shape[0]), const, dtype=dtype)
        table = table + np.dot(own.astype(dtype), c)[:, None]
        if evec:
            e = np.array([int(v * scale) for v in evec], dtype=dtype)
            table = table + np.dot(opp.astype(dtype), e)[None, :]
        if qmat:
            q = np.array([[int(v * scale) for v in row] for row in qmat], dtype=dtype)
            table = table + np.dot(np.dot(own.astype(dtype), q), opp.astype(dtype).T)
        if player == 1:
            table = table.T  # store as (player 0 strategy) x (player 1 strategy)
        out.append(table)
        scales.append(Fraction(scale))
    return out[0], out[1], scales[0], scales[1]


def support_pairs(count0: int, count1: int):
    """All support index pairs: growing total size, then growing imbalance,
    then lexicographic."""
    size_pairs = [
        (a, b)
        for a in range(1, count0 + 1)
        for b in range(1, count1 + 1)
    ]
    size_pairs.sort(key=lambda ab: (ab[0] + ab[1], abs(ab[0] - ab[1]), ab[0]))
    for a, b in size_pairs:
        for sup0 in itertools.combinations(range(count0), a):
            for sup1 in itertools.combinations(range(count1), b):
                yield sup0, sup1


def _solve_square_fraction(a, b):
    """Gauss-Jordan over Fractions; None when the matrix is singular."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _conditionally_dominated(table, support_rows, opp_cols):
    """True if some support row is strictly beaten everywhere on opp_cols."""
    sub = table[:, opp_cols]
    for s in support_rows:
        own = sub[s]
        for r in range(table.shape[0]):
            if r == s:
                continue
            if np.all(sub[r] > own):
                return True
    return False


def is_pure_cell_equilibrium(p0, p1, i, j):
    """Best-response check of the single cell (i, j) against full columns."""
    return bool(p0[i, j] == p0[:, j].max() and p1[i, j] == p1[i, :].max())


def solve_support_pair(p0, p1, scale0, scale1, strategies0, strategies1, sup0, sup1):
    """Solve the best-response feasibility system for one support pair.

    Returns (MixedProfile, exact expected values) or None. Probabilities are
    exact whenever the tight system is nonsingular; a degenerate system falls
    back to the float solution with 1e-9 verification.
    """
    a, b = len(sup0), len(sup1)
    if a == 1 and b == 1:
        i, j = sup0[0], sup1[0]
        if not is_pure_cell_equilibrium(p0, p1, i, j):
            return None
        profile = MixedProfile(
            (
                MixedStrategy.point_mass(strategies0[i]),
                MixedStrategy.point_mass(strategies1[j]),
            )
        )
        values = (Fraction(int(p0[i, j])) / scale0, Fraction(int(p1[i, j])) / scale1)
        return profile, values

    if _conditionally_dominated(p0, sup0, list(sup1)):
        return None
    if _conditionally_dominated(p1.T, sup1, list(sup0)):
        return None

    m0, m1 = p0.shape
    # Variables: probs over sup0, probs over sup1, v0, v1 (in scaled units).
    nvar = a + b + 2
    iv0, iv1 = a + b, a + b + 1
    rows = []

    def row(entries, sense, rhs):
        coeffs = [Fraction(0)] * nvar
        for idx, value in entries:
            coeffs[idx] = Fraction(value)
        rows.append(LinearConstraint(tuple(coeffs), sense, Fraction(rhs)))

    row([(k, 1) for k in range(a)], "=", 1)
    row([(a + k, 1) for k in range(b)], "=", 1)
    # The tight rows double as the square refinement system.
    eq_sum0 = [Fraction(1)] * a + [Fraction(0)] * (nvar - a)
    eq_sum1 = [Fraction(0)] * a + [Fraction(1)] * b + [Fraction(0), Fraction(0)]
    equalities = [(eq_sum0, Fraction(1)), (eq_sum1, Fraction(1))]

    for i in range(m0):
        entries = [(a + k, int(p0[i, j])) for k, j in enumerate(sup1)]
        entries.append((iv0, -1))
        if i in sup0:
            row(entries, "=", 0)
            coeffs = [Fraction(0)] * nvar
            for idx, value in entries:
                coeffs[idx] = Fraction(value)
            equalities.append((coeffs, Fraction(0)))
        else:
            row(entries, "<=", 0)
    for j in range(m1):
        entries = [(k, int(p1[i, j])) for k, i in enumerate(sup0)]
        entries.append((iv1, -1))
        if j in sup1:
            row(entries, "=", 0)
            coeffs = [Fraction(0)] * nvar
            for idx, value in entries:
                coeffs[idx] = Fraction(value)
            equalities.append((coeffs, Fraction(0)))
        else:
            row(entries, "<=", 0)

    big = Fraction(int(max(np.abs(p0).max(), np.abs(p1).max())) + 1)
    bounds = [(Fraction(0), Fraction(1))] * (a + b) + [(-big, big)] * 2
    lp = LinearProgram((0,) * nvar, "max", tuple(rows), tuple(bounds))
    res = solve_lp(lp)
    if res.status == INFEASIBLE:
        return None

    # Exact refinement: square tight system (a + b + 2 equations/unknowns).
    solution = None
    if len(equalities) == nvar:
        exact = _solve_square_fraction([e[0] for e in equalities], [e[1] for e in equalities])
        if exact is not None and all(con.holds(exact) for con in rows):
            solution = exact
    if solution is None:
        approx = [Fraction(v).limit_denominator(10**12) for v in res.point]
        ok = all(v >= -Fraction(1, 10**9) for v in approx[: a + b])
        for con in rows:
            lhs = sum(c * v for c, v in zip(con.coeffs, approx))
            slack = con.rhs - lhs
            if con.sense == "=" and abs(slack) > Fraction(1, 10**9):
                ok = False
            if con.sense == "<=" and slack < -Fraction(1, 10**9):
                ok = False
        if not ok:
            return None
        solution = [max(v, Fraction(0)) for v in approx]
        total0 = sum(solution[:a]) or Fraction(1)
        total1 = sum(solution[a : a + b]) or Fraction(1)
        solution[:a] = [v / total0 for v in solution[:a]]
        solution[a : a + b] = [v / total1 for v in solution[a : a + b]]

    probs0 = solution[:a]
    probs1 = solution[a : a + b]
    support0 = [strategies0[i] for i in sup0]
    support1 = [strategies1[j] for j in sup1]
    # Shrink zero-probability entries out of the support.
    keep0 = [(s, p) for s, p in zip(support0, probs0) if p > 0]
    keep1 = [(s, p) for s, p in zip(support1, probs1) if p > 0]
    if not keep0 or not keep1:
        return None
    profile = MixedProfile(
        (
            MixedStrategy(tuple(s for s, _ in keep0), tuple(p for _, p in keep0)),
            MixedStrategy(tuple(s for s, _ in keep1), tuple(p for _, p in keep1)),
        )
    )
    values = (solution[iv0] / scale0, solution[iv1] / scale1)
    return profile, values


def profiles_match(a: MixedProfile, b: MixedProfile, tol=Fraction(1, 10**9)) -> bool:
    """Equality of two 2-player profiles up to `tol` on probabilities."""
    for sa, sb in zip(a.strategies, b.strategies):
        da = dict(zip(sa.support, sa.probs))
        db = dict(zip(sb.support, sb.probs))
        keys = set(da) | set(db)
        for k in keys:
            if abs(da.get(k, Fraction(0)) - db.get(k, Fraction(0))) > tol:
                return False
    return True
