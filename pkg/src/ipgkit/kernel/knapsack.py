"""Exact 0-1 knapsack with an optional lexicographic secondary objective.

The table runs over integer capacities. Profits are exact rationals; when
they scale to machine integers the table is vectorized, otherwise the same
recursion runs on Fraction pairs. An item enters the solution only when it
strictly improves the (primary, secondary) pair, so zero-profit items are
left out unless the secondary objective wants them.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DimensionError, TableCapacityError
from ..rational import as_fraction_vector, common_denominator

DEFAULT_CELL_CAP = 20_000_000

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class KnapsackProblem:
    weights: tuple
    capacity: int
    primary_profit: tuple
    secondary_profit: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "capacity", int(self.capacity))
        object.__setattr__(
            self, "primary_profit", as_fraction_vector(self.primary_profit)
        )
        if self.secondary_profit is not None:
            object.__setattr__(
                self, "secondary_profit", as_fraction_vector(self.secondary_profit)
            )
        if any(w < 0 for w in self.weights):
            raise ValueError("negative item weight")
        if self.capacity < 0:
            raise ValueError("negative capacity")
        n = len(self.weights)
        if len(self.primary_profit) != n:
            raise DimensionError("primary profit length differs from weights")
        if self.secondary_profit is not None and len(self.secondary_profit) != n:
            raise DimensionError("secondary profit length differs from weights")


@dataclass(frozen=True)
class KnapsackSolution:
    selection: tuple
    primary_value: Fraction
    secondary_value: Fraction


def _scaled_ints(profits):
    scale = common_denominator(profits)
    ints = [int(p * scale) for p in profits]
    if sum(abs(v) for v in ints) >= _INT64_SAFE:
        return None
    return ints


def _solve_int64(weights, capacity, prim, seco):
    n = len(weights)
    dp_p = np.zeros(capacity + 1, dtype=np.int64)
    dp_s = np.zeros(capacity + 1, dtype=np.int64)
    take = np.zeros((n, capacity + 1), dtype=bool)
    for i in range(n):
        w = weights[i]
        if w > capacity:
            continue
        cand_p = dp_p[: capacity + 1 - w] + prim[i]
        cand_s = dp_s[: capacity + 1 - w] + seco[i]
        cur_p = dp_p[w:]
        cur_s = dp_s[w:]
        better = (cand_p > cur_p) | ((cand_p == cur_p) & (cand_s > cur_s))
        dp_p[w:] = np.where(better, cand_p, cur_p)
        dp_s[w:] = np.where(better, cand_s, cur_s)
        take[i, w:] = better
    return take


def _solve_fraction(weights, capacity, prim, seco):
    n = len(weights)
    dp = [(Fraction(0), Fraction(0))] * (capacity + 1)
    take = [[False] * (capacity + 1) for _ in range(n)]
    for i in range(n):
        w = weights[i]
        if w > capacity:
            continue
        new = dp[:]
        row = take[i]
        for c in range(w, capacity + 1):
            cand = (dp[c - w][0] + prim[i], dp[c - w][1] + seco[i])
            if cand > dp[c]:
                new[c] = cand
                row[c] = True
        dp = new
    return take


def solve_knapsack(problem: KnapsackProblem, cell_cap: int = DEFAULT_CELL_CAP) -> KnapsackSolution:
    """Maximize primary profit subject to the weight budget; among primary
    optima, maximize the secondary profit."""
    n = len(problem.weights)
    capacity = problem.capacity
    if n * (capacity + 1) > cell_cap:
        raise TableCapacityError(
            f"knapsack table of {n} x {capacity + 1} cells exceeds the cap of {cell_cap}"
        )
    seco = problem.secondary_profit or tuple(Fraction(0) for _ in range(n))

    prim_ints = _scaled_ints(problem.primary_profit) if n else []
    seco_ints = _scaled_ints(seco) if n else []
    if prim_ints is not None and seco_ints is not None:
        take = _solve_int64(problem.weights, capacity, prim_ints, seco_ints)
    else:
        take = _solve_fraction(problem.weights, capacity, problem.primary_profit, seco)

    selection = [0] * n
    c = capacity
    for i in range(n - 1, -1, -1):
        if take[i][c]:
            selection[i] = 1
            c -= problem.weights[i]
    primary = sum(p for p, s in zip(problem.primary_profit, selection) if s)
    secondary = sum(p for p, s in zip(seco, selection) if s)
    return KnapsackSolution(
        tuple(selection), Fraction(primary), Fraction(secondary)
    )
