"""Branch and bound for binary programs on top of the simplex kernel.

Search is depth-first, diving into the child with the better LP bound;
branching picks the most fractional binary variable with ties to the lowest
index, so search trees are reproducible. Every incumbent is re-verified in
exact rational arithmetic before it is accepted.
"""

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DimensionError, NodeLimitError
from ..game import LinearConstraint
from .lp import (
    DEFAULT_PIVOT_CAP,
    INFEASIBLE,
    OPTIMAL,
    LinearProgram,
    LpSolution,
    PreparedLp,
    solve_lp,
)

INTEGRALITY_TOL = 1e-9
PRUNE_EPS = 1e-9
DEFAULT_NODE_LIMIT = 200_000


@dataclass(frozen=True)
class MilpProblem:
    lp: LinearProgram
    binary_indices: tuple

    def __post_init__(self):
        idx = tuple(sorted(set(int(j) for j in self.binary_indices)))
        object.__setattr__(self, "binary_indices", idx)
        n = self.lp.num_vars
        for j in idx:
            if not 0 <= j < n:
                raise DimensionError(f"binary index {j} out of range")
            lo, hi = self.lp.bounds[j]
            if lo < 0 or hi > 1:
                raise ValueError(f"binary variable {j} has bounds outside [0, 1]")


@dataclass(frozen=True)
class MilpSolution:
    status: str
    point: tuple | None = None
    value: Fraction | None = None
    nodes: int = 0
    bound_log: tuple | None = None


def linearize_products(pairs, num_vars: int):
    """McCormick rows for binary products.

    For each (j, k) pair a fresh variable z is appended after the existing
    `num_vars` columns with z <= x_j, z <= x_k, z >= x_j + x_k - 1; with
    binary x the only feasible z equals the product. Returns the pair -> z
    index map and the constraint rows over the extended variable space.
    """
    pairs = list(pairs)
    total = num_vars + len(pairs)
    z_index = {}
    constraints = []

    def row(entries, sense, rhs):
        coeffs = [Fraction(0)] * total
        for idx, c in entries:
            coeffs[idx] = Fraction(c)
        constraints.append(LinearConstraint(tuple(coeffs), sense, Fraction(rhs)))

    for t, (j, k) in enumerate(pairs):
        if not (0 <= j < num_vars and 0 <= k < num_vars) or j == k:
            raise ValueError(f"bad product pair ({j}, {k})")
        z = num_vars + t
        z_index[(j, k)] = z
        row([(z, 1), (j, -1)], "<=", 0)
        row([(z, 1), (k, -1)], "<=", 0)
        row([(z, 1), (j, -1), (k, -1)], ">=", -1)
    return z_index, constraints


def _float_row_structure(prepared):
    """Nonzero pattern of every constraint row of a PreparedLp, once."""
    rows = []
    for i in range(len(prepared.senses)):
        idx = np.flatnonzero(prepared.matrix[i])
        if idx.size:
            rows.append(
                (idx, prepared.matrix[i, idx].copy(), prepared.senses[i], float(prepared.rhs[i]))
            )
    return rows


def _float_propagation(rows, lo, hi, is_binary, max_passes=6, tol=1e-9):
    """Tighten float bounds by single-row activity arguments.

    Binary variables snap to 0/1 when their tightened range excludes the
    other value by a clear margin. Returns False when some row is proven
    unsatisfiable, which lets the search skip the LP solve entirely.
    """
    for _ in range(max_passes):
        changed = False
        for idx, coeffs, sense, rhs in rows:
            l = lo[idx]
            h = hi[idx]
            prod_lo = coeffs * l
            prod_hi = coeffs * h
            contrib_lo = np.minimum(prod_lo, prod_hi)
            contrib_hi = np.maximum(prod_lo, prod_hi)
            min_act = contrib_lo.sum()
            max_act = contrib_hi.sum()
            if sense in ("<=", "=") and min_act > rhs + tol:
                return False
            if sense in (">=", "=") and max_act < rhs - tol:
                return False
            for tighten_hi in (True, False):
                if tighten_hi and sense == ">=":
                    continue
                if not tighten_hi and sense == "<=":
                    continue
                if tighten_hi:
                    limits = (rhs - (min_act - contrib_lo)) / coeffs
                else:
                    limits = (rhs - (max_act - contrib_hi)) / coeffs
                pos = coeffs > 0
                uppers = np.where(pos if tighten_hi else ~pos, limits, np.inf)
                lowers = np.where(pos if tighten_hi else ~pos, -np.inf, limits)
                for k, j in enumerate(idx):
                    u, w = uppers[k], lowers[k]
                    if u < hi[j] - 1e-9:
                        if is_binary[j]:
                            if u < 1.0 - 1e-6:
                                u = 0.0
                            else:
                                u = 1.0
                        else:
                            u += 1e-9
                        if u < hi[j]:
                            if u < lo[j] - 1e-9:
                                return False
                            hi[j] = max(u, lo[j])
                            changed = True
                    if w > lo[j] + 1e-9:
                        if is_binary[j]:
                            if w > 1e-6:
                                w = 1.0
                            else:
                                w = 0.0
                        else:
                            w -= 1e-9
                        if w > lo[j]:
                            if w > hi[j] + 1e-9:
                                return False
                            lo[j] = min(w, hi[j])
                            changed = True
        if not changed:
            return True
    return True


def _propagate_intervals(constraints, intervals, max_passes):
    """Tighten variable intervals by single-row bound propagation, exactly.

    Keeps every feasible point; returns None when an interval empties.
    """
    for _ in range(max_passes):
        changed = False
        for con in constraints:
            active = [(k, c) for k, c in enumerate(con.coeffs) if c != 0]
            lo_sum = Fraction(0)
            hi_sum = Fraction(0)
            for k, c in active:
                a, b = intervals[k]
                lo_sum += min(c * a, c * b)
                hi_sum += max(c * a, c * b)
            for k, c in active:
                a, b = intervals[k]
                rest_lo = lo_sum - min(c * a, c * b)
                rest_hi = hi_sum - max(c * a, c * b)
                new_a, new_b = a, b
                if con.sense in ("<=", "="):
                    # c*x <= rhs - rest_lo
                    limit = (con.rhs - rest_lo) / c
                    if c > 0:
                        new_b = min(new_b, limit)
                    else:
                        new_a = max(new_a, limit)
                if con.sense in (">=", "="):
                    limit = (con.rhs - rest_hi) / c
                    if c > 0:
                        new_a = max(new_a, limit)
                    else:
                        new_b = min(new_b, limit)
                if new_a > new_b:
                    return None
                if (new_a, new_b) != (a, b):
                    intervals[k] = (new_a, new_b)
                    changed = True
        if not changed:
            break
    return intervals


def _complete_exactly(lp_max: LinearProgram, assignment: dict):
    """Exact feasible completion of a binary assignment, or None.

    Pins the assigned binaries, propagates intervals, and verifies the fully
    pinned point exactly; if propagation leaves freedom, falls back to an
    exact simplex solve on the remainder.
    """
    intervals = []
    for j in range(lp_max.num_vars):
        if j in assignment:
            v = Fraction(assignment[j])
            intervals.append((v, v))
        else:
            intervals.append(lp_max.bounds[j])
    intervals = _propagate_intervals(
        lp_max.constraints, intervals, max_passes=lp_max.num_vars + 2
    )
    if intervals is None:
        return None
    if all(a == b for a, b in intervals):
        point = tuple(a for a, _ in intervals)
        for con in lp_max.constraints:
            if not con.holds(point):
                return None
        value = sum(c * v for c, v in zip(lp_max.objective, point))
        return point, value
    reduced = dataclasses.replace(lp_max, bounds=tuple(intervals))
    res = solve_lp(reduced, exact=True)
    if res.status != OPTIMAL:
        return None
    return res.point, res.value


def solve_milp(
    problem: MilpProblem,
    node_limit: int = DEFAULT_NODE_LIMIT,
    collect_log: bool = False,
) -> MilpSolution:
    """Globally optimal solution over the binary-feasible points.

    LP relaxations provide float bounds; integral candidates are completed
    and compared in exact rationals. `collect_log` records (parent bound,
    child bound) pairs of the search tree for diagnostics.
    """
    flip = problem.lp.sense == "min"
    lp_max = problem.lp
    if flip:
        lp_max = dataclasses.replace(
            lp_max, objective=tuple(-c for c in lp_max.objective), sense="max"
        )
    bins = problem.binary_indices
    log = [] if collect_log else None

    best_point = None
    best_value = None
    nodes = 0
    prepared = PreparedLp(lp_max)

    def node_lp(fixings) -> LpSolution:
        return prepared.solve(fixings)

    root = node_lp({})
    nodes += 1
    if root.status == INFEASIBLE:
        return MilpSolution(INFEASIBLE, nodes=nodes, bound_log=tuple(log) if log is not None else None)

    stack = [(root.value, root.point, {})]
    while stack:
        bound, point, fixings = stack.pop()
        if best_value is not None and bound <= float(best_value) + PRUNE_EPS:
            continue
        fractional = []
        for j in bins:
            v = point[j]
            dist = min(v, 1.0 - v)
            if dist > INTEGRALITY_TOL:
                fractional.append((dist, j))
        if not fractional:
            assignment = {j: int(round(point[j])) for j in bins}
            cand = _complete_exactly(lp_max, assignment)
            if cand is not None:
                cand_point, cand_value = cand
                if best_value is None or cand_value > best_value:
                    best_point, best_value = cand_point, cand_value
                continue
            # The LP point looked integral but fails exact verification;
            # force progress on an unfixed binary.
            unfixed = [j for j in bins if j not in fixings]
            if not unfixed:
                continue
            branch_j = unfixed[0]
        else:
            branch_j = max(fractional, key=lambda t: (t[0], -t[1]))[1]
        children = []
        for v in (1, 0):
            if nodes >= node_limit:
                raise NodeLimitError(
                    f"node limit of {node_limit} reached",
                    incumbent_point=best_point,
                    incumbent_value=(-best_value if flip and best_value is not None else best_value),
                )
            child_fix = dict(fixings)
            child_fix[branch_j] = v
            res = node_lp(child_fix)
            nodes += 1
            if res.status != OPTIMAL:
                continue
            if log is not None:
                # Bounds are reported in the problem's own sense.
                if flip:
                    log.append((-bound, -res.value))
                else:
                    log.append((bound, res.value))
            if best_value is not None and res.value <= float(best_value) + PRUNE_EPS:
                continue
            children.append((res.value, res.point, child_fix))
        children.sort(key=lambda c: c[0])
        stack.extend(children)

    if best_value is None:
        return MilpSolution(
            INFEASIBLE, nodes=nodes, bound_log=tuple(log) if log is not None else None
        )
    value = -best_value if flip else best_value
    return MilpSolution(
        OPTIMAL,
        point=best_point,
        value=value,
        nodes=nodes,
        bound_log=tuple(log) if log is not None else None,
    )
