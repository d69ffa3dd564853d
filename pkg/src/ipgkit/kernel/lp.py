"""Dense two-phase primal simplex over box-bounded variables.

Runs in float64 by default with deterministic pivoting (largest reduced cost,
ties to the lowest index, Bland's rule after a degeneracy streak). The same
pivoting code also runs on exact Fraction scalars for small certification
solves, where every tolerance is zero and Bland's rule is active throughout.

`PreparedLp` converts a program to numeric arrays once so that repeated
solves under changed variable bounds (the branch-and-bound hot path) skip
all rational-to-float conversion work.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

from ..errors import DimensionError, KernelStallError, SolverInternalError
from ..rational import as_fraction, as_fraction_vector

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"

DEGENERACY_THRESHOLD = 60
DEFAULT_PIVOT_CAP = 20000

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2


@dataclass(frozen=True)
class LinearProgram:
    """max/min of a linear objective over linear constraints and finite boxes."""

    objective: tuple
    sense: str = "max"
    constraints: tuple = ()
    bounds: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "objective", as_fraction_vector(self.objective))
        object.__setattr__(
            self,
            "bounds",
            tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in self.bounds),
        )
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.sense not in ("max", "min"):
            raise ValueError(f"unknown objective sense {self.sense!r}")
        n = len(self.objective)
        if len(self.bounds) != n:
            raise DimensionError(f"{len(self.bounds)} bounds for {n} variables")
        for con in self.constraints:
            if len(con.coeffs) != n:
                raise DimensionError(
                    f"constraint over {len(con.coeffs)} variables in a program "
                    f"with {n}"
                )

    @property
    def num_vars(self):
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: str
    point: tuple | None = None
    value: object = None


class _Tols:
    def __init__(self, exact):
        if exact:
            self.piv = Fraction(0)
            self.rc = Fraction(0)
            self.feas = Fraction(0)
            self.degen = Fraction(0)
        else:
            self.piv = 1e-9
            self.rc = 1e-9
            self.feas = 1e-7
            self.degen = 1e-12


def _basic_values(T, beta, status, uppers):
    xb = beta.copy()
    for j, st in enumerate(status):
        if st == AT_UPPER:
            xb = xb - T[:, j] * uppers[j]
    return xb


def _choose_entering(z, status, allowed, tols, bland):
    best, best_score = None, None
    for j in range(len(status)):
        if not allowed[j]:
            continue
        st = status[j]
        if st == AT_LOWER and z[j] > tols.rc:
            score = z[j]
        elif st == AT_UPPER and z[j] < -tols.rc:
            score = -z[j]
        else:
            continue
        if bland:
            return j
        if best_score is None or score > best_score:
            best, best_score = j, score
    return best


def _optimize(T, beta, z, basis, status, uppers, allowed, tols, bland, budget):
    """Primal iterations until no eligible entering column remains.

    Mutates the tableau state in place. `budget` is a single-element list
    holding the remaining pivot allowance.
    """
    degen_streak = 0
    m = T.shape[0]
    while True:
        if budget[0] <= 0:
            raise KernelStallError("simplex pivot cap exhausted")
        xb = _basic_values(T, beta, status, uppers)
        j = _choose_entering(z, status, allowed, tols, bland)
        if j is None:
            return
        direction = 1 if status[j] == AT_LOWER else -1
        col = T[:, j]
        # Ratio test: first movement limit among basic variables, then the
        # entering variable's own opposite bound.
        best_t, best_row, leave_to = None, None, None
        for i in range(m):
            g = direction * col[i]
            if g > tols.piv:
                t = xb[i] / g
                hit = AT_LOWER
            elif g < -tols.piv:
                ub = uppers[basis[i]]
                if ub == math.inf:
                    continue
                t = (ub - xb[i]) / (-g)
                hit = AT_UPPER
            else:
                continue
            if t < 0:
                t = 0 * t
            take = best_t is None or t < best_t
            if not take and t == best_t:
                if bland:
                    take = basis[i] < basis[best_row]
                else:
                    take = i < best_row
            if take:
                best_t, best_row, leave_to = t, i, hit
        flip_t = uppers[j]
        if best_t is None or (flip_t != math.inf and flip_t <= best_t):
            if flip_t == math.inf:
                raise SolverInternalError(
                    "unbounded improving direction in a box-bounded program"
                )
            # Bound flip: the entering variable crosses to its other bound.
            status[j] = AT_UPPER if status[j] == AT_LOWER else AT_LOWER
            step = flip_t
        else:
            piv = col[best_row]
            T[best_row] = T[best_row] / piv
            beta[best_row] = beta[best_row] / piv
            rows = np.arange(m) != best_row
            factor = T[rows, j].copy()
            T[rows] = T[rows] - np.outer(factor, T[best_row])
            beta[rows] = beta[rows] - factor * beta[best_row]
            zj = z[j]
            z[...] = z - zj * T[best_row]
            status[basis[best_row]] = leave_to
            status[j] = BASIC
            basis[best_row] = j
            step = best_t
        budget[0] -= 1
        if step <= tols.degen:
            degen_streak += 1
            if degen_streak > DEGENERACY_THRESHOLD:
                bland = True
        else:
            degen_streak = 0


@njit(cache=True)
def _iterate_float64(T, beta, z, basis, status, uppers, allowed, piv_tol, rc_tol, degen_tol, bland, budget):  # pragma: no cover - exercised through solve_lp
    """Compiled pivot loop; selection rules match `_optimize` exactly.

    Returns (exit_code, pivots): 0 optimal, 1 pivot budget exhausted,
    2 unbounded direction (impossible for well-formed boxed programs).
    """
    m, n = T.shape
    degen_streak = 0
    pivots = 0
    while True:
        if pivots >= budget:
            return 1, pivots
        xb = beta.copy()
        for j in range(n):
            if status[j] == 1:
                u = uppers[j]
                if u != 0.0:
                    for i in range(m):
                        xb[i] -= T[i, j] * u
        best_j = -1
        best_score = 0.0
        for j in range(n):
            if not allowed[j]:
                continue
            s = status[j]
            if s == 0 and z[j] > rc_tol:
                score = z[j]
            elif s == 1 and z[j] < -rc_tol:
                score = -z[j]
            else:
                continue
            if bland:
                best_j = j
                break
            if score > best_score:
                best_j = j
                best_score = score
        if best_j < 0:
            return 0, pivots
        j = best_j
        direction = 1.0 if status[j] == 0 else -1.0
        best_t = np.inf
        best_row = -1
        hit = 0
        for i in range(m):
            g = direction * T[i, j]
            if g > piv_tol:
                t = xb[i] / g
                h = 0
            elif g < -piv_tol:
                ub = uppers[basis[i]]
                if ub == np.inf:
                    continue
                t = (ub - xb[i]) / (-g)
                h = 1
            else:
                continue
            if t < 0.0:
                t = 0.0
            take = best_row < 0 or t < best_t
            if not take and t == best_t and bland:
                take = basis[i] < basis[best_row]
            if take:
                best_t = t
                best_row = i
                hit = h
        flip_t = uppers[j]
        if best_row < 0 or flip_t <= best_t:
            if flip_t == np.inf:
                return 2, pivots
            status[j] = 1 - status[j]
            step = flip_t
        else:
            piv = T[best_row, j]
            for k in range(n):
                T[best_row, k] /= piv
            beta[best_row] /= piv
            zj = z[j]
            for i in range(m):
                if i == best_row:
                    continue
                f = T[i, j]
                if f != 0.0:
                    for k in range(n):
                        T[i, k] -= f * T[best_row, k]
                    beta[i] -= f * beta[best_row]
            if zj != 0.0:
                for k in range(n):
                    z[k] -= zj * T[best_row, k]
            status[basis[best_row]] = hit
            status[j] = 2
            basis[best_row] = j
            step = best_t
        pivots += 1
        if step <= degen_tol:
            degen_streak += 1
            if degen_streak > 60:
                bland = True
        else:
            degen_streak = 0


def _optimize_float(T, beta, z, basis, status, uppers, allowed, tols, bland, budget):
    """Float64 twin of `_optimize` with vectorized entering and ratio test.

    Pivot selection rules match the generic loop exactly: largest reduced
    cost with lowest-index ties (argmax picks the first maximum), minimum
    ratio with lowest-row ties, Bland's rule after a degeneracy streak.
    """
    degen_streak = 0
    m, _ = T.shape
    rows_range = np.arange(m)
    basis_arr = np.asarray(basis)
    while True:
        if budget[0] <= 0:
            raise KernelStallError("simplex pivot cap exhausted")
        upper_cols = np.flatnonzero(status == AT_UPPER)
        if upper_cols.size:
            xb = beta - T[:, upper_cols] @ uppers[upper_cols]
        else:
            xb = beta.copy()
        lower_ok = (status == AT_LOWER) & allowed & (z > tols.rc)
        upper_ok = (status == AT_UPPER) & allowed & (z < -tols.rc)
        eligible = lower_ok | upper_ok
        if not eligible.any():
            return
        if bland:
            j = int(np.argmax(eligible))
        else:
            scores = np.where(lower_ok, z, np.where(upper_ok, -z, -np.inf))
            j = int(np.argmax(scores))
        direction = 1.0 if status[j] == AT_LOWER else -1.0
        col = T[:, j]
        g = direction * col
        limits = np.full(m, np.inf)
        dec = g > tols.piv
        if dec.any():
            limits[dec] = xb[dec] / g[dec]
        inc = g < -tols.piv
        if inc.any():
            ub = uppers[basis_arr[inc]]
            with np.errstate(invalid="ignore"):
                limits[inc] = (ub - xb[inc]) / (-g[inc])
        np.maximum(limits, 0.0, out=limits)
        best_row = -1
        if np.isfinite(limits).any():
            best_t = limits.min()
            if bland:
                ties = rows_range[limits == best_t]
                best_row = int(ties[np.argmin(basis_arr[ties])])
            else:
                best_row = int(np.argmin(limits))
        else:
            best_t = None
        flip_t = uppers[j]
        if best_t is None or flip_t <= best_t:
            if not np.isfinite(flip_t):
                raise SolverInternalError(
                    "unbounded improving direction in a box-bounded program"
                )
            status[j] = AT_UPPER if status[j] == AT_LOWER else AT_LOWER
            step = flip_t
        else:
            piv = col[best_row]
            T[best_row] /= piv
            beta[best_row] /= piv
            factor = T[:, j].copy()
            factor[best_row] = 0.0
            T -= np.outer(factor, T[best_row])
            beta -= factor * beta[best_row]
            z -= z[j] * T[best_row]
            # The leaving variable parks at the bound it hit.
            hit = AT_LOWER if g[best_row] > 0 else AT_UPPER
            status[basis_arr[best_row]] = hit
            status[j] = BASIC
            basis_arr[best_row] = j
            basis[best_row] = j
            step = best_t
        budget[0] -= 1
        if step <= tols.degen:
            degen_streak += 1
            if degen_streak > DEGENERACY_THRESHOLD:
                bland = True
        else:
            degen_streak = 0


def _run_float(T, beta, z, basis, status, uppers, allowed, tols, bland, budget):
    """Adapter around the compiled loop with the pure-numpy fallback."""
    if HAVE_NUMBA:
        basis_arr = np.array(basis, dtype=np.int64)
        code, used = _iterate_float64(
            T, beta, z, basis_arr, status, uppers, allowed,
            tols.piv, tols.rc, tols.degen, bland, budget[0],
        )
        basis[:] = [int(v) for v in basis_arr]
        budget[0] -= used
        if code == 1:
            raise KernelStallError("simplex pivot cap exhausted")
        if code == 2:
            raise SolverInternalError(
                "unbounded improving direction in a box-bounded program"
            )
    else:
        _optimize_float(T, beta, z, basis, status, uppers, allowed, tols, bland, budget)


class PreparedLp:
    """A linear program converted once to one numeric dtype.

    `exact=False` holds float64 arrays for the fast kernel; `exact=True`
    keeps Fractions and solves with zero tolerances. Repeated solves may
    override variable bounds, which is how branch and bound fixes binaries
    without touching the rationals again.
    """

    def __init__(self, lp: LinearProgram, exact: bool = False):
        self.exact = exact
        conv = (lambda v: v) if exact else float
        dtype = object if exact else np.float64
        n = lp.num_vars
        m = len(lp.constraints)
        self.num_vars = n
        self.sense = lp.sense
        self.objective = np.array([conv(c) for c in lp.objective], dtype=dtype)
        sign = 1 if lp.sense == "max" else -1
        self.internal_obj = np.array(
            [conv(c) * sign for c in lp.objective], dtype=dtype
        )
        self.matrix = np.array(
            [[conv(c) for c in con.coeffs] for con in lp.constraints], dtype=dtype
        ).reshape(m, n)
        self.senses = [con.sense for con in lp.constraints]
        self.rhs = np.array([conv(con.rhs) for con in lp.constraints], dtype=dtype)
        self.lo = [conv(b[0]) for b in lp.bounds]
        self.hi = [conv(b[1]) for b in lp.bounds]
        self.zero = Fraction(0) if exact else 0.0
        self.tols = _Tols(exact)

    def solve(self, fixings=None, max_pivots=DEFAULT_PIVOT_CAP) -> LpSolution:
        """Solve with optional {index: value} bound overrides."""
        lo = list(self.lo)
        hi = list(self.hi)
        if fixings:
            conv = (lambda v: v) if self.exact else float
            for j, v in fixings.items():
                lo[j] = conv(v)
                hi[j] = conv(v)
        return self._solve(lo, hi, max_pivots)

    def _solve(self, lo, hi, max_pivots) -> LpSolution:
        n = self.num_vars
        tols = self.tols
        zero = self.zero
        if any(l > h for l, h in zip(lo, hi)):
            return LpSolution(INFEASIBLE)
        fixed = [j for j in range(n) if lo[j] == hi[j]]
        free = [j for j in range(n) if lo[j] < hi[j]]

        def finish(values):
            point = [zero] * n
            for j in fixed:
                point[j] = lo[j]
            for idx, j in enumerate(free):
                point[j] = values[idx]
            if self.exact:
                value = sum(c * v for c, v in zip(self.objective, point))
            else:
                value = float(np.dot(self.objective, np.array(point)))
            return LpSolution(OPTIMAL, tuple(point), value)

        m = len(self.senses)
        if m:
            rhs = self.rhs.copy()
            if fixed:
                fixed_vals = np.array([lo[j] for j in fixed], dtype=self.matrix.dtype)
                rhs = rhs - np.dot(self.matrix[:, fixed], fixed_vals)
            a_free = self.matrix[:, free]
        else:
            rhs = self.rhs
            a_free = self.matrix[:, free]

        rows = []
        for i in range(m):
            coeffs = a_free[i]
            if not np.any(coeffs != zero):
                r = rhs[i]
                sense = self.senses[i]
                ok = (
                    r >= -tols.feas
                    if sense == "<="
                    else r <= tols.feas if sense == ">=" else -tols.feas <= r <= tols.feas
                )
                if not ok:
                    return LpSolution(INFEASIBLE)
                continue
            rows.append(i)

        if not free:
            return finish([])

        obj = self.internal_obj[free]
        lows = [lo[j] for j in free]
        widths = [hi[j] - lo[j] for j in free]

        if not rows:
            values = [
                lows[idx] + (widths[idx] if obj[idx] > tols.rc else zero)
                for idx in range(len(free))
            ]
            return finish(values)

        a = a_free[rows].copy()
        b = rhs[rows].copy()
        b = b - np.dot(a, np.array(lows, dtype=a.dtype))
        senses = [self.senses[i] for i in rows]
        for i in range(len(rows)):
            if b[i] < 0:
                a[i] = -a[i]
                b[i] = -b[i]
                senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]

        values = self._simplex(a, b, senses, obj, widths, max_pivots)
        if values is None:
            return LpSolution(INFEASIBLE)
        return finish([lows[idx] + values[idx] for idx in range(len(free))])

    def _simplex(self, a, b, senses, obj, widths, max_pivots):
        """Two-phase run on shifted variables y in [0, width]; returns y."""
        m, nr = a.shape
        zero = self.zero
        one = Fraction(1) if self.exact else 1.0
        tols = self.tols
        slack_count = sum(1 for s in senses if s != "=")
        art_rows = [i for i, s in enumerate(senses) if s != "<="]
        columns = nr + slack_count + len(art_rows)
        dtype = object if self.exact else np.float64
        T = np.full((m, columns), zero, dtype=dtype)
        T[:, :nr] = a
        beta = b.astype(dtype) if not self.exact else b.copy()
        uppers = list(widths) + [math.inf] * (columns - nr)
        basis = []
        status = [AT_LOWER] * columns
        art_cols = []
        col = nr
        for i, sense in enumerate(senses):
            slack = art = None
            if sense != "=":
                slack = col
                T[i, slack] = one if sense == "<=" else -one
                col += 1
            if sense != "<=":
                art = col
                T[i, art] = one
                art_cols.append(art)
                col += 1
            pick = slack if sense == "<=" else art
            basis.append(pick)
            status[pick] = BASIC

        budget = [max_pivots]
        if self.exact:
            optimize = _optimize
            allowed = [True] * columns
        else:
            optimize = _run_float
            uppers = np.array([float(u) for u in uppers])
            status = np.array(status, dtype=np.int64)
            allowed = np.ones(columns, dtype=bool)

        if art_cols:
            c1 = np.full(columns, zero, dtype=dtype)
            for j in art_cols:
                c1[j] = -one
            cb = np.array([c1[k] for k in basis], dtype=dtype)
            z = c1 - np.dot(cb, T)
            optimize(T, beta, z, basis, status, uppers, allowed, tols, self.exact, budget)
            xb = _basic_values(T, beta, status, uppers)
            art_set = set(art_cols)
            art_sum = sum(xb[i] for i in range(m) if basis[i] in art_set)
            if art_sum > tols.feas:
                return None
            # Cage artificials at zero for phase 2; the ratio test then
            # ejects any that would move, and none may re-enter.
            for j in art_cols:
                uppers[j] = zero
                allowed[j] = False

        c2 = np.full(columns, zero, dtype=dtype)
        c2[:nr] = obj
        cb = np.array([c2[k] for k in basis], dtype=dtype)
        z = c2 - np.dot(cb, T)
        optimize(T, beta, z, basis, status, uppers, allowed, tols, self.exact, budget)

        xb = _basic_values(T, beta, status, uppers)
        row_of = {k: i for i, k in enumerate(basis)}
        values = []
        for idx in range(nr):
            st = status[idx]
            if st == AT_LOWER:
                y = zero
            elif st == AT_UPPER:
                y = uppers[idx]
            else:
                y = xb[row_of[idx]]
                if not self.exact:
                    y = min(max(y, 0.0), float(widths[idx]))
            values.append(y)
        return values


def solve_lp(lp: LinearProgram, exact: bool = False, max_pivots: int = DEFAULT_PIVOT_CAP) -> LpSolution:
    """Solve a box-bounded linear program.

    Returns an optimal point and value, or infeasibility. Unboundedness
    cannot occur because every variable carries finite bounds. In exact mode
    the point and value are Fractions and every comparison is exact.
    """
    return PreparedLp(lp, exact=exact).solve(max_pivots=max_pivots)
