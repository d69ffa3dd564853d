"""Cutting-plane selection of pure equilibria: maximize a selection function
over the joint strategy space and repeatedly cut off unstable candidates
with inequalities that every pure equilibrium satisfies.

Because each cut is valid for every pure equilibrium, the master's optimum
bounds the best achievable selection value from above; a candidate that
passes the improvement oracle is therefore the selection-optimal pure
equilibrium, and an infeasible master certifies that no pure equilibrium
exists.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

from .errors import MembershipError
from .game import GameInstance, LinearConstraint, PureProfile, is_feasible
from .kernel import INFEASIBLE, LinearProgram, MilpProblem, linearize_products, solve_milp
from .oracle import improve

OPTIMAL_PURE_NE = "optimal"
NO_PURE_NE = "no_pure_ne"
ITERATION_LIMIT = "iteration_limit"
TIME_LIMIT = "time_limit"


def _canonical_pair(i, k, j, l):
    return ((i, k), (j, l)) if (i, k) <= (j, l) else ((j, l), (i, k))


@dataclass(frozen=True)
class SelectionFunction:
    """Linear-plus-bilinear objective over the joint strategy space.

    `linear` maps (player, var) to a coefficient; `bilinear` maps canonical
    cross-player variable pairs to a coefficient. Presets: `welfare` sums
    every player's payoff, `player_payoff` takes a single player's payoff.
    """

    constant: Fraction
    linear: tuple
    bilinear: tuple
    label: str = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "constant", Fraction(self.constant))
        lin = self.linear.items() if hasattr(self.linear, "items") else self.linear
        bil = self.bilinear.items() if hasattr(self.bilinear, "items") else self.bilinear
        object.__setattr__(
            self, "linear", tuple(sorted((tuple(k), Fraction(v)) for k, v in lin))
        )
        bil_norm = {}
        for (a, b), v in bil:
            key = _canonical_pair(a[0], a[1], b[0], b[1])
            if key[0][0] == key[1][0]:
                raise ValueError("bilinear selection terms must cross players")
            bil_norm[key] = bil_norm.get(key, Fraction(0)) + Fraction(v)
        object.__setattr__(self, "bilinear", tuple(sorted(bil_norm.items())))

    @classmethod
    def welfare(cls, game: GameInstance):
        return _sum_of_payoffs(game, range(game.num_players), "welfare")

    @classmethod
    def player_payoff(cls, game: GameInstance, player: int):
        return _sum_of_payoffs(game, [player], f"player:{player}")

    def value_at(self, profile: PureProfile) -> Fraction:
        total = self.constant
        flat = profile.strategies
        for (i, k), c in self.linear:
            if flat[i][k]:
                total += c
        for ((i, k), (j, l)), c in self.bilinear:
            if flat[i][k] and flat[j][l]:
                total += c
        return total


def _sum_of_payoffs(game, players, label):
    constant = Fraction(0)
    linear = {}
    bilinear = {}
    for i in players:
        payoff = game.payoff(i)
        constant += payoff.constant
        for k, c in enumerate(payoff.own_linear):
            if c:
                linear[(i, k)] = linear.get((i, k), Fraction(0)) + c
        for j, vec in payoff.opp_linear:
            for l, c in enumerate(vec):
                if c:
                    linear[(j, l)] = linear.get((j, l), Fraction(0)) + c
        for j, mat in payoff.bilinear:
            for k, row in enumerate(mat):
                for l, c in enumerate(row):
                    if c:
                        key = _canonical_pair(i, k, j, l)
                        bilinear[key] = bilinear.get(key, Fraction(0)) + c
    return SelectionFunction(constant, linear, bilinear, label)


@dataclass(frozen=True)
class EquilibriumCut:
    """One best-response inequality, valid at every pure equilibrium.

    Written with all variables on the left: the owner's realized payoff
    terms (own linear plus products) minus the deviation's cross terms must
    be at least the deviation's own-linear value. Constants and
    opponent-linear terms cancel on both sides.
    """

    player: int
    deviation: tuple
    linear: tuple  # ((player, var), coeff)
    bilinear: tuple  # (canonical pair, coeff)
    rhs: Fraction

    def slack_at(self, profile: PureProfile) -> Fraction:
        flat = profile.strategies
        lhs = Fraction(0)
        for (i, k), c in self.linear:
            if flat[i][k]:
                lhs += c
        for ((i, k), (j, l)), c in self.bilinear:
            if flat[i][k] and flat[j][l]:
                lhs += c
        return lhs - self.rhs


def make_cut(game: GameInstance, player: int, deviation) -> EquilibriumCut:
    """Instantiate the stability inequality of `player` at a fixed feasible
    deviation, linearized over joint and product variables."""
    deviation = tuple(int(v) for v in deviation)
    if not is_feasible(game.strategy_set(player), deviation):
        raise MembershipError(
            f"deviation {deviation} is infeasible for player {player}"
        )
    payoff = game.payoff(player)
    linear = {}
    bilinear = {}
    for k, c in enumerate(payoff.own_linear):
        if c:
            linear[(player, k)] = linear.get((player, k), Fraction(0)) + c
    rhs = sum(c for c, v in zip(payoff.own_linear, deviation) if v)
    for j, mat in payoff.bilinear:
        for k, row in enumerate(mat):
            for l, c in enumerate(row):
                if not c:
                    continue
                key = _canonical_pair(player, k, j, l)
                bilinear[key] = bilinear.get(key, Fraction(0)) + c
                if deviation[k]:
                    # The deviation's interaction terms stay affine in the
                    # opponents' variables.
                    linear[(j, l)] = linear.get((j, l), Fraction(0)) - c
    return EquilibriumCut(
        player,
        deviation,
        tuple(sorted(linear.items())),
        tuple(sorted(bilinear.items())),
        Fraction(rhs),
    )


@dataclass(frozen=True)
class JointLayout:
    """Column layout of the master program: players' binaries then products."""

    offsets: tuple
    num_binary: int
    z_pairs: tuple
    total: int

    def column(self, player: int, var: int) -> int:
        return self.offsets[player] + var

    def z_column(self, pair) -> int:
        return self.num_binary + self.z_pairs.index(pair)


def _collect_pairs(game, h, cuts):
    pairs = set()
    for i in range(game.num_players):
        for j, mat in game.payoff(i).bilinear:
            for k, row in enumerate(mat):
                for l, c in enumerate(row):
                    if c:
                        pairs.add(_canonical_pair(i, k, j, l))
    pairs.update(p for p, _ in h.bilinear)
    for cut in cuts:
        pairs.update(p for p, _ in cut.bilinear)
    return tuple(sorted(pairs))


def build_master_milp(game: GameInstance, h: SelectionFunction, cuts=()):
    """Assemble the selection master: all players' constraints, product
    linearization rows, and the accumulated equilibrium cuts."""
    offsets = []
    total = 0
    for i in range(game.num_players):
        offsets.append(total)
        total += game.num_vars(i)
    z_pairs = _collect_pairs(game, h, cuts)
    width = total + len(z_pairs)
    layout = JointLayout(tuple(offsets), total, z_pairs, width)
    pair_cols = {pair: total + t for t, pair in enumerate(z_pairs)}

    constraints = []
    for i in range(game.num_players):
        off = offsets[i]
        for con in game.strategy_set(i).constraints:
            coeffs = [Fraction(0)] * width
            for k, c in enumerate(con.coeffs):
                coeffs[off + k] = c
            constraints.append(LinearConstraint(tuple(coeffs), con.sense, con.rhs))
    index_pairs = [
        (offsets[a[0]] + a[1], offsets[b[0]] + b[1]) for a, b in layout.z_pairs
    ]
    _, product_rows = linearize_products(index_pairs, total)
    for row in product_rows:
        # linearize_products numbers its z columns exactly as the layout does.
        constraints.append(row)

    def cut_row(cut):
        coeffs = [Fraction(0)] * width
        for (i, k), c in cut.linear:
            coeffs[offsets[i] + k] += c
        for pair, c in cut.bilinear:
            coeffs[pair_cols[pair]] += c
        return LinearConstraint(tuple(coeffs), ">=", cut.rhs)

    constraints.extend(cut_row(cut) for cut in cuts)

    objective = [Fraction(0)] * width
    for (i, k), c in h.linear:
        objective[offsets[i] + k] += c
    for pair, c in h.bilinear:
        objective[pair_cols[pair]] += c

    bounds = tuple((Fraction(0), Fraction(1)) for _ in range(width))
    lp = LinearProgram(tuple(objective), "max", tuple(constraints), bounds)
    return MilpProblem(lp, tuple(range(total))), layout


@dataclass(frozen=True)
class ZeroRegretsResult:
    status: str
    profile: PureProfile | None
    h_value: Fraction | None
    iterations: int
    cuts: tuple
    epsilon: Fraction | None = None


def solve_zero_regrets(
    game: GameInstance,
    h: SelectionFunction,
    max_iterations: int = 1000,
    epsilon_track: bool = True,
    deadline: float | None = None,
) -> ZeroRegretsResult:
    """Selection-optimal pure equilibrium, a certificate that none exists,
    or (on a limit) the least-violating candidate seen so far.

    Every master solution satisfies all accumulated cuts exactly, so any
    deviation found by the oracle yields a cut that is new and violated by
    the current candidate; candidates never repeat and the loop terminates.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    cuts = []
    best_eps = None
    best_profile = None
    extract = None
    for iteration in range(1, max_iterations + 1):
        if deadline is not None and time.monotonic() >= deadline:
            return ZeroRegretsResult(
                TIME_LIMIT,
                best_profile,
                h.value_at(best_profile) if best_profile is not None else None,
                iteration - 1,
                tuple(cuts),
                best_eps,
            )
        problem, layout = build_master_milp(game, h, cuts)
        res = solve_milp(problem)
        if res.status == INFEASIBLE:
            return ZeroRegretsResult(NO_PURE_NE, None, None, iteration, tuple(cuts))
        point = res.point
        profile = PureProfile(
            tuple(
                tuple(int(point[layout.column(i, k)]) for k in range(game.num_vars(i)))
                for i in range(game.num_players)
            )
        )
        verdict = improve(game, profile)
        if verdict.is_equilibrium:
            return ZeroRegretsResult(
                OPTIMAL_PURE_NE,
                profile,
                h.value_at(profile),
                iteration,
                tuple(cuts),
                verdict.worst_violation,
            )
        if epsilon_track and (best_eps is None or verdict.worst_violation < best_eps):
            best_eps = verdict.worst_violation
            best_profile = profile
        for dev in verdict.deviations:
            cuts.append(make_cut(game, dev.player, dev.strategy))
    return ZeroRegretsResult(
        ITERATION_LIMIT,
        best_profile,
        h.value_at(best_profile) if best_profile is not None else None,
        max_iterations,
        tuple(cuts),
        best_eps,
    )
