"""Game data model: binary strategy sets, bilinear-separable payoffs, and
exact payoff evaluation for pure and mixed profiles.

All payoff and constraint data is stored as exact rationals. Every type here
is immutable after construction and safe to share across threads.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionError, DistributionError
from .rational import as_fraction, as_fraction_vector

SENSES = ("<=", ">=", "=")

DEFAULT_TOL = Fraction(1, 10**6)


@dataclass(frozen=True)
class LinearConstraint:
    """A single affine inequality or equation over one variable block."""

    coeffs: tuple
    sense: str
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_fraction_vector(self.coeffs))
        object.__setattr__(self, "rhs", as_fraction(self.rhs))
        if self.sense not in SENSES:
            raise ValueError(f"unknown constraint sense {self.sense!r}")

    def holds(self, x) -> bool:
        if len(x) != len(self.coeffs):
            raise DimensionError(
                f"constraint over {len(self.coeffs)} variables checked on a "
                f"vector of length {len(x)}"
            )
        lhs = sum(c * v for c, v in zip(self.coeffs, x))
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class StrategySet:
    """Feasible set {0,1}^num_vars intersected with linear constraints.

    The set may be empty; emptiness is discovered by the solvers, not
    rejected here.
    """

    num_vars: int
    constraints: tuple = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("a strategy set needs at least one variable")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for con in self.constraints:
            if len(con.coeffs) != self.num_vars:
                raise DimensionError(
                    f"constraint over {len(con.coeffs)} variables attached to "
                    f"a strategy set with {self.num_vars}"
                )


def is_feasible(strategy_set: StrategySet, x) -> bool:
    """Exact membership check of a binary vector in a strategy set."""
    if len(x) != strategy_set.num_vars:
        raise DimensionError(
            f"vector of length {len(x)} checked against a strategy set with "
            f"{strategy_set.num_vars} variables"
        )
    if any(v not in (0, 1) for v in x):
        raise ValueError(f"{tuple(x)} is not a binary vector")
    return all(con.holds(x) for con in strategy_set.constraints)


def _normalize_indexed_vectors(entries):
    if hasattr(entries, "items"):
        entries = entries.items()
    return tuple(sorted((int(j), as_fraction_vector(v)) for j, v in entries))


def _normalize_indexed_matrices(entries):
    if hasattr(entries, "items"):
        entries = entries.items()
    out = []
    for j, mat in entries:
        out.append((int(j), tuple(as_fraction_vector(row) for row in mat)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class PayoffSpec:
    """One player's payoff: constant + own linear + opponent linear + bilinear.

    `opp_linear` maps opponent index -> coefficient vector over that
    opponent's variables; `bilinear` maps opponent index -> matrix of shape
    (own vars x opponent vars). Entries for the owner itself are rejected at
    game assembly. The opponent-linear part never influences the owner's
    optimization, only reported values.
    """

    constant: Fraction = Fraction(0)
    own_linear: tuple = ()
    opp_linear: tuple = ()
    bilinear: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "constant", as_fraction(self.constant))
        object.__setattr__(self, "own_linear", as_fraction_vector(self.own_linear))
        object.__setattr__(self, "opp_linear", _normalize_indexed_vectors(self.opp_linear))
        object.__setattr__(self, "bilinear", _normalize_indexed_matrices(self.bilinear))

    def opp_linear_map(self) -> dict:
        return dict(self.opp_linear)

    def bilinear_map(self) -> dict:
        return dict(self.bilinear)


@dataclass(frozen=True)
class GameInstance:
    """An n-player simultaneous game over binary strategy sets."""

    players: tuple  # of (StrategySet, PayoffSpec) pairs
    name: str = ""
    tol: Fraction = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(tuple(p) for p in self.players))
        object.__setattr__(self, "tol", as_fraction(self.tol))
        if self.tol < 0:
            raise ValueError("tolerance must be nonnegative")
        n = len(self.players)
        if n < 2:
            raise ValueError("a game needs at least two players")
        for i, (sset, payoff) in enumerate(self.players):
            if len(payoff.own_linear) != sset.num_vars:
                raise DimensionError(
                    f"player {i}: own-linear length {len(payoff.own_linear)} "
                    f"!= {sset.num_vars} variables"
                )
            for j, vec in payoff.opp_linear:
                if j == i:
                    raise DimensionError(f"player {i}: opponent-linear entry for itself")
                if not 0 <= j < n:
                    raise DimensionError(f"player {i}: opponent index {j} out of range")
                if len(vec) != self.players[j][0].num_vars:
                    raise DimensionError(
                        f"player {i}: opponent-linear vector for player {j} has "
                        f"length {len(vec)}"
                    )
            for j, mat in payoff.bilinear:
                if j == i:
                    raise DimensionError(f"player {i}: bilinear entry for itself")
                if not 0 <= j < n:
                    raise DimensionError(f"player {i}: opponent index {j} out of range")
                if len(mat) != sset.num_vars or any(
                    len(row) != self.players[j][0].num_vars for row in mat
                ):
                    raise DimensionError(
                        f"player {i}: bilinear block for player {j} is not "
                        f"({sset.num_vars} x {self.players[j][0].num_vars})"
                    )

    @property
    def num_players(self) -> int:
        return len(self.players)

    def strategy_set(self, i: int) -> StrategySet:
        return self.players[i][0]

    def payoff(self, i: int) -> PayoffSpec:
        return self.players[i][1]

    def num_vars(self, i: int) -> int:
        return self.players[i][0].num_vars


@dataclass(frozen=True)
class PureProfile:
    """One binary strategy vector per player."""

    strategies: tuple

    def __post_init__(self):
        strategies = tuple(tuple(int(v) for v in s) for s in self.strategies)
        object.__setattr__(self, "strategies", strategies)
        for s in strategies:
            if any(v not in (0, 1) for v in s):
                raise ValueError(f"{s} is not a binary vector")

    def __getitem__(self, i):
        return self.strategies[i]

    def flat(self) -> tuple:
        return tuple(v for s in self.strategies for v in s)


@dataclass(frozen=True)
class MixedStrategy:
    """A finite-support distribution over one player's pure strategies."""

    support: tuple  # of binary tuples, pairwise distinct
    probs: tuple  # matching Fractions, nonnegative, summing to one

    def __post_init__(self):
        support = tuple(tuple(int(v) for v in s) for s in self.support)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", as_fraction_vector(self.probs))
        if len(self.support) != len(self.probs):
            raise DimensionError("support and probability lists differ in length")
        if not self.support:
            raise DistributionError("empty support")
        if len(set(support)) != len(support):
            raise DistributionError("support strategies must be pairwise distinct")
        if any(p < 0 for p in self.probs):
            raise DistributionError("negative probability")
        if abs(sum(self.probs) - 1) > DEFAULT_TOL:
            raise DistributionError(f"probabilities sum to {float(sum(self.probs))}")

    @classmethod
    def point_mass(cls, strategy):
        return cls((tuple(strategy),), (Fraction(1),))

    def mean(self) -> tuple:
        """Probability-weighted average strategy vector, exact."""
        n = len(self.support[0])
        return tuple(
            sum(p * s[k] for s, p in zip(self.support, self.probs))
            for k in range(n)
        )

    def is_degenerate(self) -> bool:
        return len(self.support) == 1


@dataclass(frozen=True)
class MixedProfile:
    """One mixed strategy per player; players randomize independently."""

    strategies: tuple  # of MixedStrategy

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(self.strategies))

    @classmethod
    def from_pure(cls, profile: PureProfile):
        return cls(tuple(MixedStrategy.point_mass(s) for s in profile.strategies))

    def __getitem__(self, i):
        return self.strategies[i]

    def is_degenerate(self) -> bool:
        return all(s.is_degenerate() for s in self.strategies)

    def to_pure(self) -> PureProfile:
        if not self.is_degenerate():
            raise ValueError("profile randomizes, no pure counterpart")
        return PureProfile(tuple(s.support[0] for s in self.strategies))


def _check_profile_dims(game: GameInstance, vectors):
    if len(vectors) != game.num_players:
        raise DimensionError(
            f"profile covers {len(vectors)} players, game has {game.num_players}"
        )
    for i, v in enumerate(vectors):
        if len(v) != game.num_vars(i):
            raise DimensionError(
                f"player {i}: strategy of length {len(v)}, expected {game.num_vars(i)}"
            )


def payoff_against_means(game: GameInstance, player: int, means: dict):
    """Split player's payoff into (objective vector over own vars, constant).

    `means` maps every opponent index to that opponent's (mean) strategy
    vector. Valid for mixed opponents because payoffs are at most bilinear
    across independently randomizing players.
    """
    payoff = game.payoff(player)
    obj = list(payoff.own_linear)
    constant = payoff.constant
    for j, vec in payoff.opp_linear:
        constant += sum(c * m for c, m in zip(vec, means[j]))
    for j, mat in payoff.bilinear:
        mu = means[j]
        for k, row in enumerate(mat):
            obj[k] += sum(q * m for q, m in zip(row, mu) if q)
    return tuple(obj), constant


def evaluate_pure(game: GameInstance, profile: PureProfile, player: int) -> Fraction:
    """Exact payoff of `player` at a pure profile."""
    _check_profile_dims(game, profile.strategies)
    x = profile.strategies[player]
    payoff = game.payoff(player)
    own_set = [k for k, v in enumerate(x) if v]
    value = payoff.constant
    value += sum(payoff.own_linear[k] for k in own_set)
    for j, vec in payoff.opp_linear:
        value += sum(c for c, v in zip(vec, profile.strategies[j]) if v)
    for j, mat in payoff.bilinear:
        opp_set = [l for l, v in enumerate(profile.strategies[j]) if v]
        for k in own_set:
            row = mat[k]
            value += sum(row[l] for l in opp_set)
    return value


def evaluate_mixed(game: GameInstance, profile: MixedProfile, player: int) -> Fraction:
    """Exact expected payoff of `player` under independent mixed strategies.

    Computed in closed form through per-player mean vectors, which is valid
    because no payoff term multiplies two variables of the same player and
    players randomize independently.
    """
    _check_profile_dims(game, [s.support[0] for s in profile.strategies])
    for i, mixed in enumerate(profile.strategies):
        if abs(sum(mixed.probs) - 1) > game.tol:
            raise DistributionError(
                f"player {i}: probabilities sum to {float(sum(mixed.probs))}"
            )
    means = {j: profile[j].mean() for j in range(game.num_players)}
    obj, constant = payoff_against_means(
        game, player, {j: m for j, m in means.items() if j != player}
    )
    mu = means[player]
    return constant + sum(c * m for c, m in zip(obj, mu))


@dataclass(frozen=True)
class BinarizedInteger:
    """Binary encoding of a bounded integer variable.

    The encoded value is `lower + sum(weights[k] * bit[k])`; `constraint`
    (over the bits alone) cuts off codes that would exceed the upper bound.
    """

    lower: int
    upper: int
    num_vars: int
    weights: tuple
    constraint: LinearConstraint | None

    def decode(self, bits) -> int:
        if len(bits) != self.num_vars:
            raise DimensionError(f"expected {self.num_vars} bits, got {len(bits)}")
        return self.lower + sum(w * b for w, b in zip(self.weights, bits))

    def encode(self, value: int) -> tuple:
        if not self.lower <= value <= self.upper:
            raise ValueError(f"{value} outside [{self.lower}, {self.upper}]")
        code = value - self.lower
        return tuple((code >> k) & 1 for k in range(self.num_vars))

    def fragment(self) -> StrategySet:
        if self.num_vars == 0:
            raise ValueError("degenerate range encodes to zero variables")
        cons = (self.constraint,) if self.constraint is not None else ()
        return StrategySet(self.num_vars, cons)


def binarize_bounded_integer(lower: int, upper: int) -> BinarizedInteger:
    """Encode an integer in [lower, upper] with ceil(log2(range)) bits."""
    if lower > upper:
        raise ValueError(f"empty range [{lower}, {upper}]")
    span = upper - lower + 1
    bits = (span - 1).bit_length()
    weights = tuple(Fraction(2**k) for k in range(bits))
    constraint = None
    if bits:
        constraint = LinearConstraint(weights, "<=", Fraction(upper - lower))
    return BinarizedInteger(lower, upper, bits, weights, constraint)
