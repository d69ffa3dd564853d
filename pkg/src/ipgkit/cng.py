"""Critical-node defender-attacker games: the simultaneous game over shared
resources, its sequential leader-follower counterpart, synthetic instance
generation, and the price-of-stability metric.

Per resource, the four outcome cases (idle, successful attack, mitigated
attack, idle protection) expand into constant, linear, and diagonal
bilinear payoff coefficients, so the simultaneous game fits the bilinear
game model exactly.
"""

import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .errors import EnumerationCapError
from .game import (
    GameInstance,
    LinearConstraint,
    PayoffSpec,
    PureProfile,
    StrategySet,
)
from .kernel import INFEASIBLE, KnapsackProblem, solve_knapsack, solve_milp
from .rational import as_fraction, as_fraction_vector, fraction_ceil
from .zero_regrets import SelectionFunction, build_master_milp

DEFENDER, ATTACKER = 0, 1


@dataclass(frozen=True)
class CngInstance:
    """Resources with per-player criticality, selection costs, budgets, and
    the four outcome factors delta < eta < eps (plus opportunity factor gamma)."""

    pd: tuple
    pa: tuple
    d: tuple
    a: tuple
    defense_budget: int
    attack_budget: int
    delta: Fraction
    eta: Fraction
    eps: Fraction
    gamma: Fraction
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pd", as_fraction_vector(self.pd))
        object.__setattr__(self, "pa", as_fraction_vector(self.pa))
        object.__setattr__(self, "d", tuple(int(v) for v in self.d))
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "defense_budget", int(self.defense_budget))
        object.__setattr__(self, "attack_budget", int(self.attack_budget))
        for field in ("delta", "eta", "eps", "gamma"):
            object.__setattr__(self, field, as_fraction(getattr(self, field)))
        n = len(self.pd)
        if n < 1:
            raise ValueError("at least one resource required")
        if not (len(self.pa) == len(self.d) == len(self.a) == n):
            raise ValueError("per-resource vectors differ in length")
        if any(v <= 0 for v in self.pd) or any(v <= 0 for v in self.pa):
            raise ValueError("criticality weights must be positive")
        if any(v <= 0 for v in self.d) or any(v <= 0 for v in self.a):
            raise ValueError("selection costs must be positive")
        if self.defense_budget < 0 or self.attack_budget < 0:
            raise ValueError("budgets must be nonnegative")
        for field in ("delta", "eta", "eps", "gamma"):
            v = getattr(self, field)
            if not 0 <= v <= 1:
                raise ValueError(f"{field} must lie in [0, 1]")
        if not self.delta < self.eta < self.eps:
            raise ValueError("factors must satisfy delta < eta < eps")

    @property
    def resource_count(self) -> int:
        return len(self.pd)


def to_game_instance(c: CngInstance) -> GameInstance:
    """Expand the four-case payoffs into the bilinear game model.

    Defender (owns x): sum pd_i * (1 + (eps-1) x_i + (delta-1) a_i
    + (1+eta-eps-delta) x_i a_i); attacker (owns alpha): sum pa_i *
    (-gamma + gamma x_i + (1+gamma) a_i - (gamma+eta) x_i a_i). Budgets are
    single knapsack rows, so best responses dispatch to the knapsack solver.
    """
    n = c.resource_count
    zero = Fraction(0)
    def_diag = Fraction(1) + c.eta - c.eps - c.delta
    att_diag = -(c.gamma + c.eta)
    defender = PayoffSpec(
        constant=sum(c.pd),
        own_linear=tuple((c.eps - 1) * p for p in c.pd),
        opp_linear={ATTACKER: tuple((c.delta - 1) * p for p in c.pd)},
        bilinear={
            ATTACKER: tuple(
                tuple(def_diag * c.pd[i] if i == j else zero for j in range(n))
                for i in range(n)
            )
        },
    )
    attacker = PayoffSpec(
        constant=-c.gamma * sum(c.pa),
        own_linear=tuple((1 + c.gamma) * p for p in c.pa),
        opp_linear={DEFENDER: tuple(c.gamma * p for p in c.pa)},
        bilinear={
            DEFENDER: tuple(
                tuple(att_diag * c.pa[i] if i == j else zero for j in range(n))
                for i in range(n)
            )
        },
    )
    return GameInstance(
        (
            (
                StrategySet(n, (LinearConstraint(c.d, "<=", c.defense_budget),)),
                defender,
            ),
            (
                StrategySet(n, (LinearConstraint(c.a, "<=", c.attack_budget),)),
                attacker,
            ),
        ),
        name=c.name or "cng",
    )


def defender_value(c: CngInstance, x, alpha) -> Fraction:
    """Defender payoff of a joint outcome, from the expanded coefficients."""
    game = to_game_instance(c)
    return _pure_value(game, x, alpha, DEFENDER)


def _pure_value(game, x, alpha, player):
    from .game import evaluate_pure

    return evaluate_pure(game, PureProfile((tuple(x), tuple(alpha))), player)


def _attacker_profits(c: CngInstance, x):
    """Attacker's per-resource profit given the defense, and the defender's
    per-resource payoff change if that resource is attacked."""
    primary = []
    secondary = []
    for i in range(c.resource_count):
        if x[i]:
            primary.append((1 - c.eta) * c.pa[i])
            secondary.append((c.eta - c.eps) * c.pd[i])
        else:
            primary.append((1 + c.gamma) * c.pa[i])
            secondary.append((c.delta - 1) * c.pd[i])
    return tuple(primary), tuple(secondary)


@dataclass(frozen=True)
class McnpResult:
    defense: tuple
    attack: tuple
    leader_value: Fraction
    timed_out: bool = False


def solve_mcnp(
    c: CngInstance,
    tie_break: str = "optimistic",
    max_resources: int = 22,
    deadline: float | None = None,
) -> McnpResult:
    """Sequential play: enumerate budget-feasible defenses depth-first, let
    the attacker respond through the two-criteria knapsack, keep the best.

    `tie_break` picks how the attacker resolves ties among its optimal
    attacks: `optimistic` favors the defender, `pessimistic` hurts it. Ties
    on the leader value keep the lexicographically smallest defense.
    """
    if tie_break not in ("optimistic", "pessimistic"):
        raise ValueError(f"unknown tie break {tie_break!r}")
    n = c.resource_count
    if n > max_resources:
        raise EnumerationCapError(
            f"{n} resources exceed the leader enumeration cap of {max_resources}"
        )
    game = to_game_instance(c)
    best = None
    timed_out = False
    x = [0] * n
    counter = 0

    def attacker_reply(defense):
        primary, secondary = _attacker_profits(c, defense)
        if tie_break == "pessimistic":
            secondary = tuple(-v for v in secondary)
        res = solve_knapsack(
            KnapsackProblem(c.a, c.attack_budget, primary, secondary)
        )
        return res.selection

    def visit(idx, remaining):
        nonlocal best, timed_out, counter
        if timed_out:
            return
        if idx == n:
            counter += 1
            if deadline is not None and counter % 64 == 0 and time.monotonic() >= deadline:
                timed_out = True
                return
            defense = tuple(x)
            attack = attacker_reply(defense)
            value = _pure_value(game, defense, attack, DEFENDER)
            if best is None or value > best[0]:
                best = (value, defense, attack)
            return
        x[idx] = 0
        visit(idx + 1, remaining)
        if c.d[idx] <= remaining:
            x[idx] = 1
            visit(idx + 1, remaining - c.d[idx])
            x[idx] = 0

    visit(0, c.defense_budget)
    if best is None:
        # The all-zero defense is always budget feasible.
        raise AssertionError("leader enumeration visited no defense")
    value, defense, attack = best
    return McnpResult(defense, attack, value, timed_out)


def price_of_stability(c: CngInstance, solution) -> Fraction:
    """Best joint-feasible defender payoff divided by the defender payoff of
    the given budget-feasible outcome (x, alpha)."""
    x, alpha = (tuple(solution[0]), tuple(solution[1]))
    game = to_game_instance(c)
    from .game import is_feasible

    if not is_feasible(game.strategy_set(DEFENDER), x) or not is_feasible(
        game.strategy_set(ATTACKER), alpha
    ):
        raise ValueError("solution violates a budget constraint")
    denominator = _pure_value(game, x, alpha, DEFENDER)
    if denominator <= 0:
        raise ValueError(
            f"defender payoff {denominator} is not positive; ratio undefined"
        )
    h = SelectionFunction.player_payoff(game, DEFENDER)
    problem, layout = build_master_milp(game, h)
    res = solve_milp(problem)
    if res.status == INFEASIBLE:
        raise AssertionError("joint budget box cannot be empty")
    best = h.value_at(
        PureProfile(
            (
                tuple(int(res.point[layout.column(DEFENDER, k)]) for k in range(c.resource_count)),
                tuple(int(res.point[layout.column(ATTACKER, k)]) for k in range(c.resource_count)),
            )
        )
    )
    return best / denominator


@dataclass(frozen=True)
class GeneratorProfile:
    """Parameter ranges for synthetic instances."""

    criticality_range: tuple = (1, 100)
    cost_range: tuple = (1, 25)
    budget_ratios: tuple = (Fraction(3, 10), Fraction(9, 20), Fraction(3, 5))
    factor_denominator: int = 1000
    gamma_max: Fraction = Fraction(3, 10)


def generate_instances(
    size: int, count: int, seed: int, profile: GeneratorProfile | None = None
) -> list:
    """Deterministic synthetic instances: the stream depends only on
    (seed, size, index), so regeneration is reproducible and prefixes agree
    across different counts."""
    profile = profile or GeneratorProfile()
    out = []
    for index in range(count):
        rng = random.Random()
        rng.seed(seed * 1_000_003 + size * 10_007 + index)
        lo, hi = profile.criticality_range
        pd = tuple(rng.randint(lo, hi) for _ in range(size))
        pa = tuple(rng.randint(lo, hi) for _ in range(size))
        clo, chi = profile.cost_range
        d = tuple(rng.randint(clo, chi) for _ in range(size))
        a = tuple(rng.randint(clo, chi) for _ in range(size))
        rho_d = rng.choice(profile.budget_ratios)
        rho_a = rng.choice(profile.budget_ratios)
        defense_budget = fraction_ceil(rho_d * sum(d))
        attack_budget = fraction_ceil(rho_a * sum(a))
        den = profile.factor_denominator
        while True:
            draws = sorted(Fraction(rng.randint(0, den), den) for _ in range(3))
            if draws[0] < draws[1] < draws[2]:
                delta, eta, eps = draws
                break
        gamma = Fraction(
            rng.randint(0, int(profile.gamma_max * den)), den
        )
        out.append(
            CngInstance(
                pd,
                pa,
                d,
                a,
                defense_budget,
                attack_budget,
                delta,
                eta,
                eps,
                gamma,
                name=f"cng_{size}_{seed}_{index}",
            )
        )
    return out
