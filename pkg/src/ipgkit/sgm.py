"""Sampled generation method: grow an inner approximation of each player's
strategy set from best responses, solve the sampled game by support
enumeration, and certify candidates against the full game.

Mixed play is implemented for two players, where the per-support systems
are linear. Samples only ever grow, and every sampled strategy is feasible,
so membership never needs re-checking.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

from ._support import payoff_matrices_2p, solve_support_pair, support_pairs
from .errors import SolverInternalError
from .game import GameInstance, MixedProfile, PureProfile, is_feasible
from .oracle import best_response, epsilon_of, improve

EQUILIBRIUM = "equilibrium"
ITERATION_LIMIT = "iteration_limit"
TIME_LIMIT = "time_limit"


class SampledGame:
    """Mutable inner approximation: per-player lists of sampled strategies."""

    def __init__(self, game: GameInstance):
        if game.num_players != 2:
            raise ValueError("the sampled solver handles two-player games only")
        self.game = game
        self.samples = [[], []]
        self.iteration = 0
        self.history = []

    def add(self, player: int, strategy) -> bool:
        strategy = tuple(strategy)
        if strategy in self.samples[player]:
            return False
        if not is_feasible(self.game.strategy_set(player), strategy):
            raise SolverInternalError(
                f"attempted to sample infeasible strategy {strategy} for "
                f"player {player}"
            )
        self.samples[player].append(strategy)
        self.history.append((self.iteration, player, strategy))
        return True


def initialize_sample(game: GameInstance) -> SampledGame:
    """Seed each player's sample with its best response to all-zero opponents.

    The zero profile need not be feasible for the opponents; only its payoff
    contribution matters.
    """
    sampled = SampledGame(game)
    zeros = PureProfile(tuple((0,) * game.num_vars(i) for i in range(2)))
    for i in range(2):
        strategy, _ = best_response(game, i, zeros)
        sampled.add(i, strategy)
    return sampled


def play_sampled(sampled: SampledGame) -> MixedProfile:
    """A mixed equilibrium of the sampled game.

    Walks support pairs smallest-first and returns the first pair whose
    best-response feasibility system has a solution. A finite two-player
    game always has one, so running out of supports is an internal bug.
    """
    s0, s1 = sampled.samples
    if not s0 or not s1:
        raise SolverInternalError("play phase reached with an empty sample")
    p0, p1, sc0, sc1 = payoff_matrices_2p(sampled.game, s0, s1)
    for sup0, sup1 in support_pairs(len(s0), len(s1)):
        got = solve_support_pair(p0, p1, sc0, sc1, s0, s1, sup0, sup1)
        if got is not None:
            return got[0]
    raise SolverInternalError("sampled game has no equilibrium over any support")


@dataclass(frozen=True)
class SgmResult:
    status: str
    profile: MixedProfile | None
    iterations: int
    epsilon: Fraction | None


def solve_sgm(
    game: GameInstance,
    max_iterations: int = 100,
    deadline: float | None = None,
) -> SgmResult:
    """Iterate play and improvement until the sampled equilibrium survives
    certification against the full game.

    On the iteration or time limit, returns the last sampled-game
    equilibrium together with its exact approximation slack.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    sampled = initialize_sample(game)
    last = None
    for iteration in range(1, max_iterations + 1):
        if deadline is not None and time.monotonic() >= deadline:
            eps = epsilon_of(game, last) if last is not None else None
            return SgmResult(TIME_LIMIT, last, iteration - 1, eps)
        sampled.iteration = iteration
        profile = play_sampled(sampled)
        last = profile
        verdict = improve(game, profile)
        if verdict.is_equilibrium:
            return SgmResult(EQUILIBRIUM, profile, iteration, verdict.worst_violation)
        grew = False
        for dev in verdict.deviations:
            grew = sampled.add(dev.player, dev.strategy) or grew
        if not grew:
            raise SolverInternalError(
                "improvement step produced no unsampled deviation; the play "
                "phase returned a non-equilibrium of the sampled game"
            )
    return SgmResult(ITERATION_LIMIT, last, max_iterations, epsilon_of(game, last))
