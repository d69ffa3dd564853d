"""Dispatch one algorithm run on one loaded instance into a ResultRecord."""

import time
from fractions import Fraction

from ..cng import price_of_stability, solve_mcnp
from ..errors import IpgError
from ..game import MixedProfile, PureProfile
from ..sgm import EQUILIBRIUM as SGM_EQUILIBRIUM
from ..sgm import ITERATION_LIMIT as SGM_ITERATION_LIMIT
from ..sgm import solve_sgm
from ..zero_regrets import (
    ITERATION_LIMIT,
    NO_PURE_NE,
    OPTIMAL_PURE_NE,
    SelectionFunction,
    solve_zero_regrets,
)
from .serialize import LoadedInstance, ResultRecord, profile_payload

ALGORITHMS = ("sgm", "zeror", "mcnp")


def parse_selection(game, spec: str) -> SelectionFunction:
    if spec == "welfare":
        return SelectionFunction.welfare(game)
    if spec.startswith("player:"):
        try:
            player = int(spec.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad selection {spec!r}; use welfare or player:i")
        if not 0 <= player < game.num_players:
            raise ValueError(f"selection player {player} out of range")
        return SelectionFunction.player_payoff(game, player)
    raise ValueError(f"bad selection {spec!r}; use welfare or player:i")


def _maybe_pos(doc: LoadedInstance, profile) -> Fraction | None:
    """Price of stability for pure joint outcomes of critical-node instances."""
    if doc.cng is None or profile is None:
        return None
    if isinstance(profile, MixedProfile):
        if not profile.is_degenerate():
            return None
        profile = profile.to_pure()
    try:
        return price_of_stability(doc.cng, profile.strategies)
    except ValueError:
        return None


def run_algorithm(
    doc: LoadedInstance,
    algo: str,
    selection: str = "welfare",
    time_limit: float | None = None,
    max_iterations: int = 1000,
    tie_break: str = "optimistic",
) -> ResultRecord:
    """Run one solver on one instance and normalize the outcome."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    game = doc.game
    name = game.name
    deadline = None if time_limit is None else time.monotonic() + time_limit
    started = time.perf_counter()

    if algo == "mcnp":
        if doc.cng is None:
            raise ValueError("mcnp requires cng section")
        res = solve_mcnp(doc.cng, tie_break=tie_break, deadline=deadline)
        profile = PureProfile((res.defense, res.attack))
        return ResultRecord(
            instance=name,
            algo=algo,
            status="timeLimit" if res.timed_out else "opt",
            payload=profile_payload(profile),
            epsilon=None,
            wall_time=time.perf_counter() - started,
            iterations=None,
            pos=_maybe_pos(doc, profile),
        )

    if algo == "zeror":
        h = parse_selection(game, selection)
        res = solve_zero_regrets(
            game,
            h,
            max_iterations=max_iterations,
            epsilon_track=True,
            deadline=deadline,
        )
        status = {
            OPTIMAL_PURE_NE: "pureEq",
            NO_PURE_NE: "noPureEq",
            ITERATION_LIMIT: "iterLimit",
        }.get(res.status, "timeLimit")
        return ResultRecord(
            instance=name,
            algo=algo,
            status=status,
            payload=None if res.profile is None else profile_payload(res.profile),
            epsilon=res.epsilon,
            wall_time=time.perf_counter() - started,
            iterations=res.iterations,
            pos=_maybe_pos(doc, res.profile),
        )

    res = solve_sgm(game, max_iterations=max_iterations, deadline=deadline)
    status = {
        SGM_EQUILIBRIUM: "eq",
        SGM_ITERATION_LIMIT: "iterLimit",
    }.get(res.status, "timeLimit")
    return ResultRecord(
        instance=name,
        algo=algo,
        status=status,
        payload=None if res.profile is None else profile_payload(res.profile),
        epsilon=res.epsilon,
        wall_time=time.perf_counter() - started,
        iterations=res.iterations,
        pos=_maybe_pos(doc, res.profile),
    )


def run_safely(doc: LoadedInstance, algo: str, **kwargs) -> ResultRecord:
    """Like run_algorithm, but turns failures into error rows."""
    started = time.perf_counter()
    try:
        return run_algorithm(doc, algo, **kwargs)
    except (IpgError, ValueError, AssertionError) as exc:
        return ResultRecord(
            instance=doc.game.name,
            algo=algo,
            status="error",
            wall_time=time.perf_counter() - started,
            message=str(exc),
        )
