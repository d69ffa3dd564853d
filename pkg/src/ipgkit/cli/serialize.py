"""Instance and result documents: strict JSON with exact rationals.

Rationals are emitted as plain ints when integral and as "p/q" strings
otherwise, and are parsed from ints, "p/q" or decimal strings, and JSON
decimals (read exactly, 0.1 means 1/10). Unknown fields are rejected so
typos fail loudly, and emission is canonical: sorted keys, two-space
indent, trailing newline.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

from ..cng import CngInstance, to_game_instance
from ..errors import InstanceFormatError
from ..game import (
    GameInstance,
    LinearConstraint,
    MixedProfile,
    MixedStrategy,
    PayoffSpec,
    PureProfile,
    StrategySet,
)
from ..rational import as_fraction, format_fraction

RESULT_STATUSES = ("eq", "pureEq", "noPureEq", "timeLimit", "iterLimit", "opt", "error")
_WITH_PAYLOAD = ("eq", "pureEq", "opt")


def _num(value, where):
    try:
        return as_fraction(value)
    except (ValueError, TypeError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise InstanceFormatError(f"{where}: unknown fields {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise InstanceFormatError(f"{where}: missing fields {sorted(missing)}")


@dataclass(frozen=True)
class LoadedInstance:
    game: GameInstance
    cng: CngInstance | None = None


def _constraint_to_dict(con: LinearConstraint) -> dict:
    return {
        "coeffs": [format_fraction(c) for c in con.coeffs],
        "sense": con.sense,
        "rhs": format_fraction(con.rhs),
    }


def _constraint_from_dict(d, where) -> LinearConstraint:
    _check_keys(d, ("coeffs", "sense", "rhs"), ("coeffs", "sense", "rhs"), where)
    if d["sense"] not in ("<=", ">=", "="):
        raise InstanceFormatError(f"{where}: unknown sense {d['sense']!r}")
    return LinearConstraint(
        tuple(_num(c, where) for c in d["coeffs"]),
        d["sense"],
        _num(d["rhs"], where),
    )


def _payoff_to_dict(payoff: PayoffSpec) -> dict:
    out = {
        "constant": format_fraction(payoff.constant),
        "ownLinear": [format_fraction(c) for c in payoff.own_linear],
    }
    if payoff.opp_linear:
        out["oppLinear"] = {
            str(j): [format_fraction(c) for c in vec] for j, vec in payoff.opp_linear
        }
    if payoff.bilinear:
        out["bilinear"] = {
            str(j): [[format_fraction(c) for c in row] for row in mat]
            for j, mat in payoff.bilinear
        }
    return out


def _payoff_from_dict(d, where) -> PayoffSpec:
    _check_keys(
        d,
        ("constant", "ownLinear", "oppLinear", "bilinear"),
        ("constant", "ownLinear"),
        where,
    )
    opp = {}
    for j, vec in (d.get("oppLinear") or {}).items():
        opp[int(j)] = tuple(_num(c, where) for c in vec)
    bil = {}
    for j, mat in (d.get("bilinear") or {}).items():
        bil[int(j)] = tuple(tuple(_num(c, where) for c in row) for row in mat)
    return PayoffSpec(_num(d["constant"], where), tuple(_num(c, where) for c in d["ownLinear"]), opp, bil)


def _cng_to_dict(c: CngInstance) -> dict:
    return {
        "pd": [format_fraction(v) for v in c.pd],
        "pa": [format_fraction(v) for v in c.pa],
        "d": list(c.d),
        "a": list(c.a),
        "D": c.defense_budget,
        "A": c.attack_budget,
        "delta": format_fraction(c.delta),
        "eta": format_fraction(c.eta),
        "epsilon": format_fraction(c.eps),
        "gamma": format_fraction(c.gamma),
    }


def _cng_from_dict(d, name, where) -> CngInstance:
    keys = ("pd", "pa", "d", "a", "D", "A", "delta", "eta", "epsilon", "gamma")
    _check_keys(d, keys, keys, where)
    try:
        return CngInstance(
            tuple(_num(v, where) for v in d["pd"]),
            tuple(_num(v, where) for v in d["pa"]),
            tuple(int(v) for v in d["d"]),
            tuple(int(v) for v in d["a"]),
            int(d["D"]),
            int(d["A"]),
            _num(d["delta"], where),
            _num(d["eta"], where),
            _num(d["epsilon"], where),
            _num(d["gamma"], where),
            name=name,
        )
    except ValueError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc


def instance_to_dict(game: GameInstance, cng: CngInstance | None = None) -> dict:
    doc = {
        "name": game.name,
        "players": [
            {
                "numVars": sset.num_vars,
                "constraints": [_constraint_to_dict(c) for c in sset.constraints],
                "payoff": _payoff_to_dict(payoff),
            }
            for sset, payoff in game.players
        ],
    }
    if cng is not None:
        doc["cng"] = _cng_to_dict(cng)
    return doc


def instance_from_dict(doc) -> LoadedInstance:
    _check_keys(doc, ("name", "players", "cng"), ("name", "players"), "instance")
    if not isinstance(doc["players"], list) or len(doc["players"]) < 2:
        raise InstanceFormatError("instance: needs at least two players")
    players = []
    for i, pd in enumerate(doc["players"]):
        where = f"players[{i}]"
        _check_keys(pd, ("numVars", "constraints", "payoff"), ("numVars", "payoff"), where)
        try:
            sset = StrategySet(
                int(pd["numVars"]),
                tuple(
                    _constraint_from_dict(c, f"{where}.constraints[{k}]")
                    for k, c in enumerate(pd.get("constraints") or [])
                ),
            )
            players.append((sset, _payoff_from_dict(pd["payoff"], f"{where}.payoff")))
        except (ValueError, TypeError) as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"{where}: {exc}") from exc
    try:
        game = GameInstance(tuple(players), name=str(doc["name"]))
    except ValueError as exc:
        raise InstanceFormatError(f"instance: {exc}") from exc
    cng = None
    if "cng" in doc:
        cng = _cng_from_dict(doc["cng"], str(doc["name"]), "cng")
        expanded = to_game_instance(cng)
        if expanded.players != game.players:
            raise InstanceFormatError(
                "cng: players section does not match the expansion of the "
                "cng parameters"
            )
    return LoadedInstance(game, cng)


def dumps_instance(game: GameInstance, cng: CngInstance | None = None) -> str:
    return json.dumps(instance_to_dict(game, cng), indent=2, sort_keys=True) + "\n"


def loads_instance(text: str) -> LoadedInstance:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(doc)


def load_instance(path) -> LoadedInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_instance(fh.read())


def save_instance(path, game: GameInstance, cng: CngInstance | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(game, cng))


def profile_payload(profile) -> dict:
    if isinstance(profile, PureProfile):
        return {"pure": [list(s) for s in profile.strategies]}
    return {
        "mixed": [
            {
                "support": [list(s) for s in side.support],
                "probs": [format_fraction(p) for p in side.probs],
            }
            for side in profile.strategies
        ]
    }


def payload_to_profile(payload):
    if payload is None:
        return None
    if "pure" in payload:
        return PureProfile(tuple(tuple(s) for s in payload["pure"]))
    return MixedProfile(
        tuple(
            MixedStrategy(
                tuple(tuple(s) for s in side["support"]),
                tuple(as_fraction(p) for p in side["probs"]),
            )
            for side in payload["mixed"]
        )
    )


@dataclass(frozen=True)
class ResultRecord:
    """One solver outcome, ready for machine-readable emission."""

    instance: str
    algo: str
    status: str
    payload: dict | None = None
    epsilon: Fraction | None = None
    wall_time: float = 0.0
    iterations: int | None = None
    pos: Fraction | None = None
    message: str = ""

    def __post_init__(self):
        if self.status not in RESULT_STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status in _WITH_PAYLOAD and self.payload is None:
            raise ValueError(f"status {self.status} requires a payload")
        if self.status in ("noPureEq", "error") and self.payload is not None:
            raise ValueError(f"status {self.status} carries no payload")

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "algo": self.algo,
            "status": self.status,
            "payload": self.payload,
            "epsilon": None if self.epsilon is None else format_fraction(self.epsilon),
            "wallTime": round(self.wall_time, 6),
            "iterations": self.iterations,
            "pos": None if self.pos is None else format_fraction(self.pos),
            "message": self.message,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
