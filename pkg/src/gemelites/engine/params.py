"""Game rule parameters and the three built-in rule sets.

Every rule knob of the Splendor-like family lives here; the engine itself
contains no game-specific constants. Parameter files are plain JSON using
the short keys listed in `_JSON_KEYS` (`P`, `nTT`, `maxT`, ...).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path


class ParamsError(ValueError):
    pass


@dataclass(frozen=True)
class GameParams:
    players: int = 4
    token_types: int = 5
    joker_count: int = 5
    decks: int = 3
    face_up: int = 4
    extra_nobles: int = 1
    max_tokens: int = 10
    max_reserved: int = 3
    end_points: int = 15
    pick_diff_types: int = 3
    pick_diff_per_type: int = 1
    pick_same_amount: int = 2
    pick_same_min: int = 4
    tokens_per_suit: int = 7
    # Optional overrides; None means "use the derived default".
    noble_count: int | None = None
    max_ticks: int | None = None

    @property
    def table_nobles(self) -> int:
        """Nobles placed on the table: players + extra unless overridden."""
        if self.noble_count is not None:
            return self.noble_count
        return self.players + self.extra_nobles

    @property
    def tick_limit(self) -> int:
        """Hard turn cap so purely random play cannot stall a game forever."""
        if self.max_ticks is not None:
            return self.max_ticks
        return 100 * self.players

    def validate(self) -> None:
        p = self
        problems = []
        counts = {
            "players": p.players,
            "token_types": p.token_types,
            "joker_count": p.joker_count,
            "decks": p.decks,
            "face_up": p.face_up,
            "extra_nobles": p.extra_nobles,
            "max_tokens": p.max_tokens,
            "max_reserved": p.max_reserved,
            "pick_diff_types": p.pick_diff_types,
            "pick_diff_per_type": p.pick_diff_per_type,
            "pick_same_amount": p.pick_same_amount,
            "pick_same_min": p.pick_same_min,
            "tokens_per_suit": p.tokens_per_suit,
        }
        for name, value in counts.items():
            if value < 0:
                problems.append(f"{name} must be >= 0, got {value}")
        if p.players < 2:
            problems.append(f"players must be >= 2, got {p.players}")
        if p.token_types > 30:
            problems.append("token_types must be <= 30 (suit sets are int32 bitmasks)")
        if p.pick_diff_types > p.token_types:
            problems.append("pick_diff_types cannot exceed token_types")
        if p.face_up < 1:
            problems.append(f"face_up must be >= 1, got {p.face_up}")
        if p.end_points <= 0:
            problems.append(f"end_points must be > 0, got {p.end_points}")
        if p.decks < 1:
            problems.append(f"decks must be >= 1, got {p.decks}")
        if p.noble_count is not None and p.noble_count < 0:
            problems.append("noble_count override must be >= 0")
        if p.max_ticks is not None and p.max_ticks < p.players:
            problems.append("max_ticks must allow at least one round")
        if problems:
            raise ParamsError("; ".join(problems))


_JSON_KEYS = {
    "P": "players",
    "nTT": "token_types",
    "nJT": "joker_count",
    "D": "decks",
    "FUC": "face_up",
    "EN": "extra_nobles",
    "maxT": "max_tokens",
    "maxRC": "max_reserved",
    "PP": "end_points",
    "nTTPD": "pick_diff_types",
    "nTPD": "pick_diff_per_type",
    "nTPS": "pick_same_amount",
    "minTPS": "pick_same_min",
    "tokensPerSuit": "tokens_per_suit",
    "nobleCount": "noble_count",
    "maxTicks": "max_ticks",
}
_FIELD_TO_KEY = {v: k for k, v in _JSON_KEYS.items()}


def params_to_dict(params: GameParams) -> dict:
    out = {}
    for key, field in _JSON_KEYS.items():
        value = getattr(params, field)
        if value is None:
            continue
        out[key] = value
    return out


def params_from_dict(data: dict) -> GameParams:
    unknown = sorted(set(data) - set(_JSON_KEYS))
    if unknown:
        raise ParamsError(f"unknown parameter keys: {', '.join(unknown)}")
    kwargs = {_JSON_KEYS[k]: v for k, v in data.items()}
    params = GameParams(**kwargs)
    params.validate()
    return params


def save_params(params: GameParams, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), indent=2) + "\n")


def load_params(path: str | Path) -> GameParams:
    return params_from_dict(json.loads(Path(path).read_text()))


def sp2p_params() -> GameParams:
    """Standard two-player rules: 5 tokens per suit, 3 nobles on the table."""
    return GameParams(players=2, tokens_per_suit=5)


def w2_params() -> GameParams:
    """Loosened "wacky" rules: deep token stacks, a 20-token hand limit,
    pick two-of-different or three-of-same with no stack minimum, one noble."""
    return GameParams(
        players=2,
        tokens_per_suit=10,
        max_tokens=20,
        pick_diff_types=2,
        pick_diff_per_type=1,
        pick_same_amount=3,
        pick_same_min=0,
        noble_count=1,
    )


def one_card_params() -> GameParams:
    """Rules for the single-decisive-card decks; identical to sp2p, the
    variant lives entirely in the deck generator."""
    return GameParams(players=2, tokens_per_suit=5)


PRESET_PARAMS = {
    "SP2P": sp2p_params,
    "W2": w2_params,
    "1C2W": one_card_params,
}


def with_overrides(params: GameParams, **kwargs) -> GameParams:
    out = replace(params, **kwargs)
    out.validate()
    return out
