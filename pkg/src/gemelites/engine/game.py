"""Public engine API: game specs, states, actions, events.

`GameState` is a value: `apply` copies, advances and returns a new state
together with the emitted events, so any number of games or rollouts can
run in parallel as long as each owns its state and random stream. The hot
planner loops bypass these wrappers and call the kernel core directly on
the same buffers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..rng import Rng, derive_seed
from . import layout as L
from .backend import core
from .cards import (
    Card,
    Noble,
    generate_decks,
    load_game_assets,
    save_game_assets,
)
from .params import PRESET_PARAMS, GameParams, load_params, save_params


class IllegalActionError(ValueError):
    pass


class NotTerminalError(RuntimeError):
    pass


EVENT_NAMES = (
    "noble_take",
    "table_token_inc",
    "table_token_dec",
    "table_joker_inc",
    "table_joker_dec",
    "card_draw",
    "card_place",
    "noble_place",
    "player_token_inc",
    "player_token_dec",
    "player_joker_inc",
    "player_joker_dec",
    "reserve_hidden",
    "reserve_faceup",
    "noble_receive",
    "card_buy",
    "points_from_card",
    "points_from_noble",
)

ACTION_KINDS = (
    "pick_different",
    "pick_same",
    "reserve_faceup",
    "reserve_deck",
    "buy_faceup",
    "buy_reserved",
    "pass",
)

ENGINE = L.ENGINE

# Seeds for the built-in rule sets' procedural decks; pinned so the three
# named games are identical across runs and machines.
PRESET_DECK_SEEDS = {"SP2P": 101, "W2": 202, "1C2W": 303}
PRESET_VARIANTS = {"SP2P": "default", "W2": "default", "1C2W": "1C2W"}


@dataclass(frozen=True)
class Event:
    type_id: int
    who: int
    tick: int
    a: int = 0
    b: int = 0

    @property
    def name(self) -> str:
        return EVENT_NAMES[self.type_id]


@dataclass(frozen=True)
class Action:
    kind: str
    suits: tuple[int, ...] = ()          # pick_different
    suit: int = -1                       # pick_same
    deck: int = -1                       # reserve/buy face-up, reserve deck
    slot: int = -1                       # face-up slot
    index: int = -1                      # buy_reserved
    payment: tuple[int, ...] = ()        # per-suit tokens + jokers (buys)
    discards: tuple[int, ...] = ()       # per-suit tokens + jokers

    def to_buffer(self, spec: "GameSpec", ab: np.ndarray | None = None) -> np.ndarray:
        ntt = spec.params.token_types
        if ab is None:
            ab = spec.layout.new_action_buffer()
        else:
            ab[:] = 0
        kind_id = ACTION_KINDS.index(self.kind)
        ab[L.A_KIND] = kind_id
        if self.kind == "pick_different":
            mask = 0
            for s in self.suits:
                mask |= 1 << s
            ab[L.A_ARG1] = mask
        elif self.kind == "pick_same":
            ab[L.A_ARG1] = self.suit
        elif self.kind in ("reserve_faceup", "buy_faceup"):
            ab[L.A_ARG1] = self.deck
            ab[L.A_ARG2] = self.slot
        elif self.kind == "reserve_deck":
            ab[L.A_ARG1] = self.deck
        elif self.kind == "buy_reserved":
            ab[L.A_ARG1] = self.index
        pay = self.payment or (0,) * (ntt + 1)
        disc = self.discards or (0,) * (ntt + 1)
        if len(pay) != ntt + 1 or len(disc) != ntt + 1:
            raise IllegalActionError(
                f"payment/discards must have {ntt + 1} entries (suits + jokers)"
            )
        base = int(spec.layout.off[L.O_APAY])
        for i, v in enumerate(pay):
            ab[base + i] = v
        base = int(spec.layout.off[L.O_ADISC])
        for i, v in enumerate(disc):
            ab[base + i] = v
        return ab

    @classmethod
    def from_buffer(cls, spec: "GameSpec", ab: np.ndarray) -> "Action":
        ntt = spec.params.token_types
        kind = ACTION_KINDS[int(ab[L.A_KIND])]
        pay_base = int(spec.layout.off[L.O_APAY])
        disc_base = int(spec.layout.off[L.O_ADISC])
        payment = tuple(int(v) for v in ab[pay_base : pay_base + ntt + 1])
        discards = tuple(int(v) for v in ab[disc_base : disc_base + ntt + 1])
        kwargs: dict = {"kind": kind, "payment": payment, "discards": discards}
        if kind == "pick_different":
            mask = int(ab[L.A_ARG1])
            kwargs["suits"] = tuple(t for t in range(ntt) if (mask >> t) & 1)
        elif kind == "pick_same":
            kwargs["suit"] = int(ab[L.A_ARG1])
        elif kind in ("reserve_faceup", "buy_faceup"):
            kwargs["deck"] = int(ab[L.A_ARG1])
            kwargs["slot"] = int(ab[L.A_ARG2])
        elif kind == "reserve_deck":
            kwargs["deck"] = int(ab[L.A_ARG1])
        elif kind == "buy_reserved":
            kwargs["index"] = int(ab[L.A_ARG1])
        return cls(**kwargs)


class GameSpec:
    """A rule set plus its concrete decks and nobles, ready to simulate."""

    def __init__(self, params: GameParams, decks: list[list[Card]], nobles: list[Noble]):
        self.params = params
        self.layout = L.Layout(params, decks, nobles)
        self.decks = decks
        self.nobles = nobles
        self.ctx = self.layout.ctx
        self.off = self.layout.off

    @classmethod
    def preset(cls, name: str) -> "GameSpec":
        if name not in PRESET_PARAMS:
            raise ValueError(f"unknown game preset {name!r}; options: {sorted(PRESET_PARAMS)}")
        params = PRESET_PARAMS[name]()
        decks, nobles = generate_decks(PRESET_VARIANTS[name], params, PRESET_DECK_SEEDS[name])
        return cls(params, decks, nobles)

    @classmethod
    def generated(cls, variant: str, params: GameParams, seed: int) -> "GameSpec":
        decks, nobles = generate_decks(variant, params, seed)
        return cls(params, decks, nobles)

    @classmethod
    def from_directory(cls, directory: str | Path) -> "GameSpec":
        directory = Path(directory)
        params = load_params(directory / "parameters.json")
        decks, nobles = load_game_assets(directory, params)
        return cls(params, decks, nobles)

    def save_directory(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        save_params(self.params, directory / "parameters.json")
        save_game_assets(self.decks, self.nobles, directory, self.params.token_types)

    @property
    def encoding_length(self) -> int:
        return L.encoding_length(self.params)

    def max_events_per_action(self) -> int:
        return L.max_events_per_action(self.params)


@dataclass
class GameState:
    spec: GameSpec
    buf: np.ndarray = field(repr=False)

    # -- scalar views ------------------------------------------------
    @property
    def current_player(self) -> int:
        return int(self.buf[L.S_CUR])

    @property
    def tick(self) -> int:
        return int(self.buf[L.S_TICK])

    @property
    def final_round_triggered(self) -> bool:
        return bool(self.buf[L.S_FINAL])

    @property
    def is_over(self) -> bool:
        return bool(self.buf[L.S_OVER])

    # -- table views -------------------------------------------------
    @property
    def table_tokens(self) -> tuple[int, ...]:
        o = int(self.spec.off[L.O_TT])
        return tuple(int(v) for v in self.buf[o : o + self.spec.params.token_types])

    @property
    def table_jokers(self) -> int:
        return int(self.buf[int(self.spec.off[L.O_TJ])])

    def face_up_card(self, deck: int, slot: int) -> Card | None:
        fuc = self.spec.params.face_up
        cid = int(self.buf[int(self.spec.off[L.O_FU]) + deck * fuc + slot])
        return None if cid < 0 else self.spec.layout.card(cid)

    def deck_remaining(self, deck: int) -> int:
        bounds = self.spec.layout.deck_bounds()
        return bounds[deck + 1] - bounds[deck] - int(self.buf[int(self.spec.off[L.O_DP]) + deck])

    def nobles_on_table(self) -> list[Noble]:
        out = []
        for k in range(self.spec.params.table_nobles):
            if int(self.buf[int(self.spec.off[L.O_NO]) + k]) == -1:
                nid = int(self.buf[int(self.spec.off[L.O_NTID]) + k])
                out.append(self.spec.layout.noble(nid))
        return out

    # -- player views ------------------------------------------------
    def _pb(self, player: int) -> int:
        return int(self.spec.off[L.O_PL]) + player * int(self.spec.off[L.O_PS])

    def points(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_POINTS])])

    def player_tokens(self, player: int) -> tuple[int, ...]:
        o = self._pb(player) + int(self.spec.off[L.O_R_TOK])
        return tuple(int(v) for v in self.buf[o : o + self.spec.params.token_types])

    def player_jokers(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_JOKERS])])

    def bought_count(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_NB])])

    def bought_cards(self, player: int) -> list[Card]:
        pb = self._pb(player)
        n = self.bought_count(player)
        base = pb + int(self.spec.off[L.O_R_BID])
        return [self.spec.layout.card(int(self.buf[base + i])) for i in range(n)]

    def bought_suits(self, player: int) -> tuple[int, ...]:
        o = self._pb(player) + int(self.spec.off[L.O_R_BS])
        return tuple(int(v) for v in self.buf[o : o + self.spec.params.token_types])

    def bought_cost_total(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_CS])])

    def reserved_cards(self, player: int) -> list[tuple[Card, bool]]:
        pb = self._pb(player)
        n = int(self.buf[pb + int(self.spec.off[L.O_R_NR])])
        rid = pb + int(self.spec.off[L.O_R_RID])
        rhid = pb + int(self.spec.off[L.O_R_RHID])
        return [
            (self.spec.layout.card(int(self.buf[rid + r])), bool(self.buf[rhid + r]))
            for r in range(n)
        ]

    def attracted_nobles(self, player: int) -> list[Noble]:
        out = []
        for k in range(self.spec.params.table_nobles):
            if int(self.buf[int(self.spec.off[L.O_NO]) + k]) == player:
                nid = int(self.buf[int(self.spec.off[L.O_NTID]) + k])
                out.append(self.spec.layout.noble(nid))
        return out

    def coins_gained(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_COINS])])

    def reserve_actions(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_RACT])])

    def token_swaps(self, player: int) -> int:
        return int(self.buf[self._pb(player) + int(self.spec.off[L.O_R_SWAPS])])

    def copy(self) -> "GameState":
        return GameState(self.spec, self.buf.copy())


def new_game(spec: GameSpec, seed: int) -> GameState:
    """Fresh initial state with a deterministic seeded shuffle."""
    rng = Rng(derive_seed(seed, 0x5A11))
    buf = spec.layout.new_state_buffer()
    core.reset_state(buf, spec.ctx, spec.off, rng.state)
    return GameState(spec, buf)


def sample_action(state: GameState, rng: Rng) -> Action:
    if state.is_over:
        raise NotTerminalError("cannot sample an action in a terminal state")
    ab = state.spec.layout.new_action_buffer()
    core.sample_action(state.buf, state.spec.ctx, state.spec.off, rng.state, ab)
    return Action.from_buffer(state.spec, ab)

def is_legal(state: GameState, action: Action) -> bool:
    ab = action.to_buffer(state.spec)
    return bool(core.check_action(state.buf, state.spec.ctx, state.spec.off, ab))


def apply(state: GameState, action: Action) -> tuple[GameState, list[Event]]:
    """Pure forward step: the input state is never modified."""
    spec = state.spec
    ab = action.to_buffer(spec)
    eb = L.event_buffer(spec.max_events_per_action())
    out = state.copy()
    n = core.apply_action(out.buf, spec.ctx, spec.off, ab, eb, 0)
    if n < 0:
        raise IllegalActionError(
            f"illegal {action.kind} for player {state.current_player} "
            f"at tick {state.tick}: {action}"
        )
    return out, events_from_buffer(eb, 0, n)


def events_from_buffer(eb: np.ndarray, lo: int, hi: int) -> list[Event]:
    out = []
    for i in range(lo, hi):
        base = i * L.EVENT_W
        out.append(
            Event(
                type_id=int(eb[base]),
                who=int(eb[base + 1]),
                tick=int(eb[base + 2]),
                a=int(eb[base + 3]),
                b=int(eb[base + 4]),
            )
        )
    return out


def is_terminal(state: GameState) -> bool:
    return state.is_over


def result(state: GameState) -> tuple[float, ...]:
    """Per-player outcome. Single winner scores 1; ties on points are
    broken by fewer bought cards; residual ties split the win evenly."""
    if not state.is_over:
        raise NotTerminalError("result() requires a terminal state")
    n = state.spec.params.players
    ranking = [(-state.points(p), state.bought_count(p)) for p in range(n)]
    best = min(ranking)
    winners = [p for p in range(n) if ranking[p] == best]
    share = 1.0 / len(winners)
    return tuple(share if p in winners else 0.0 for p in range(n))


def random_playout(spec: GameSpec, seed: int, collect_events: bool = False):
    """Play one all-random game; mainly for tests and calibration.

    Returns (final_state, events) where events is None unless requested.
    """
    state = new_game(spec, seed)
    rng = Rng(derive_seed(seed, 0xF1A7))
    ab = spec.layout.new_action_buffer()
    cap = spec.max_events_per_action()
    eb = L.event_buffer(cap)
    collected: list[Event] | None = [] if collect_events else None
    while not state.is_over:
        n = core.advance_random(state.buf, spec.ctx, spec.off, rng.state, ab, eb, 0)
        if collected is not None:
            collected.extend(events_from_buffer(eb, 0, n))
    return state, collected
