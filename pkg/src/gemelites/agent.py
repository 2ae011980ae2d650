"""Branching-mutation rolling-horizon planner and game players.

The planner evolves one action sequence under a forward-model call budget
with a (1+1) scheme: evaluate the incumbent, mutate, keep the candidate on
ties or improvement. The mutation re-rolls a portion of the sequence; the
re-rolled actions are sampled legally along the re-simulated branch, and
stale stored actions are repaired the same way at replay time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import layout as L
from .engine.backend import core
from .engine.game import (
    GameSpec,
    GameState,
    IllegalActionError,
    events_from_buffer,
    new_game,
)
from .rng import Rng, derive_seed

# Hyperparameter grids, in genome order.
HP_GRIDS: dict[str, tuple] = {
    "l": (1, 2, 3, 5, 10, 20),
    "n": (20, 50, 100, 200),
    "usb": (False, True),
    "mo": (False, True),
    "ms": (0, 1, 2),
    "om": (0, 1, 2),
    "ombs": (0.005, 0.01, 0.02, 0.05),
    "dcy": (0.5, 0.7, 0.8, 0.9),
    "mu": (0.0, 0.1, 0.3, 0.5, 0.75),
    "sigma": (0.5, 1.0, 2.0),
}
HP_NAMES = tuple(HP_GRIDS)

# Mutation types: 0 re-samples a single uniform position, 1 rolls the
# suffix from a gaussian start point, 2 rolls the suffix from a geometric
# start point (continue probability dcy).
MS_SINGLE, MS_GAUSSIAN, MS_GEOMETRIC = 0, 1, 2
# Opponent models: random move, no-op, or greedy one-step lookahead with
# the planner's own heuristic (lookahead advances come from the ombs share
# of the budget).
OM_RANDOM, OM_NOOP, OM_GREEDY = 0, 1, 2

DEFAULT_BUDGET = 1000


@dataclass(frozen=True)
class BmrhConfig:
    l: int = 5
    n: int = 50
    usb: bool = True
    mo: bool = True
    ms: int = MS_GEOMETRIC
    om: int = OM_RANDOM
    ombs: float = 0.01
    dcy: float = 0.8
    mu: float = 0.0
    sigma: float = 1.0

    def validate(self) -> None:
        for name in HP_NAMES:
            value = getattr(self, name)
            if value not in HP_GRIDS[name]:
                raise ValueError(
                    f"{name}={value!r} is not in its value grid {HP_GRIDS[name]}"
                )

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in HP_NAMES}


# Fixed tuned opponent configuration (paired with the point-based
# heuristic); serialized into every run's opponents document.
BMRH_STAR_CONFIG = BmrhConfig(
    l=3, n=50, usb=True, mo=True, ms=MS_GEOMETRIC, om=OM_RANDOM,
    ombs=0.01, dcy=0.8, mu=0.0, sigma=1.0,
)


class BmrhPlanner:
    """One planner instance per player per game; owns all its scratch."""

    def __init__(self, spec: GameSpec, cfg: BmrhConfig, evaluator, budget: int = DEFAULT_BUDGET):
        self.spec = spec
        self.cfg = cfg
        self.evaluator = evaluator
        self.budget = budget
        aw = spec.layout.action_width
        l = cfg.l
        self._seq = np.zeros((l, aw), dtype=np.int32)
        self._cand = np.zeros((l, aw), dtype=np.int32)
        self._prev = np.zeros((l, aw), dtype=np.int32)
        self._marks = np.zeros(l, dtype=bool)
        self._has_prev = False
        self._sim = spec.layout.new_state_buffer()
        self._scratch = spec.layout.new_state_buffer()
        self._ab_opp = spec.layout.new_action_buffer()
        self._ab_best = spec.layout.new_action_buffer()
        max_ev = spec.max_events_per_action()
        self._eb = L.event_buffer((l * spec.params.players + 2) * max_ev)
        self._eb_scratch = L.event_buffer(max_ev)

    def start_game(self) -> None:
        self._has_prev = False

    # -- mutation ------------------------------------------------------

    def _mark_once(self, rng: Rng) -> None:
        cfg = self.cfg
        l = cfg.l
        if cfg.ms == MS_SINGLE:
            self._marks[rng.below(l)] = True
            return
        if cfg.ms == MS_GAUSSIAN:
            x = rng.gauss(cfg.mu * l, cfg.sigma)
            x = min(max(x, 0.0), float(l - 1))
            start = int(math.floor(x + 0.5))
        else:
            start = 0
            while start < l - 1 and rng.uniform() < cfg.dcy:
                start += 1
        self._marks[start:] = True

    def _draw_marks(self, rng: Rng) -> None:
        self._marks[:] = False
        self._mark_once(rng)
        if not self.cfg.mo:
            while rng.uniform() < 0.5:
                self._mark_once(rng)

    # -- rollout -------------------------------------------------------

    def _opponent_move(self, rng: Rng, used: int, reserve: int, eo: int) -> tuple[int, int, int]:
        spec = self.spec
        sim = self._sim
        cfg = self.cfg
        if cfg.om == OM_NOOP:
            force_pass(sim, spec.ctx, spec.off)
            return used, reserve, eo
        if cfg.om == OM_GREEDY and reserve > 0:
            opp = int(sim[L.S_CUR])
            tries = min(3, reserve)
            best_value = -math.inf
            for _ in range(tries):
                np.copyto(self._scratch, sim)
                n_ev = core.advance_random(
                    self._scratch, spec.ctx, spec.off, rng.state, self._ab_opp, self._eb_scratch, 0
                )
                used += 1
                reserve -= 1
                value = self.evaluator.evaluate(sim, self._scratch, self._eb_scratch, 0, n_ev, opp)
                if value > best_value:
                    best_value = value
                    np.copyto(self._ab_best, self._ab_opp)
            eo = core.apply_action(sim, spec.ctx, spec.off, self._ab_best, self._eb, eo)
            used += 1
            return used, reserve, eo
        eo = core.advance_random(sim, spec.ctx, spec.off, rng.state, self._ab_opp, self._eb, eo)
        used += 1
        return used, reserve, eo

    def _rollout(self, state_buf, cand, rng: Rng, used: int, reserve: int, player: int):
        spec = self.spec
        sim = self._sim
        np.copyto(sim, state_buf)
        eo = 0
        for j in range(self.cfg.l):
            if sim[L.S_OVER]:
                break
            ab = cand[j]
            if self._marks[j] or not core.check_action(sim, spec.ctx, spec.off, ab):
                core.sample_action(sim, spec.ctx, spec.off, rng.state, ab)
            eo = core.apply_action(sim, spec.ctx, spec.off, ab, self._eb, eo)
            used += 1
            while not sim[L.S_OVER] and int(sim[L.S_CUR]) != player:
                used, reserve, eo = self._opponent_move(rng, used, reserve, eo)
        value = self.evaluator.evaluate(state_buf, sim, self._eb, 0, eo, player)
        return value, used, reserve

    # -- decision ------------------------------------------------------

    def choose(self, state_buf, rng: Rng) -> np.ndarray:
        """Plan one decision; returns the first action of the best sequence
        (a buffer owned by the planner, valid until the next call)."""
        spec = self.spec
        cfg = self.cfg
        if self.budget <= 0:
            core.sample_action(state_buf, spec.ctx, spec.off, rng.state, self._ab_best)
            return self._ab_best
        player = int(state_buf[L.S_CUR])
        used = 0
        reserve = int(cfg.ombs * self.budget)
        best_value = -math.inf
        evaluated = 0
        while evaluated == 0 or (evaluated < cfg.n and used < self.budget):
            if evaluated == 0:
                if cfg.usb and self._has_prev:
                    self._cand[: cfg.l - 1] = self._prev[1:]
                    self._marks[:] = False
                    self._marks[cfg.l - 1] = True
                else:
                    self._marks[:] = True
            else:
                np.copyto(self._cand, self._seq)
                self._draw_marks(rng)
            value, used, reserve = self._rollout(state_buf, self._cand, rng, used, reserve, player)
            evaluated += 1
            if value >= best_value:
                best_value = value
                np.copyto(self._seq, self._cand)
        np.copyto(self._prev, self._seq)
        self._has_prev = True
        return self._seq[0]


def force_pass(state_buf, ctx, off) -> None:
    """Skip the current player's turn without touching the game: the no-op
    opponent model. Mirrors the kernel's turn-end bookkeeping."""
    who = int(state_buf[L.S_CUR])
    tick = int(state_buf[L.S_TICK])
    pb = int(off[L.O_PL]) + who * int(off[L.O_PS])
    state_buf[L.S_TICK] = tick + 1
    if int(state_buf[pb + int(off[L.O_R_POINTS])]) >= int(ctx[L.C_PP]):
        state_buf[L.S_FINAL] = 1
    nxt = (who + 1) % int(ctx[L.C_P])
    state_buf[L.S_CUR] = nxt
    if int(state_buf[L.S_FINAL]) and nxt == 0:
        state_buf[L.S_OVER] = 1
    if tick + 1 >= int(ctx[L.C_MAXTICKS]):
        state_buf[L.S_OVER] = 1


# ----------------------------------------------------------- players


class RandomPlayer:
    """Uniform legal-action sampler."""

    name = "RND"

    def __init__(self, spec: GameSpec):
        self.spec = spec
        self._ab = spec.layout.new_action_buffer()

    def start_game(self) -> None:
        pass

    def choose(self, state_buf, rng: Rng) -> np.ndarray:
        core.sample_action(state_buf, self.spec.ctx, self.spec.off, rng.state, self._ab)
        return self._ab


class BmrhPlayer:
    name = "BMRH"

    def __init__(self, spec: GameSpec, cfg: BmrhConfig, evaluator, budget: int = DEFAULT_BUDGET):
        self.spec = spec
        self.cfg = cfg
        self.planner = BmrhPlanner(spec, cfg, evaluator, budget)

    def start_game(self) -> None:
        self.planner.start_game()

    def choose(self, state_buf, rng: Rng) -> np.ndarray:
        return self.planner.choose(state_buf, rng)


def play_game(spec: GameSpec, players, seed: int, collect_events: bool = False):
    """Run one game to termination.

    Per-seat RNG streams are derived from (seed, seat), so two games with
    identical seeds and swapped seat assignments produce the same
    transcript. Returns (final GameState, events-or-None).
    """
    if len(players) != spec.params.players:
        raise ValueError(f"need {spec.params.players} players, got {len(players)}")
    state = new_game(spec, seed)
    rngs = [Rng(derive_seed(seed, 0x9EA7, seat)) for seat in range(len(players))]
    for player in players:
        player.start_game()
    eb = L.event_buffer(spec.max_events_per_action())
    events = [] if collect_events else None
    while not state.is_over:
        seat = state.current_player
        ab = players[seat].choose(state.buf, rngs[seat])
        n = core.apply_action(state.buf, spec.ctx, spec.off, ab, eb, 0)
        if n < 0:
            raise IllegalActionError(
                f"player {seat} returned an illegal action at tick {state.tick}"
            )
        if events is not None:
            events.extend(events_from_buffer(eb, 0, n))
    return state, events
