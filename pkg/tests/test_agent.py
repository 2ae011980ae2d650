"""Planner behaviour: legality, determinism, budget, mutation, opponents."""

import math

import numpy as np
import pytest

import gemelites.agent as agent_mod
from gemelites.agent import (
    BMRH_STAR_CONFIG,
    BmrhConfig,
    BmrhPlanner,
    BmrhPlayer,
    HP_GRIDS,
    RandomPlayer,
    force_pass,
    play_game,
)
from gemelites.engine import GameSpec, IllegalActionError, new_game
from gemelites.engine import layout as L
from gemelites.engine.backend import core
from gemelites.engine.cards import Card
from gemelites.heuristics import PbEvaluator, make_evaluator, make_heuristic
from gemelites.rng import Rng

from conftest import filler_card, give_tokens, make_spec, pb_of, uniform_deck


def _pb_planner(spec, budget=300, **cfg_overrides):
    cfg = BmrhConfig(**{**dict(l=3, n=20, usb=True, mo=True, ms=2, om=0), **cfg_overrides})
    return BmrhPlanner(spec, cfg, PbEvaluator(spec), budget=budget)


# ------------------------------------------------------------ legality


def test_config_grid_validation():
    BmrhConfig().validate()
    BMRH_STAR_CONFIG.validate()
    with pytest.raises(ValueError, match="l="):
        BmrhConfig(l=4).validate()
    with pytest.raises(ValueError, match="ombs="):
        BmrhConfig(ombs=0.5).validate()
    assert set(HP_GRIDS) == {"l", "n", "usb", "mo", "ms", "om", "ombs", "dcy", "mu", "sigma"}


@pytest.mark.parametrize("om", [0, 1, 2])
@pytest.mark.parametrize("ms", [0, 1, 2])
def test_plan_returns_legal_action(sp2p, om, ms):
    planner = _pb_planner(sp2p, om=om, ms=ms, budget=120)
    rng = Rng(5)
    state = new_game(sp2p, 3)
    for _ in range(6):
        if state.is_over:
            break
        ab = planner.choose(state.buf, rng)
        assert core.check_action(state.buf, sp2p.ctx, sp2p.off, ab)
        assert core.apply_action(state.buf, sp2p.ctx, sp2p.off, ab,
                                 L.event_buffer(sp2p.max_events_per_action()), 0) >= 0


def test_plan_deterministic(sp2p):
    results = []
    for _ in range(2):
        planner = _pb_planner(sp2p, budget=200)
        state = new_game(sp2p, 3)
        rng = Rng(77)
        actions = []
        for _ in range(5):
            ab = planner.choose(state.buf, rng).copy()
            actions.append(ab)
            core.apply_action(state.buf, sp2p.ctx, sp2p.off, ab,
                              L.event_buffer(sp2p.max_events_per_action()), 0)
        results.append(np.stack(actions))
    assert np.array_equal(results[0], results[1])


# -------------------------------------------------------------- budget


class CountingCore:
    def __init__(self, real):
        self._real = real
        self.advances = 0

    def __getattr__(self, name):
        return getattr(self._real, name)

    def apply_action(self, *args):
        out = self._real.apply_action(*args)
        if out >= 0:
            self.advances += 1
        return out

    def advance_random(self, *args):
        self.advances += 1
        return self._real.advance_random(*args)


def test_plan_stays_within_one_rollout_of_budget(sp2p, monkeypatch):
    counter = CountingCore(core)
    monkeypatch.setattr(agent_mod, "core", counter)
    budget = 50
    cfg = BmrhConfig(l=5, n=200, usb=False, mo=True, ms=2, om=0)
    planner = BmrhPlanner(sp2p, cfg, PbEvaluator(sp2p), budget=budget)
    state = new_game(sp2p, 1)
    planner.choose(state.buf, Rng(3))
    max_rollout = cfg.l * sp2p.params.players
    assert counter.advances <= budget + max_rollout
    assert counter.advances >= budget - max_rollout  # budget actually exercised


def test_zero_budget_falls_back_to_sampling(sp2p):
    planner = _pb_planner(sp2p, budget=0)
    state = new_game(sp2p, 1)
    ab = planner.choose(state.buf, Rng(4))
    assert core.check_action(state.buf, sp2p.ctx, sp2p.off, ab)


# ------------------------------------------------- (1+1) and mutation


def test_ties_favour_newer_candidate_and_best_returned(sp2p, monkeypatch):
    planner = _pb_planner(sp2p, budget=400, usb=False, n=20)
    seen = []
    real_rollout = BmrhPlanner._rollout

    def spy(self, state_buf, cand, rng, used, reserve, player):
        value, used, reserve = real_rollout(self, state_buf, cand, rng, used, reserve, player)
        seen.append((value, cand[0].copy()))
        return value, used, reserve

    monkeypatch.setattr(BmrhPlanner, "_rollout", spy)
    state = new_game(sp2p, 2)
    returned = planner.choose(state.buf, Rng(9)).copy()
    assert seen
    incumbent_value = -math.inf
    incumbent_first = None
    for value, first in seen:
        if value >= incumbent_value:
            incumbent_value = value
            incumbent_first = first
    assert np.array_equal(returned, incumbent_first)


def test_ms0_marks_single_position(sp2p):
    planner = _pb_planner(sp2p, ms=0, mo=True, l=10)
    rng = Rng(1)
    for _ in range(50):
        planner._draw_marks(rng)
        assert planner._marks.sum() == 1


def test_ms1_and_ms2_mark_suffixes(sp2p):
    for ms in (1, 2):
        planner = _pb_planner(sp2p, ms=ms, mo=True, l=10)
        rng = Rng(2)
        for _ in range(50):
            planner._draw_marks(rng)
            marks = planner._marks
            assert marks[-1]  # a suffix roll always includes the tail
            start = int(np.argmax(marks))
            assert marks[start:].all() and not marks[:start].any()


def test_mutate_once_toggle_repeats_mutation(sp2p):
    planner = _pb_planner(sp2p, ms=0, mo=False, l=10)
    rng = Rng(3)
    multi = 0
    for _ in range(200):
        planner._draw_marks(rng)
        if planner._marks.sum() > 1:
            multi += 1
    # Repeats happen with probability 1/2 per extra application.
    assert multi > 40


def test_gaussian_start_uses_mu_fraction(sp2p):
    planner = _pb_planner(sp2p, ms=1, mo=True, l=20, mu=0.75, sigma=0.5)
    rng = Rng(4)
    starts = []
    for _ in range(300):
        planner._draw_marks(rng)
        starts.append(int(np.argmax(planner._marks)))
    assert 12 <= np.mean(starts) <= 18  # centred near mu*l = 15


def test_shift_buffer_reuses_previous_best(sp2p, monkeypatch):
    planner = _pb_planner(sp2p, usb=True, l=3, n=5, budget=60)
    state = new_game(sp2p, 5)
    rng = Rng(6)
    planner.choose(state.buf, rng)
    prev = planner._prev.copy()

    captured = {}
    real_rollout = BmrhPlanner._rollout

    def spy(self, state_buf, cand, rng, used, reserve, player):
        if "first" not in captured:
            captured["first"] = cand.copy()
            captured["marks"] = self._marks.copy()
        return real_rollout(self, state_buf, cand, rng, used, reserve, player)

    monkeypatch.setattr(BmrhPlanner, "_rollout", spy)
    core.apply_action(state.buf, sp2p.ctx, sp2p.off, prev[0],
                      L.event_buffer(sp2p.max_events_per_action()), 0)
    planner.choose(state.buf, rng)
    assert np.array_equal(captured["first"][:2], prev[1:])
    assert captured["marks"].tolist() == [False, False, True]


def test_first_decision_is_fully_random_even_with_usb(sp2p, monkeypatch):
    planner = _pb_planner(sp2p, usb=True, l=3)
    captured = {}
    real_rollout = BmrhPlanner._rollout

    def spy(self, state_buf, cand, rng, used, reserve, player):
        captured.setdefault("marks", self._marks.copy())
        return real_rollout(self, state_buf, cand, rng, used, reserve, player)

    monkeypatch.setattr(BmrhPlanner, "_rollout", spy)
    planner.choose(new_game(sp2p, 5).buf, Rng(6))
    assert captured["marks"].all()


# --------------------------------------------------- one-step oracle


def test_single_scoring_buy_found_by_shallow_pb_plan():
    scoring = Card(suit=0, cost=(1, 0, 0, 0, 0), points=1)
    spec = make_spec(
        [uniform_deck(scoring), uniform_deck(filler_card()), uniform_deck(filler_card())]
    )
    base = new_game(spec, 0)
    give_tokens(base, 0, (1, 0, 0, 0, 0))
    # Legal classes, enumerated independently: picks, both reserves, and
    # the scoring buy. Every buy candidate scores a point.
    n_classes = 5
    p_single = 1.0 / n_classes
    p_plan = 1.0 - (1.0 - p_single) ** 20
    trials = 200
    cfg = BmrhConfig(l=1, n=20, usb=False, mo=True, ms=0, om=1)
    hits = 0
    for t in range(trials):
        planner = BmrhPlanner(spec, cfg, PbEvaluator(spec), budget=1000)
        ab = planner.choose(base.buf.copy(), Rng(1000 + t))
        if int(ab[L.A_KIND]) == L.K_BUY_FACEUP:
            hits += 1
    sigma = math.sqrt(p_plan * (1 - p_plan) / trials)
    assert hits / trials >= p_plan - 3 * sigma


def test_terminal_adjacent_rollouts_still_return_legal_action(sp2p):
    state = new_game(sp2p, 7)
    state.buf[L.S_FINAL] = 1
    state.buf[L.S_CUR] = 1  # after this seat's move the round wraps and ends
    planner = _pb_planner(sp2p, l=10, budget=200)
    ab = planner.choose(state.buf, Rng(8))
    assert core.check_action(state.buf, sp2p.ctx, sp2p.off, ab)


def test_zero_weight_ef_plan_is_legal_and_terminates(sp2p):
    evaluator = make_evaluator(sp2p, make_heuristic("EF_ID", [0.0] * 18))
    planner = BmrhPlanner(sp2p, BmrhConfig(l=2, n=20, usb=False, mo=True, ms=0, om=0),
                          evaluator, budget=100)
    state = new_game(sp2p, 9)
    ab = planner.choose(state.buf, Rng(1))
    assert core.check_action(state.buf, sp2p.ctx, sp2p.off, ab)


# ---------------------------------------------------- opponent models


class EndStateRecorder:
    """PB evaluator that also snapshots every rollout end state."""

    def __init__(self, spec):
        self._inner = PbEvaluator(spec)
        self.ends = []

    def evaluate(self, start_buf, end_buf, eb, lo, hi, player):
        self.ends.append(np.array(end_buf))
        return self._inner.evaluate(start_buf, end_buf, eb, lo, hi, player)


def test_noop_opponents_leave_their_state_untouched(sp2p):
    recorder = EndStateRecorder(sp2p)
    planner = BmrhPlanner(sp2p, BmrhConfig(l=2, n=10, usb=False, mo=True, ms=0, om=1),
                          recorder, budget=100)
    state = new_game(sp2p, 11)
    planner.choose(state.buf, Rng(2))
    opp = pb_of(state, 1)
    stride = int(sp2p.off[L.O_PS])
    before = state.buf[opp : opp + stride]
    for end in recorder.ends:
        assert np.array_equal(end[opp : opp + stride], before)


def test_noop_rollout_events_stay_in_window(sp2p):
    class WindowChecker(PbEvaluator):
        def __init__(self, spec, base_tick):
            super().__init__(spec)
            self.base_tick = base_tick
            self.checked = 0

        def evaluate(self, start_buf, end_buf, eb, lo, hi, player):
            end_tick = int(end_buf[L.S_TICK])
            for i in range(lo, hi):
                tick = int(eb[i * L.EVENT_W + 2])
                assert self.base_tick <= tick < end_tick
            self.checked += 1
            return super().evaluate(start_buf, end_buf, eb, lo, hi, player)

    state = new_game(sp2p, 13)
    checker = WindowChecker(sp2p, state.tick)
    planner = BmrhPlanner(sp2p, BmrhConfig(l=3, n=8, usb=False, mo=True, ms=2, om=0),
                          checker, budget=120)
    planner.choose(state.buf, Rng(3))
    assert checker.checked >= 1


def test_greedy_opponent_consumes_lookahead_reserve(sp2p, monkeypatch):
    counter = CountingCore(core)
    monkeypatch.setattr(agent_mod, "core", counter)
    cfg = BmrhConfig(l=2, n=30, usb=False, mo=True, ms=0, om=2, ombs=0.05)
    planner = BmrhPlanner(sp2p, cfg, PbEvaluator(sp2p), budget=200)
    state = new_game(sp2p, 15)
    ab = planner.choose(state.buf, Rng(5))
    assert core.check_action(state.buf, sp2p.ctx, sp2p.off, ab)


def test_force_pass_matches_engine_turn_end(sp2p):
    state = new_game(sp2p, 17)
    buf = state.buf.copy()
    force_pass(buf, sp2p.ctx, sp2p.off)
    assert buf[L.S_CUR] == 1 and buf[L.S_TICK] == 1
    assert core.check_invariants(buf, sp2p.ctx, sp2p.off) == 0


# ------------------------------------------------------------- games


def test_play_game_transcript_depends_on_seat_not_identity(sp2p):
    a, b = RandomPlayer(sp2p), RandomPlayer(sp2p)
    first, _ = play_game(sp2p, [a, b], seed=21)
    swapped, _ = play_game(sp2p, [b, a], seed=21)
    assert np.array_equal(first.buf, swapped.buf)


def test_play_game_rejects_wrong_player_count(sp2p):
    with pytest.raises(ValueError, match="players"):
        play_game(sp2p, [RandomPlayer(sp2p)], seed=1)


def test_play_game_raises_on_illegal_player(sp2p):
    class Cheater:
        def start_game(self):
            pass

        def choose(self, state_buf, rng):
            ab = sp2p.layout.new_action_buffer()
            ab[L.A_KIND] = L.K_BUY_FACEUP
            return ab

    with pytest.raises(IllegalActionError):
        play_game(sp2p, [Cheater(), RandomPlayer(sp2p)], seed=1)


def test_bmrh_player_beats_random(sp2p):
    evaluator = make_evaluator(sp2p, make_heuristic("PB"))
    agent = BmrhPlayer(sp2p, BmrhConfig(l=3, n=50, usb=True, mo=True, ms=2, om=0),
                       evaluator, budget=300)
    from gemelites.engine.game import result

    wins = 0.0
    for g in range(8):
        seat = g % 2
        players = [RandomPlayer(sp2p), RandomPlayer(sp2p)]
        players[seat] = agent
        final, _ = play_game(sp2p, players, seed=100 + g)
        wins += result(final)[seat]
    assert wins / 8 >= 0.75
