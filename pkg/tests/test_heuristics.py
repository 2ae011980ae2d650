"""Value-function families: mappings, features, encodings, linearity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemelites.engine import GameParams, GameSpec, encoding_length, new_game
from gemelites.engine import layout as L
from gemelites.engine.game import Event, random_playout
from gemelites.heuristics import (
    DISCARD,
    EventMapping,
    MappingError,
    WEIGHT_GRID,
    ef_features,
    ef_value,
    encode_state,
    feature_count,
    hc_mapping,
    id_mapping,
    load_event_mapping,
    make_evaluator,
    make_heuristic,
    pb_value,
    save_event_mapping,
    sf_value,
)
from gemelites.rng import Rng

from conftest import give_tokens, pb_of


# ------------------------------------------------------------ mappings

# Macro-feature table: token/joker gains -> 0, hidden reserve -> 1, open
# reserve -> 2, noble arrival -> 3, scoring -> 4, the rest discarded.
HC_EXPECTED = {
    0: DISCARD, 1: DISCARD, 2: DISCARD, 3: DISCARD, 4: DISCARD, 5: DISCARD,
    6: DISCARD, 7: DISCARD, 8: 0, 9: DISCARD, 10: 0, 11: DISCARD,
    12: 1, 13: 2, 14: 3, 15: DISCARD, 16: 4, 17: 4,
}


def test_hc_mapping_matches_reference_cell_by_cell():
    mapping = hc_mapping()
    assert mapping.feature_count == 5
    for type_id, expected in HC_EXPECTED.items():
        assert mapping.table[type_id] == expected, f"type {type_id}"


def test_id_mapping_is_identity():
    mapping = id_mapping()
    assert mapping.feature_count == 18
    assert mapping.table == tuple(range(18))


def test_mapping_json_round_trip(tmp_path):
    path = tmp_path / "hc.json"
    save_event_mapping(hc_mapping(), path)
    again = load_event_mapping(path)
    assert again.table == hc_mapping().table
    assert again.feature_count == 5


def test_mapping_json_rejects_incomplete(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"0": 1}')
    with pytest.raises(MappingError, match="missing"):
        load_event_mapping(path)


def test_mapping_rejects_bad_feature_index():
    with pytest.raises(MappingError):
        EventMapping("x", tuple([7] + [DISCARD] * 17), 5)


# ------------------------------------------------------------ features


def _ev(type_id, who, a=0):
    return Event(type_id=type_id, who=who, tick=0, a=a)


def test_empty_log_gives_zero_vector():
    assert ef_features([], 0, id_mapping()).tolist() == [0] * 18


def test_hidden_reserve_increments_hc_feature_1():
    # type 12 is the hidden reserve; under hc it feeds feature 1.
    counts = ef_features([_ev(12, who=0)], 0, hc_mapping())
    assert counts.tolist() == [0, 1, 0, 0, 0]


def test_open_reserve_increments_hc_feature_2():
    counts = ef_features([_ev(13, who=0)], 0, hc_mapping())
    assert counts.tolist() == [0, 0, 1, 0, 0]


def test_engine_noble_credit_goes_to_beneficiary():
    events = [_ev(17, who=L.ENGINE, a=1)]
    assert ef_features(events, 1, hc_mapping()).tolist() == [0, 0, 0, 0, 1]
    assert ef_features(events, 0, hc_mapping()).sum() == 0


def test_id_features_sum_to_retained_event_count():
    rng = Rng(1)
    events = [_ev(rng.below(18), who=rng.below(2)) for _ in range(200)]
    mine = [e for e in events if e.who == 0 and not (e.type_id == 17)]
    counts = ef_features(events, 0, id_mapping())
    # type 17 events carry who=ENGINE in real logs; synthetic who=0 rows
    # with type 17 still count for player 0 via the who filter.
    mine17 = [e for e in events if e.who == 0 and e.type_id == 17]
    assert counts.sum() == len(mine) + len(mine17)


def test_unknown_type_id_rejected():
    with pytest.raises(MappingError):
        ef_features([_ev(18, who=0)], 0, id_mapping())


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 17), st.integers(0, 1)), max_size=60),
    st.lists(st.tuples(st.integers(0, 17), st.integers(0, 1)), max_size=60),
)
def test_ef_features_additive_over_concatenation(log_a, log_b):
    events_a = [_ev(t, w) for t, w in log_a]
    events_b = [_ev(t, w) for t, w in log_b]
    mapping = hc_mapping()
    combined = ef_features(events_a + events_b, 0, mapping)
    assert (combined == ef_features(events_a, 0, mapping) + ef_features(events_b, 0, mapping)).all()


def test_ef_value_is_dot_product():
    assert ef_value(np.zeros(5), np.ones(5)) == 0.0
    features = np.array([1, 0, 0, 0, 0])
    weights = [0.6, 0.1, 0.1, 0.1, 0.1]
    assert ef_value(features, weights) == pytest.approx(0.6)
    with pytest.raises(ValueError, match="mismatch"):
        ef_value(np.zeros(4), np.ones(5))


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(0, 6), min_size=5, max_size=5), min_size=2, max_size=6
    ),
    st.lists(st.sampled_from(WEIGHT_GRID), min_size=5, max_size=5),
    st.floats(0.1, 10.0),
)
def test_positive_scaling_preserves_argmax(candidates, weights, scale):
    weights = np.array(weights)
    values = [ef_value(np.array(c), weights) for c in candidates]
    scaled = [ef_value(np.array(c), weights * scale) for c in candidates]
    assert int(np.argmax(values)) == int(np.argmax(scaled))


# ------------------------------------------------------------- PB


def test_pb_value_is_score_delta(sp2p):
    start = new_game(sp2p, 1)
    end = start.copy()
    end.buf[pb_of(end, 0) + int(sp2p.off[L.O_R_POINTS])] = 7
    start.buf[pb_of(start, 0) + int(sp2p.off[L.O_R_POINTS])] = 3
    assert pb_value(start, end, 0) == 4.0
    assert pb_value(start, start, 0) == 0.0
    assert pb_value(end, start, 0) == -4.0  # negative deltas pass through


# ------------------------------------------------------------ encoding


def _slot_walk_oracle(params: GameParams) -> list[str]:
    """Independent slot enumeration following the hierarchical layout."""
    slots = []
    ntt = params.token_types

    def card(tag):
        slots.extend(f"{tag}/suit{t}" for t in range(ntt))
        slots.extend(f"{tag}/cost{t}" for t in range(ntt))
        slots.append(f"{tag}/points")

    for d in range(params.decks):
        slots.append(f"deck{d}/remaining")
        for k in range(params.face_up):
            card(f"deck{d}/slot{k}")
    for i in range(params.table_nobles):
        slots.append(f"noble{i}/points")
        slots.extend(f"noble{i}/cost{t}" for t in range(ntt))
    slots.extend(f"board/tokens{t}" for t in range(ntt))
    slots.append("board/jokers")
    for p in range(params.players):
        slots.append(f"p{p}/points")
        slots.extend(f"p{p}/tokens{t}" for t in range(ntt))
        slots.append(f"p{p}/jokers")
        slots.extend(f"p{p}/cards{t}" for t in range(ntt))
        for r in range(params.max_reserved):
            card(f"p{p}/reserved{r}")
    return slots


@pytest.mark.parametrize(
    "params",
    [
        GameParams(players=2, tokens_per_suit=5),
        GameParams(players=2, tokens_per_suit=10, max_tokens=20, pick_diff_types=2,
                   pick_same_amount=3, pick_same_min=0, noble_count=1),
        GameParams(players=4),
        GameParams(players=3, token_types=4, decks=2, face_up=3, max_reserved=2,
                   pick_diff_types=3),
    ],
)
def test_encoding_length_matches_slot_walk(params):
    assert encoding_length(params) == len(_slot_walk_oracle(params))


def test_encoder_writes_exactly_the_published_length(sp2p, w2):
    for spec in (sp2p, w2):
        state = new_game(spec, 3)
        vec = encode_state(state, 0)
        assert len(vec) == spec.encoding_length == encoding_length(spec.params)


def test_single_table_token_changes_one_coordinate(sp2p):
    state = new_game(sp2p, 3)
    other = state.copy()
    other.buf[int(sp2p.off[L.O_TT]) + 2] -= 1
    a, b = encode_state(state, 0), encode_state(other, 0)
    diff = np.nonzero(a != b)[0]
    assert len(diff) == 1


def test_encoding_deterministic(sp2p):
    state = new_game(sp2p, 3)
    assert np.array_equal(encode_state(state, 0), encode_state(state, 0))


def test_board_fields_identical_for_both_perspectives(sp2p):
    state, _ = random_playout(sp2p, seed=8)
    params = sp2p.params
    board_len = (
        params.decks * (1 + params.face_up * (2 * params.token_types + 1))
        + params.table_nobles * (params.token_types + 1)
        + params.token_types + 1
    )
    a, b = encode_state(state, 0), encode_state(state, 1)
    assert np.array_equal(a[:board_len], b[:board_len])


def test_hidden_reserved_cards_are_zero_blocks_for_opponents(sp2p):
    from gemelites.engine import Action, apply

    state = new_game(sp2p, 3)
    state, _ = apply(state, Action(kind="reserve_deck", deck=0))
    params = sp2p.params
    card_block = 2 * params.token_types + 1
    board_len = (
        params.decks * (1 + params.face_up * card_block)
        + params.table_nobles * (params.token_types + 1)
        + params.token_types + 1
    )
    player_fixed = 1 + (params.token_types + 1) + params.token_types
    # Player 0's first reserved slot, seen from player 1's encoding, where
    # player 0 is the second player block.
    per_player = player_fixed + params.max_reserved * card_block
    start = board_len + per_player + player_fixed
    opp_view = encode_state(state, 1)[start : start + card_block]
    assert np.all(opp_view == 0.0)
    own_view = encode_state(state, 0)[board_len + player_fixed : board_len + player_fixed + card_block]
    assert own_view.sum() > 0


# ------------------------------------------------------------------ SF


def test_sf_value_properties(sp2p):
    state = new_game(sp2p, 4)
    n = sp2p.encoding_length
    rng = Rng(9)
    weights = np.array([WEIGHT_GRID[rng.below(11)] for _ in range(n)])
    assert sf_value(state, state, 0, weights) == 0.0
    assert sf_value(state, state.copy(), 0, np.zeros(n)) == 0.0

    end = state.copy()
    give_tokens(end, 0, (1, 1, 1, 0, 0))
    direct = sf_value(state, end, 0, weights)
    via_dot = float(np.dot(weights, encode_state(end, 0) - encode_state(state, 0)))
    assert direct == pytest.approx(via_dot, abs=1e-9)
    with pytest.raises(ValueError, match="weights"):
        sf_value(state, end, 0, np.zeros(n - 1))


# ------------------------------------------------- evaluator plumbing


def test_make_heuristic_shapes(sp2p):
    assert make_heuristic("PB").weights is None
    ef = make_heuristic("EF_ID", [0.0] * 18)
    assert ef.mapping.name == "id"
    with pytest.raises(ValueError):
        make_heuristic("EF_HC", [0.0] * 4)
    with pytest.raises(ValueError):
        make_heuristic("SF", [0.0] * 10, encoding_length=sp2p.encoding_length)
    assert feature_count("SF", sp2p.encoding_length) == sp2p.encoding_length


def test_fast_evaluators_agree_with_reference_ops(sp2p):
    from gemelites.engine.backend import core

    state = new_game(sp2p, 6)
    rng = Rng(2)
    ab = sp2p.layout.new_action_buffer()
    eb = L.event_buffer(40 * sp2p.max_events_per_action())
    eo = 0
    sim = state.copy()
    for _ in range(12):
        eo = core.advance_random(sim.buf, sp2p.ctx, sp2p.off, rng.state, ab, eb, eo)
    from gemelites.engine.game import events_from_buffer

    events = events_from_buffer(eb, 0, eo)

    pb = make_evaluator(sp2p, make_heuristic("PB"))
    assert pb.evaluate(state.buf, sim.buf, eb, 0, eo, 0) == pb_value(state, sim, 0)

    w = np.array([WEIGHT_GRID[(i * 7) % 11] for i in range(18)])
    ef = make_evaluator(sp2p, make_heuristic("EF_ID", w))
    expected = ef_value(ef_features(events, 0, id_mapping()), w)
    assert ef.evaluate(state.buf, sim.buf, eb, 0, eo, 0) == pytest.approx(expected, abs=1e-9)

    w_sf = np.array([WEIGHT_GRID[(i * 5) % 11] for i in range(sp2p.encoding_length)])
    sf = make_evaluator(sp2p, make_heuristic("SF", w_sf))
    assert sf.evaluate(state.buf, sim.buf, eb, 0, eo, 0) == pytest.approx(
        sf_value(state, sim, 0, w_sf), abs=1e-9
    )
