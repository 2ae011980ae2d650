import numpy as np
import pytest

from gemelites.engine import GameSpec
from gemelites.engine import layout as L
from gemelites.engine.cards import Card, Noble
from gemelites.engine.params import GameParams

TINY_RUN = dict(
    game="SP2P",
    space="EF_HC",
    opponent="RND",
    n_boot=6,
    n_budget=18,
    games_per_eval=2,
    workers=1,
    master_seed=11,
    budget=60,
    batch_size=4,
)


@pytest.fixture(scope="session")
def tiny_run_dir(tmp_path_factory):
    """One small but complete persisted experiment, shared by tests."""
    from gemelites.experiment import ExperimentConfig, run

    out = tmp_path_factory.mktemp("tinyrun") / "exp"
    run(ExperimentConfig(output_dir=str(out), **TINY_RUN))
    return out


@pytest.fixture(scope="session")
def sp2p():
    return GameSpec.preset("SP2P")


@pytest.fixture(scope="session")
def w2():
    return GameSpec.preset("W2")


@pytest.fixture(scope="session")
def one_card():
    return GameSpec.preset("1C2W")


def filler_card(suit=0, cost=(9, 9, 9, 9, 9), points=0):
    return Card(suit=suit, cost=cost, points=points)


def uniform_deck(card, size=4):
    """A deck of identical cards: the initial face-up deal is then known
    regardless of the shuffle."""
    return [card] * size


def far_noble(n_types=5):
    return Noble(points=3, cost=(8,) * n_types)


def make_spec(decks, nobles=None, **param_overrides):
    defaults = dict(players=2, tokens_per_suit=5)
    defaults.update(param_overrides)
    params = GameParams(**defaults)
    if nobles is None:
        nobles = [far_noble(params.token_types)] * params.table_nobles
    return GameSpec(params, decks, nobles)


# ---------------------------------------------------- state surgery


def pb_of(state, player):
    return int(state.spec.off[L.O_PL]) + player * int(state.spec.off[L.O_PS])


def give_tokens(state, player, per_suit, jokers=0):
    """Move tokens from the table into a player's hand (conserving)."""
    off = state.spec.off
    pb = pb_of(state, player)
    for suit, amount in enumerate(per_suit):
        state.buf[int(off[L.O_TT]) + suit] -= amount
        state.buf[pb + int(off[L.O_R_TOK]) + suit] += amount
    state.buf[int(off[L.O_TJ])] -= jokers
    state.buf[pb + int(off[L.O_R_JOKERS])] += jokers


def give_bought_suits(state, player, per_suit):
    """Pretend the player already owns cards of these suits (discounts)."""
    off = state.spec.off
    pb = pb_of(state, player)
    for suit, amount in enumerate(per_suit):
        state.buf[pb + int(off[L.O_R_BS]) + suit] += amount
        state.buf[pb + int(off[L.O_R_NB])] += amount


def force_terminal(state, points, cards):
    """Fabricate a terminal state with given per-player points and bought
    card counts (for outcome-ranking tests only)."""
    off = state.spec.off
    for player, (pts, n) in enumerate(zip(points, cards)):
        pb = pb_of(state, player)
        state.buf[pb + int(off[L.O_R_POINTS])] = pts
        state.buf[pb + int(off[L.O_R_NB])] = n
    state.buf[L.S_OVER] = 1
    return state


def snapshot(state):
    return state.buf.copy()


def unchanged(state, snap):
    return np.array_equal(state.buf, snap)
