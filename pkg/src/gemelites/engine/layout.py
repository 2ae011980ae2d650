"""Flat int32 buffer layout shared by both engine cores.

A game is described by two arrays:

  ctx   read-only per-rule-set data: the parameter header, deck segment
        bounds, the card table and the noble table.
  state one mutable game state; copying a state is a single array copy.

Offsets into `state` depend on the rule set, so they are precomputed here
into an `off` int32 array that every kernel receives alongside `ctx`. The
`O_*` constants below index `off`; the compiled core mirrors them as C
enums, and the cross-core equivalence tests guard against drift.
"""

from __future__ import annotations

import numpy as np

from .cards import Card, Noble
from .params import GameParams

# --- ctx header indices ---
C_P = 0
C_NTT = 1
C_NJT = 2
C_D = 3
C_FUC = 4
C_MAXT = 5
C_MAXRC = 6
C_PP = 7
C_NTTPD = 8
C_NTPD = 9
C_NTPS = 10
C_MINTPS = 11
C_TPS = 12
C_NCARDS = 13
C_NNOBLES = 14
C_NTABLE = 15
C_MAXTICKS = 16
CTX_HDR = 17

# --- fixed state header indices ---
S_CUR = 0
S_TICK = 1
S_FINAL = 2
S_OVER = 3
STATE_HDR = 4

# --- indices into the `off` array ---
O_TT = 0        # table tokens, nTT entries
O_TJ = 1        # table jokers, 1 entry
O_DP = 2        # deck draw pointers, D entries
O_FU = 3        # face-up card ids, D*FUC entries (-1 empty)
O_NTID = 4      # noble ids chosen for the table, NTABLE entries
O_NO = 5        # noble owner, NTABLE entries (-1 on table)
O_DO = 6        # per-game shuffled deck order, NCARDS entries
O_PL = 7        # first player block
O_PS = 8        # player block stride
O_R_POINTS = 9
O_R_JOKERS = 10
O_R_TOK = 11    # player tokens, nTT entries
O_R_NB = 12     # bought-card count
O_R_BS = 13     # bought cards per suit, nTT entries
O_R_CS = 14     # accumulated printed cost of bought cards
O_R_NR = 15     # reserved-card count
O_R_RID = 16    # reserved card ids, maxRC entries
O_R_RHID = 17   # reserved hidden flags, maxRC entries
O_R_COINS = 18  # tokens gained (picks and reserve jokers)
O_R_RACT = 19   # reserve actions taken
O_R_SWAPS = 20  # actions that both gained and discarded tokens
O_R_BID = 21    # bought card ids, NCARDS entries
O_CARDS = 22    # ctx: card table base
O_NOBLES = 23   # ctx: noble table base
O_DB = 24       # ctx: deck bounds base, D+1 entries
O_AW = 25       # action buffer width
O_APAY = 26     # action payment block (nTT suits + jokers)
O_ADISC = 27    # action discard block (nTT suits + jokers)
O_SSIZE = 28    # total state size
OFF_LEN = 29

# --- action kinds ---
A_KIND = 0
A_ARG1 = 1
A_ARG2 = 2
K_PICK_DIFF = 0
K_PICK_SAME = 1
K_RESERVE_FACEUP = 2
K_RESERVE_DECK = 3
K_BUY_FACEUP = 4
K_BUY_RESERVED = 5
K_PASS = 6

# --- events ---
EVENT_W = 5  # type, who, tick, a, b
ENGINE = -1
EV_NOBLE_TAKE = 0
EV_TABLE_TOKEN_INC = 1
EV_TABLE_TOKEN_DEC = 2
EV_TABLE_JOKER_INC = 3
EV_TABLE_JOKER_DEC = 4
EV_CARD_DRAW = 5
EV_CARD_PLACE = 6
EV_NOBLE_PLACE = 7
EV_PLAYER_TOKEN_INC = 8
EV_PLAYER_TOKEN_DEC = 9
EV_PLAYER_JOKER_INC = 10
EV_PLAYER_JOKER_DEC = 11
EV_RESERVE_HIDDEN = 12
EV_RESERVE_FACEUP = 13
EV_NOBLE_RECEIVE = 14
EV_CARD_BUY = 15
EV_POINTS_FROM_CARD = 16
EV_POINTS_FROM_NOBLE = 17
N_EVENT_TYPES = 18

# invariant-check bitmask
INV_TOKEN_CONSERVATION = 1
INV_JOKER_CONSERVATION = 2
INV_RESERVED_LIMIT = 4
INV_TOKEN_LIMIT = 8
INV_POINTS_MISMATCH = 16


class Layout:
    """Builds ctx/off arrays for one rule set plus its decks and nobles."""

    def __init__(self, params: GameParams, decks: list[list[Card]], nobles: list[Noble]):
        params.validate()
        if len(decks) != params.decks:
            raise ValueError(f"expected {params.decks} decks, got {len(decks)}")
        if any(len(d) == 0 for d in decks):
            raise ValueError("decks must be non-empty")
        if len(nobles) < params.table_nobles:
            raise ValueError(
                f"need at least {params.table_nobles} nobles, got {len(nobles)}"
            )
        self.params = params
        self.decks = decks
        self.nobles = nobles

        ntt = params.token_types
        d = params.decks
        n_cards = sum(len(deck) for deck in decks)
        card_w = 2 + ntt
        noble_w = 1 + ntt

        hdr = [0] * CTX_HDR
        hdr[C_P] = params.players
        hdr[C_NTT] = ntt
        hdr[C_NJT] = params.joker_count
        hdr[C_D] = d
        hdr[C_FUC] = params.face_up
        hdr[C_MAXT] = params.max_tokens
        hdr[C_MAXRC] = params.max_reserved
        hdr[C_PP] = params.end_points
        hdr[C_NTTPD] = params.pick_diff_types
        hdr[C_NTPD] = params.pick_diff_per_type
        hdr[C_NTPS] = params.pick_same_amount
        hdr[C_MINTPS] = params.pick_same_min
        hdr[C_TPS] = params.tokens_per_suit
        hdr[C_NCARDS] = n_cards
        hdr[C_NNOBLES] = len(nobles)
        hdr[C_NTABLE] = params.table_nobles
        hdr[C_MAXTICKS] = params.tick_limit

        deck_bounds = [0]
        for deck in decks:
            deck_bounds.append(deck_bounds[-1] + len(deck))

        card_rows: list[int] = []
        for deck in decks:
            for card in deck:
                card_rows.extend([card.suit, card.points, *card.cost])
        noble_rows: list[int] = []
        for noble in nobles:
            noble_rows.extend([noble.points, *noble.cost])

        db_base = CTX_HDR
        cards_base = db_base + d + 1
        nobles_base = cards_base + n_cards * card_w
        self.ctx = np.array(
            hdr + deck_bounds + card_rows + noble_rows, dtype=np.int32
        )
        assert self.ctx.shape[0] == nobles_base + len(nobles) * noble_w

        p = params.players
        maxrc = params.max_reserved
        ntable = params.table_nobles

        off = [0] * OFF_LEN
        pos = STATE_HDR
        off[O_TT] = pos
        pos += ntt
        off[O_TJ] = pos
        pos += 1
        off[O_DP] = pos
        pos += d
        off[O_FU] = pos
        pos += d * params.face_up
        off[O_NTID] = pos
        pos += ntable
        off[O_NO] = pos
        pos += ntable
        off[O_DO] = pos
        pos += n_cards
        off[O_PL] = pos

        off[O_R_POINTS] = 0
        off[O_R_JOKERS] = 1
        off[O_R_TOK] = 2
        off[O_R_NB] = 2 + ntt
        off[O_R_BS] = 3 + ntt
        off[O_R_CS] = 3 + 2 * ntt
        off[O_R_NR] = 4 + 2 * ntt
        off[O_R_RID] = 5 + 2 * ntt
        off[O_R_RHID] = 5 + 2 * ntt + maxrc
        off[O_R_COINS] = 5 + 2 * ntt + 2 * maxrc
        off[O_R_RACT] = 6 + 2 * ntt + 2 * maxrc
        off[O_R_SWAPS] = 7 + 2 * ntt + 2 * maxrc
        off[O_R_BID] = 8 + 2 * ntt + 2 * maxrc
        stride = 8 + 2 * ntt + 2 * maxrc + n_cards
        off[O_PS] = stride
        off[O_SSIZE] = pos + p * stride

        off[O_CARDS] = cards_base
        off[O_NOBLES] = nobles_base
        off[O_DB] = db_base
        off[O_APAY] = 3
        off[O_ADISC] = 3 + ntt + 1
        off[O_AW] = 3 + 2 * (ntt + 1)

        self.off = np.array(off, dtype=np.int32)
        self.state_size = off[O_SSIZE]
        self.action_width = off[O_AW]
        self.n_cards = n_cards

    def new_state_buffer(self) -> np.ndarray:
        return np.zeros(self.state_size, dtype=np.int32)

    def new_action_buffer(self) -> np.ndarray:
        return np.zeros(self.action_width, dtype=np.int32)

    def card(self, card_id: int) -> Card:
        ntt = self.params.token_types
        base = int(self.off[O_CARDS]) + card_id * (2 + ntt)
        row = self.ctx[base : base + 2 + ntt]
        return Card(suit=int(row[0]), points=int(row[1]), cost=tuple(int(v) for v in row[2:]))

    def noble(self, noble_id: int) -> Noble:
        ntt = self.params.token_types
        base = int(self.off[O_NOBLES]) + noble_id * (1 + ntt)
        row = self.ctx[base : base + 1 + ntt]
        return Noble(points=int(row[0]), cost=tuple(int(v) for v in row[1:]))

    def deck_of_card(self, card_id: int) -> int:
        bounds = self.deck_bounds()
        for d in range(self.params.decks):
            if bounds[d] <= card_id < bounds[d + 1]:
                return d
        raise IndexError(card_id)

    def deck_bounds(self) -> list[int]:
        base = int(self.off[O_DB])
        return [int(v) for v in self.ctx[base : base + self.params.decks + 1]]


def event_buffer(capacity: int) -> np.ndarray:
    return np.zeros(capacity * EVENT_W, dtype=np.int32)


# Generous per-action event bound: payments and picks move at most
# maxT + jokers tokens twice, plus buy/points/noble/refill bookkeeping.
def max_events_per_action(params: GameParams) -> int:
    moves = 2 * (params.max_tokens + params.joker_count + params.pick_same_amount + 2)
    return moves + 16


def encoding_length(params: GameParams) -> int:
    """Closed-form length of the state encoding produced by the kernels.

    Walks the same slot structure the encoder writes: per deck a remaining
    count plus face-up card blocks, noble blocks, table token amounts with
    jokers, then per player points, token amounts, per-suit card counts and
    reserved card blocks.
    """
    ntt = params.token_types
    card_block = 2 * ntt + 1
    deck_part = params.decks * (1 + params.face_up * card_block)
    noble_part = params.table_nobles * (ntt + 1)
    board = deck_part + noble_part + (ntt + 1)
    player = 1 + (ntt + 1) + ntt + params.max_reserved * card_block
    return board + params.players * player
