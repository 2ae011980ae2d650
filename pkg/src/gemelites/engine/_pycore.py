"""Pure-Python engine core.

Reference implementation of the hot kernels: state reset, legal-action
sampling, action validation/application with event emission, random
advance, state encoding and event-feature accumulation. The compiled core
in `_ccore.pyx` implements the same functions over the same buffers; the
two must stay transcript-identical given equal RNG state (enforced by the
equivalence tests).

All kernels operate on the flat int32 buffers described in `layout.py` and
draw randomness from a one-cell uint64 splitmix64 state.
"""

from __future__ import annotations

from .layout import (
    A_ARG1,
    A_ARG2,
    A_KIND,
    C_D,
    C_FUC,
    C_MAXRC,
    C_MAXT,
    C_MAXTICKS,
    C_MINTPS,
    C_NCARDS,
    C_NJT,
    C_NNOBLES,
    C_NTABLE,
    C_NTPD,
    C_NTPS,
    C_NTT,
    C_NTTPD,
    C_P,
    C_PP,
    C_TPS,
    ENGINE,
    EV_CARD_BUY,
    EV_CARD_DRAW,
    EV_CARD_PLACE,
    EV_NOBLE_RECEIVE,
    EV_NOBLE_TAKE,
    EV_PLAYER_JOKER_DEC,
    EV_PLAYER_JOKER_INC,
    EV_PLAYER_TOKEN_DEC,
    EV_PLAYER_TOKEN_INC,
    EV_POINTS_FROM_CARD,
    EV_POINTS_FROM_NOBLE,
    EV_RESERVE_FACEUP,
    EV_RESERVE_HIDDEN,
    EV_TABLE_JOKER_DEC,
    EV_TABLE_JOKER_INC,
    EV_TABLE_TOKEN_DEC,
    EV_TABLE_TOKEN_INC,
    EVENT_W,
    INV_JOKER_CONSERVATION,
    INV_POINTS_MISMATCH,
    INV_RESERVED_LIMIT,
    INV_TOKEN_CONSERVATION,
    INV_TOKEN_LIMIT,
    K_BUY_FACEUP,
    K_BUY_RESERVED,
    K_PASS,
    K_PICK_DIFF,
    K_PICK_SAME,
    K_RESERVE_DECK,
    K_RESERVE_FACEUP,
    O_ADISC,
    O_APAY,
    O_CARDS,
    O_DB,
    O_DO,
    O_DP,
    O_FU,
    O_NO,
    O_NOBLES,
    O_NTID,
    O_PL,
    O_PS,
    O_R_BID,
    O_R_BS,
    O_R_COINS,
    O_R_CS,
    O_R_JOKERS,
    O_R_NB,
    O_R_NR,
    O_R_POINTS,
    O_R_RACT,
    O_R_RHID,
    O_R_RID,
    O_R_SWAPS,
    O_R_TOK,
    O_TJ,
    O_TT,
    S_CUR,
    S_FINAL,
    S_OVER,
    S_TICK,
)

BACKEND_NAME = "pure"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _rng_u64(rst) -> int:
    s = (int(rst[0]) + _GAMMA) & _MASK
    rst[0] = s
    z = s
    z ^= z >> 30
    z = (z * _M1) & _MASK
    z ^= z >> 27
    z = (z * _M2) & _MASK
    z ^= z >> 31
    return z


def _rng_below(rst, n: int) -> int:
    return ((_rng_u64(rst) >> 32) * n) >> 32


# ---------------------------------------------------------------- reset


def reset_state(s, c, off, rst) -> None:
    """Initialise a zeroed state buffer: shuffle decks, deal face-up cards,
    pick table nobles and fill the token bank. Emits no events."""
    s[:] = 0
    ntt = int(c[C_NTT])
    d = int(c[C_D])
    fuc = int(c[C_FUC])

    for t in range(ntt):
        s[off[O_TT] + t] = c[C_TPS]
    s[off[O_TJ]] = c[C_NJT]

    # Per-deck Fisher-Yates over the card ids of that deck's segment.
    do = int(off[O_DO])
    db = int(off[O_DB])
    for k in range(d):
        lo = int(c[db + k])
        hi = int(c[db + k + 1])
        for i in range(lo, hi):
            s[do + i] = i
        for i in range(hi - lo - 1, 0, -1):
            j = _rng_below(rst, i + 1)
            a, b = do + lo + i, do + lo + j
            s[a], s[b] = int(s[b]), int(s[a])

    # Nobles on the table: shuffled prefix of the noble list.
    n_nobles = int(c[C_NNOBLES])
    ntable = int(c[C_NTABLE])
    ids = list(range(n_nobles))
    for i in range(n_nobles - 1, 0, -1):
        j = _rng_below(rst, i + 1)
        ids[i], ids[j] = ids[j], ids[i]
    for k in range(ntable):
        s[off[O_NTID] + k] = ids[k]
        s[off[O_NO] + k] = -1

    # Deal the initial face-up cards.
    for k in range(d):
        lo = int(c[db + k])
        hi = int(c[db + k + 1])
        for slot in range(fuc):
            ptr = int(s[off[O_DP] + k])
            if lo + ptr < hi:
                s[off[O_FU] + k * fuc + slot] = s[do + lo + ptr]
                s[off[O_DP] + k] = ptr + 1
            else:
                s[off[O_FU] + k * fuc + slot] = -1

    p = int(c[C_P])
    for q in range(p):
        pb = int(off[O_PL]) + q * int(off[O_PS])
        for r in range(int(c[C_MAXRC])):
            s[pb + off[O_R_RID] + r] = -1


# ------------------------------------------------------------- helpers


def _player_base(s, off, player: int) -> int:
    return int(off[O_PL]) + player * int(off[O_PS])


def _card_base(c, off, card_id: int) -> int:
    ntt = int(c[C_NTT])
    return int(off[O_CARDS]) + card_id * (2 + ntt)


def _noble_base(c, off, noble_id: int) -> int:
    ntt = int(c[C_NTT])
    return int(off[O_NOBLES]) + noble_id * (1 + ntt)


def _payment_shortfall(s, c, off, pb: int, cb: int) -> int:
    """Jokers required to buy the card at `cb` after suit discounts and
    suit tokens; -1 when even jokers cannot cover it."""
    ntt = int(c[C_NTT])
    short = 0
    for t in range(ntt):
        need = int(c[cb + 2 + t]) - int(s[pb + off[O_R_BS] + t])
        if need > 0:
            lack = need - int(s[pb + off[O_R_TOK] + t])
            if lack > 0:
                short += lack
    if short > int(s[pb + off[O_R_JOKERS]]):
        return -1
    return short


def _token_total(s, c, off, pb: int) -> int:
    ntt = int(c[C_NTT])
    total = int(s[pb + off[O_R_JOKERS]])
    for t in range(ntt):
        total += int(s[pb + off[O_R_TOK] + t])
    return total


def _class_mask(s, c, off) -> int:
    """Bitmask of legal action classes for the current player."""
    ntt = int(c[C_NTT])
    d = int(c[C_D])
    fuc = int(c[C_FUC])
    p = int(s[S_CUR])
    pb = _player_base(s, off, p)
    mask = 0

    ntpd = int(c[C_NTPD])
    if ntpd >= 1 and int(c[C_NTTPD]) >= 1:
        for t in range(ntt):
            if int(s[off[O_TT] + t]) >= ntpd:
                mask |= 1 << K_PICK_DIFF
                break
    if int(c[C_NTPS]) >= 1:
        floor = max(int(c[C_MINTPS]), 1)
        for t in range(ntt):
            if int(s[off[O_TT] + t]) >= floor:
                mask |= 1 << K_PICK_SAME
                break
    if int(s[pb + off[O_R_NR]]) < int(c[C_MAXRC]):
        for i in range(d * fuc):
            if int(s[off[O_FU] + i]) >= 0:
                mask |= 1 << K_RESERVE_FACEUP
                break
        db = int(off[O_DB])
        for k in range(d):
            if int(s[off[O_DP] + k]) < int(c[db + k + 1]) - int(c[db + k]):
                mask |= 1 << K_RESERVE_DECK
                break
    for i in range(d * fuc):
        cid = int(s[off[O_FU] + i])
        if cid >= 0 and _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
            mask |= 1 << K_BUY_FACEUP
            break
    for r in range(int(s[pb + off[O_R_NR]])):
        cid = int(s[pb + off[O_R_RID] + r])
        if _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
            mask |= 1 << K_BUY_RESERVED
            break
    return mask


def _gains_of_action(s, c, off, ab, pb) -> tuple[list[int], int]:
    """Token gains (per suit, jokers) the action produces before discards."""
    ntt = int(c[C_NTT])
    gain = [0] * ntt
    jokers = 0
    kind = int(ab[A_KIND])
    if kind == K_PICK_DIFF:
        mask = int(ab[A_ARG1])
        for t in range(ntt):
            if (mask >> t) & 1:
                gain[t] = int(c[C_NTPD])
    elif kind == K_PICK_SAME:
        t = int(ab[A_ARG1])
        gain[t] = min(int(c[C_NTPS]), int(s[off[O_TT] + t]))
    elif kind in (K_RESERVE_FACEUP, K_RESERVE_DECK):
        if int(s[off[O_TJ]]) > 0:
            jokers = 1
    return gain, jokers


# ------------------------------------------------------------ sampling


def sample_action(s, c, off, rst, ab) -> None:
    """Sample a legal action uniformly over legal classes, then uniformly
    within the chosen class. Always succeeds: a pass is legal when nothing
    else is."""
    ab[:] = 0
    ntt = int(c[C_NTT])
    d = int(c[C_D])
    fuc = int(c[C_FUC])
    p = int(s[S_CUR])
    pb = _player_base(s, off, p)

    mask = _class_mask(s, c, off)
    if mask == 0:
        ab[A_KIND] = K_PASS
        return
    n_classes = bin(mask).count("1")
    pick = _rng_below(rst, n_classes)
    kind = -1
    for k in range(6):
        if (mask >> k) & 1:
            if pick == 0:
                kind = k
                break
            pick -= 1
    ab[A_KIND] = kind

    if kind == K_PICK_DIFF:
        ntpd = int(c[C_NTPD])
        avail = [t for t in range(ntt) if int(s[off[O_TT] + t]) >= ntpd]
        want = min(int(c[C_NTTPD]), len(avail))
        chosen = 0
        for _ in range(want):
            i = _rng_below(rst, len(avail))
            chosen |= 1 << avail.pop(i)
        ab[A_ARG1] = chosen
    elif kind == K_PICK_SAME:
        floor = max(int(c[C_MINTPS]), 1)
        avail = [t for t in range(ntt) if int(s[off[O_TT] + t]) >= floor]
        ab[A_ARG1] = avail[_rng_below(rst, len(avail))]
    elif kind == K_RESERVE_FACEUP:
        slots = [i for i in range(d * fuc) if int(s[off[O_FU] + i]) >= 0]
        i = slots[_rng_below(rst, len(slots))]
        ab[A_ARG1] = i // fuc
        ab[A_ARG2] = i % fuc
    elif kind == K_RESERVE_DECK:
        db = int(off[O_DB])
        decks = [
            k
            for k in range(d)
            if int(s[off[O_DP] + k]) < int(c[db + k + 1]) - int(c[db + k])
        ]
        ab[A_ARG1] = decks[_rng_below(rst, len(decks))]
    elif kind == K_BUY_FACEUP:
        slots = []
        for i in range(d * fuc):
            cid = int(s[off[O_FU] + i])
            if cid >= 0 and _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
                slots.append(i)
        i = slots[_rng_below(rst, len(slots))]
        ab[A_ARG1] = i // fuc
        ab[A_ARG2] = i % fuc
        _fill_canonical_payment(s, c, off, ab, pb, int(s[off[O_FU] + i]))
    elif kind == K_BUY_RESERVED:
        idxs = []
        for r in range(int(s[pb + off[O_R_NR]])):
            cid = int(s[pb + off[O_R_RID] + r])
            if _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
                idxs.append(r)
        r = idxs[_rng_below(rst, len(idxs))]
        ab[A_ARG1] = r
        _fill_canonical_payment(s, c, off, ab, pb, int(s[pb + off[O_R_RID] + r]))

    if kind in (K_PICK_DIFF, K_PICK_SAME, K_RESERVE_FACEUP, K_RESERVE_DECK):
        _sample_discards(s, c, off, rst, ab, pb)


def _fill_canonical_payment(s, c, off, ab, pb, card_id: int) -> None:
    """Suit tokens first, jokers only for the shortfall."""
    ntt = int(c[C_NTT])
    cb = _card_base(c, off, card_id)
    pay = int(off[O_APAY])
    jokers = 0
    for t in range(ntt):
        need = int(c[cb + 2 + t]) - int(s[pb + off[O_R_BS] + t])
        if need <= 0:
            continue
        have = int(s[pb + off[O_R_TOK] + t])
        ab[pay + t] = min(need, have)
        if need > have:
            jokers += need - have
    ab[pay + ntt] = jokers


def _sample_discards(s, c, off, rst, ab, pb) -> None:
    """If the action busts the hand limit, pick random tokens (possibly
    ones just gained) to return until the total is exactly maxT."""
    ntt = int(c[C_NTT])
    gain, gain_jokers = _gains_of_action(s, c, off, ab, pb)
    avail = [int(s[pb + off[O_R_TOK] + t]) + gain[t] for t in range(ntt)]
    avail.append(int(s[pb + off[O_R_JOKERS]]) + gain_jokers)
    total = sum(avail)
    overflow = total - int(c[C_MAXT])
    disc = int(off[O_ADISC])
    for _ in range(overflow):
        r = _rng_below(rst, total)
        for t in range(ntt + 1):
            if r < avail[t]:
                avail[t] -= 1
                ab[disc + t] += 1
                break
            r -= avail[t]
        total -= 1


# ---------------------------------------------------------- validation


def check_action(s, c, off, ab) -> int:
    """1 if the action is legal in the state, else 0."""
    if int(s[S_OVER]):
        return 0
    ntt = int(c[C_NTT])
    d = int(c[C_D])
    fuc = int(c[C_FUC])
    p = int(s[S_CUR])
    pb = _player_base(s, off, p)
    kind = int(ab[A_KIND])
    pay = int(off[O_APAY])
    disc = int(off[O_ADISC])

    if kind == K_PASS:
        return 1 if _class_mask(s, c, off) == 0 else 0

    if kind in (K_BUY_FACEUP, K_BUY_RESERVED):
        for t in range(ntt + 1):
            if int(ab[disc + t]) != 0:
                return 0
        if kind == K_BUY_FACEUP:
            deck, slot = int(ab[A_ARG1]), int(ab[A_ARG2])
            if not (0 <= deck < d and 0 <= slot < fuc):
                return 0
            cid = int(s[off[O_FU] + deck * fuc + slot])
            if cid < 0:
                return 0
        else:
            r = int(ab[A_ARG1])
            if not 0 <= r < int(s[pb + off[O_R_NR]]):
                return 0
            cid = int(s[pb + off[O_R_RID] + r])
        cb = _card_base(c, off, cid)
        joker_need = 0
        for t in range(ntt):
            need = max(0, int(c[cb + 2 + t]) - int(s[pb + off[O_R_BS] + t]))
            paid = int(ab[pay + t])
            if paid < 0 or paid > need or paid > int(s[pb + off[O_R_TOK] + t]):
                return 0
            joker_need += need - paid
        if int(ab[pay + ntt]) != joker_need:
            return 0
        if joker_need > int(s[pb + off[O_R_JOKERS]]):
            return 0
        return 1

    # Token-gaining actions: payments must be empty, discards must bring
    # the post-action total to exactly maxT (and only when over it).
    for t in range(ntt + 1):
        if int(ab[pay + t]) != 0:
            return 0

    if kind == K_PICK_DIFF:
        mask = int(ab[A_ARG1])
        if mask <= 0 or mask >> ntt:
            return 0
        ntpd = int(c[C_NTPD])
        if ntpd < 1:
            return 0
        n_avail = 0
        for t in range(ntt):
            if int(s[off[O_TT] + t]) >= ntpd:
                n_avail += 1
        size = bin(mask).count("1")
        if size != min(int(c[C_NTTPD]), n_avail) or size == 0:
            return 0
        for t in range(ntt):
            if (mask >> t) & 1 and int(s[off[O_TT] + t]) < ntpd:
                return 0
    elif kind == K_PICK_SAME:
        t = int(ab[A_ARG1])
        if not 0 <= t < ntt or int(c[C_NTPS]) < 1:
            return 0
        if int(s[off[O_TT] + t]) < max(int(c[C_MINTPS]), 1):
            return 0
    elif kind == K_RESERVE_FACEUP:
        deck, slot = int(ab[A_ARG1]), int(ab[A_ARG2])
        if not (0 <= deck < d and 0 <= slot < fuc):
            return 0
        if int(s[off[O_FU] + deck * fuc + slot]) < 0:
            return 0
        if int(s[pb + off[O_R_NR]]) >= int(c[C_MAXRC]):
            return 0
    elif kind == K_RESERVE_DECK:
        deck = int(ab[A_ARG1])
        if not 0 <= deck < d:
            return 0
        db = int(off[O_DB])
        if int(s[off[O_DP] + deck]) >= int(c[db + deck + 1]) - int(c[db + deck]):
            return 0
        if int(s[pb + off[O_R_NR]]) >= int(c[C_MAXRC]):
            return 0
    else:
        return 0

    gain, gain_jokers = _gains_of_action(s, c, off, ab, pb)
    total = _token_total(s, c, off, pb) + sum(gain) + gain_jokers
    overflow = max(0, total - int(c[C_MAXT]))
    disc_total = 0
    for t in range(ntt):
        want = int(ab[disc + t])
        if want < 0 or want > int(s[pb + off[O_R_TOK] + t]) + gain[t]:
            return 0
        disc_total += want
    want_j = int(ab[disc + ntt])
    if want_j < 0 or want_j > int(s[pb + off[O_R_JOKERS]]) + gain_jokers:
        return 0
    disc_total += want_j
    if disc_total != overflow:
        return 0
    return 1


# ------------------------------------------------------------ applying


def _emit(eb, eo, etype, who, tick, a, b) -> int:
    base = eo * EVENT_W
    eb[base] = etype
    eb[base + 1] = who
    eb[base + 2] = tick
    eb[base + 3] = a
    eb[base + 4] = b
    return eo + 1


def _refill_slot(s, c, off, eb, eo, who, tick, deck, slot) -> int:
    fuc = int(c[C_FUC])
    db = int(off[O_DB])
    lo = int(c[db + deck])
    hi = int(c[db + deck + 1])
    ptr = int(s[off[O_DP] + deck])
    if lo + ptr < hi:
        cid = int(s[off[O_DO] + lo + ptr])
        s[off[O_DP] + deck] = ptr + 1
        s[off[O_FU] + deck * fuc + slot] = cid
        eo = _emit(eb, eo, EV_CARD_DRAW, who, tick, deck, cid)
        eo = _emit(eb, eo, EV_CARD_PLACE, who, tick, deck, slot)
    else:
        s[off[O_FU] + deck * fuc + slot] = -1
    return eo


def _award_noble(s, c, off, eb, eo, who, tick, pb) -> int:
    ntt = int(c[C_NTT])
    for k in range(int(c[C_NTABLE])):
        if int(s[off[O_NO] + k]) != -1:
            continue
        nid = int(s[off[O_NTID] + k])
        nb = _noble_base(c, off, nid)
        ok = True
        for t in range(ntt):
            if int(s[pb + off[O_R_BS] + t]) < int(c[nb + 1 + t]):
                ok = False
                break
        if not ok:
            continue
        npoints = int(c[nb])
        s[off[O_NO] + k] = who
        s[pb + off[O_R_POINTS]] += npoints
        eo = _emit(eb, eo, EV_NOBLE_TAKE, who, tick, k, nid)
        eo = _emit(eb, eo, EV_NOBLE_RECEIVE, who, tick, nid, npoints)
        eo = _emit(eb, eo, EV_POINTS_FROM_NOBLE, ENGINE, tick, who, npoints)
        break
    return eo


def apply_action(s, c, off, ab, eb, eo) -> int:
    """Apply an action in place. Returns the new event-buffer offset, or
    -1 if the action is illegal (the state is then untouched)."""
    if not check_action(s, c, off, ab):
        return -1
    ntt = int(c[C_NTT])
    fuc = int(c[C_FUC])
    who = int(s[S_CUR])
    tick = int(s[S_TICK])
    pb = _player_base(s, off, who)
    kind = int(ab[A_KIND])
    pay = int(off[O_APAY])
    disc = int(off[O_ADISC])

    if kind == K_PICK_DIFF or kind == K_PICK_SAME:
        gain, _ = _gains_of_action(s, c, off, ab, pb)
        picked = 0
        for t in range(ntt):
            for _ in range(gain[t]):
                s[off[O_TT] + t] -= 1
                s[pb + off[O_R_TOK] + t] += 1
                eo = _emit(eb, eo, EV_TABLE_TOKEN_DEC, who, tick, t, 0)
                eo = _emit(eb, eo, EV_PLAYER_TOKEN_INC, who, tick, t, 0)
                picked += 1
        s[pb + off[O_R_COINS]] += picked

    elif kind == K_RESERVE_FACEUP or kind == K_RESERVE_DECK:
        deck = int(ab[A_ARG1])
        if kind == K_RESERVE_FACEUP:
            slot = int(ab[A_ARG2])
            cid = int(s[off[O_FU] + deck * fuc + slot])
            hidden = 0
            eo = _emit(eb, eo, EV_RESERVE_FACEUP, who, tick, deck, slot)
        else:
            db = int(off[O_DB])
            lo = int(c[db + deck])
            ptr = int(s[off[O_DP] + deck])
            cid = int(s[off[O_DO] + lo + ptr])
            s[off[O_DP] + deck] = ptr + 1
            hidden = 1
            eo = _emit(eb, eo, EV_RESERVE_HIDDEN, who, tick, deck, cid)
        nr = int(s[pb + off[O_R_NR]])
        s[pb + off[O_R_RID] + nr] = cid
        s[pb + off[O_R_RHID] + nr] = hidden
        s[pb + off[O_R_NR]] = nr + 1
        s[pb + off[O_R_RACT]] += 1
        if int(s[off[O_TJ]]) > 0:
            s[off[O_TJ]] -= 1
            s[pb + off[O_R_JOKERS]] += 1
            s[pb + off[O_R_COINS]] += 1
            eo = _emit(eb, eo, EV_TABLE_JOKER_DEC, who, tick, 0, 0)
            eo = _emit(eb, eo, EV_PLAYER_JOKER_INC, who, tick, 0, 0)
        if kind == K_RESERVE_FACEUP:
            eo = _refill_slot(s, c, off, eb, eo, who, tick, deck, slot)

    elif kind == K_BUY_FACEUP or kind == K_BUY_RESERVED:
        if kind == K_BUY_FACEUP:
            deck = int(ab[A_ARG1])
            slot = int(ab[A_ARG2])
            cid = int(s[off[O_FU] + deck * fuc + slot])
        else:
            r = int(ab[A_ARG1])
            cid = int(s[pb + off[O_R_RID] + r])
            nr = int(s[pb + off[O_R_NR]])
            for i in range(r, nr - 1):
                s[pb + off[O_R_RID] + i] = int(s[pb + off[O_R_RID] + i + 1])
                s[pb + off[O_R_RHID] + i] = int(s[pb + off[O_R_RHID] + i + 1])
            s[pb + off[O_R_RID] + nr - 1] = -1
            s[pb + off[O_R_RHID] + nr - 1] = 0
            s[pb + off[O_R_NR]] = nr - 1
        for t in range(ntt):
            for _ in range(int(ab[pay + t])):
                s[pb + off[O_R_TOK] + t] -= 1
                s[off[O_TT] + t] += 1
                eo = _emit(eb, eo, EV_PLAYER_TOKEN_DEC, who, tick, t, 0)
                eo = _emit(eb, eo, EV_TABLE_TOKEN_INC, who, tick, t, 0)
        for _ in range(int(ab[pay + ntt])):
            s[pb + off[O_R_JOKERS]] -= 1
            s[off[O_TJ]] += 1
            eo = _emit(eb, eo, EV_PLAYER_JOKER_DEC, who, tick, 0, 0)
            eo = _emit(eb, eo, EV_TABLE_JOKER_INC, who, tick, 0, 0)
        cb = _card_base(c, off, cid)
        suit = int(c[cb])
        points = int(c[cb + 1])
        cost_total = 0
        for t in range(ntt):
            cost_total += int(c[cb + 2 + t])
        nb = int(s[pb + off[O_R_NB]])
        s[pb + off[O_R_BID] + nb] = cid
        s[pb + off[O_R_NB]] = nb + 1
        s[pb + off[O_R_BS] + suit] += 1
        s[pb + off[O_R_CS]] += cost_total
        eo = _emit(eb, eo, EV_CARD_BUY, who, tick, cid, cost_total)
        if points > 0:
            s[pb + off[O_R_POINTS]] += points
            eo = _emit(eb, eo, EV_POINTS_FROM_CARD, who, tick, points, 0)
        if kind == K_BUY_FACEUP:
            eo = _refill_slot(s, c, off, eb, eo, who, tick, deck, slot)
        eo = _award_noble(s, c, off, eb, eo, who, tick, pb)

    # Discards (pick/reserve actions over the hand limit).
    discarded = 0
    for t in range(ntt):
        for _ in range(int(ab[disc + t])):
            s[pb + off[O_R_TOK] + t] -= 1
            s[off[O_TT] + t] += 1
            eo = _emit(eb, eo, EV_PLAYER_TOKEN_DEC, who, tick, t, 0)
            eo = _emit(eb, eo, EV_TABLE_TOKEN_INC, who, tick, t, 0)
            discarded += 1
    for _ in range(int(ab[disc + ntt])):
        s[pb + off[O_R_JOKERS]] -= 1
        s[off[O_TJ]] += 1
        eo = _emit(eb, eo, EV_PLAYER_JOKER_DEC, who, tick, 0, 0)
        eo = _emit(eb, eo, EV_TABLE_JOKER_INC, who, tick, 0, 0)
        discarded += 1
    if discarded > 0:
        s[pb + off[O_R_SWAPS]] += 1

    # Turn end: trigger the final round at the end point, finish the round
    # when play wraps to the first seat, and enforce the hard tick cap.
    s[S_TICK] = tick + 1
    if int(s[pb + off[O_R_POINTS]]) >= int(c[C_PP]):
        s[S_FINAL] = 1
    nxt = (who + 1) % int(c[C_P])
    s[S_CUR] = nxt
    if int(s[S_FINAL]) and nxt == 0:
        s[S_OVER] = 1
    if tick + 1 >= int(c[C_MAXTICKS]):
        s[S_OVER] = 1
    return eo


def advance_random(s, c, off, rst, ab, eb, eo) -> int:
    """Fused sample+apply for random play. Returns the new event offset."""
    sample_action(s, c, off, rst, ab)
    return apply_action(s, c, off, ab, eb, eo)


# ------------------------------------------------------------ encoding


def encode_state(s, c, off, player, out) -> int:
    """Write the hierarchical numeric view of the state for `player` into
    `out` (float64). Returns the number of values written.

    Board first (deck remainders, face-up card blocks, noble blocks, table
    token amounts with jokers), then players starting with `player`. A card
    block is one-hot suit, cost vector, points; empty slots and reserved
    cards hidden from `player` are zero blocks.
    """
    ntt = int(c[C_NTT])
    d = int(c[C_D])
    fuc = int(c[C_FUC])
    nplayers = int(c[C_P])
    maxrc = int(c[C_MAXRC])
    card_block = 2 * ntt + 1
    db = int(off[O_DB])
    i = 0

    for k in range(d):
        lo = int(c[db + k])
        hi = int(c[db + k + 1])
        out[i] = (hi - lo) - int(s[off[O_DP] + k])
        i += 1
        for slot in range(fuc):
            cid = int(s[off[O_FU] + k * fuc + slot])
            if cid < 0:
                for _ in range(card_block):
                    out[i] = 0.0
                    i += 1
            else:
                i = _write_card_block(c, off, cid, out, i, ntt)

    for k in range(int(c[C_NTABLE])):
        if int(s[off[O_NO] + k]) == -1:
            nb = _noble_base(c, off, int(s[off[O_NTID] + k]))
            out[i] = int(c[nb])
            i += 1
            for t in range(ntt):
                out[i] = int(c[nb + 1 + t])
                i += 1
        else:
            for _ in range(ntt + 1):
                out[i] = 0.0
                i += 1

    for t in range(ntt):
        out[i] = int(s[off[O_TT] + t])
        i += 1
    out[i] = int(s[off[O_TJ]])
    i += 1

    for k in range(nplayers):
        q = (player + k) % nplayers
        pb = _player_base(s, off, q)
        out[i] = int(s[pb + off[O_R_POINTS]])
        i += 1
        for t in range(ntt):
            out[i] = int(s[pb + off[O_R_TOK] + t])
            i += 1
        out[i] = int(s[pb + off[O_R_JOKERS]])
        i += 1
        for t in range(ntt):
            out[i] = int(s[pb + off[O_R_BS] + t])
            i += 1
        nr = int(s[pb + off[O_R_NR]])
        for r in range(maxrc):
            visible = r < nr and (q == player or int(s[pb + off[O_R_RHID] + r]) == 0)
            if visible:
                i = _write_card_block(c, off, int(s[pb + off[O_R_RID] + r]), out, i, ntt)
            else:
                for _ in range(card_block):
                    out[i] = 0.0
                    i += 1
    return i


def _write_card_block(c, off, cid, out, i, ntt) -> int:
    cb = _card_base(c, off, cid)
    suit = int(c[cb])
    for t in range(ntt):
        out[i] = 1.0 if t == suit else 0.0
        i += 1
    for t in range(ntt):
        out[i] = int(c[cb + 2 + t])
        i += 1
    out[i] = int(c[cb + 1])
    return i + 1


def sf_delta(s0, s1, c, off, player, w, e0, e1) -> float:
    """dot(w, encode(s1)) - dot(w, encode(s0)) with a fixed summation
    order shared by both cores; e0/e1 are caller scratch buffers."""
    n = encode_state(s0, c, off, player, e0)
    encode_state(s1, c, off, player, e1)
    total = 0.0
    for i in range(n):
        total += w[i] * (e1[i] - e0[i])
    return total


def ef_accumulate(eb, lo, hi, player, mapping, w) -> float:
    """Sum of weights of mapped features over the player's events in rows
    [lo, hi): own events plus engine events crediting the player."""
    total = 0.0
    for i in range(lo, hi):
        base = i * EVENT_W
        etype = int(eb[base])
        who = int(eb[base + 1])
        if who == player or (
            etype == EV_POINTS_FROM_NOBLE and who == ENGINE and int(eb[base + 3]) == player
        ):
            f = int(mapping[etype])
            if f >= 0:
                total += w[f]
    return total


# ----------------------------------------------------------- checking


def check_invariants(s, c, off) -> int:
    """Bitmask of violated structural invariants (0 = all good)."""
    ntt = int(c[C_NTT])
    nplayers = int(c[C_P])
    bad = 0

    for t in range(ntt):
        total = int(s[off[O_TT] + t])
        for q in range(nplayers):
            total += int(s[_player_base(s, off, q) + off[O_R_TOK] + t])
        if total != int(c[C_TPS]):
            bad |= INV_TOKEN_CONSERVATION
            break
    total_j = int(s[off[O_TJ]])
    for q in range(nplayers):
        total_j += int(s[_player_base(s, off, q) + off[O_R_JOKERS]])
    if total_j != int(c[C_NJT]):
        bad |= INV_JOKER_CONSERVATION

    for q in range(nplayers):
        pb = _player_base(s, off, q)
        if int(s[pb + off[O_R_NR]]) > int(c[C_MAXRC]):
            bad |= INV_RESERVED_LIMIT
        if _token_total(s, c, off, pb) > int(c[C_MAXT]):
            bad |= INV_TOKEN_LIMIT
        points = 0
        for i in range(int(s[pb + off[O_R_NB]])):
            points += int(c[_card_base(c, off, int(s[pb + off[O_R_BID] + i])) + 1])
        for k in range(int(c[C_NTABLE])):
            if int(s[off[O_NO] + k]) == q:
                points += int(c[_noble_base(c, off, int(s[off[O_NTID] + k]))])
        if points != int(s[pb + off[O_R_POINTS]]):
            bad |= INV_POINTS_MISMATCH
    return bad
