# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled engine core.

Transliteration of `_pycore.py` over the same flat buffers and the same
splitmix64 stream; given equal RNG state the two cores produce identical
transcripts (the equivalence tests assert this). Any semantic change must
be made in both files.
"""

from libc.stdlib cimport free, malloc

BACKEND_NAME = "compiled"

ctypedef unsigned long long u64

# --- ctx header ---
cdef enum:
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

# --- state header ---
cdef enum:
    S_CUR = 0
    S_TICK = 1
    S_FINAL = 2
    S_OVER = 3

# --- off indices ---
cdef enum:
    O_TT = 0
    O_TJ = 1
    O_DP = 2
    O_FU = 3
    O_NTID = 4
    O_NO = 5
    O_DO = 6
    O_PL = 7
    O_PS = 8
    O_R_POINTS = 9
    O_R_JOKERS = 10
    O_R_TOK = 11
    O_R_NB = 12
    O_R_BS = 13
    O_R_CS = 14
    O_R_NR = 15
    O_R_RID = 16
    O_R_RHID = 17
    O_R_COINS = 18
    O_R_RACT = 19
    O_R_SWAPS = 20
    O_R_BID = 21
    O_CARDS = 22
    O_NOBLES = 23
    O_DB = 24
    O_AW = 25
    O_APAY = 26
    O_ADISC = 27
    O_SSIZE = 28

# --- actions ---
cdef enum:
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
cdef enum:
    EVENT_W = 5
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

cdef enum:
    INV_TOKEN_CONSERVATION = 1
    INV_JOKER_CONSERVATION = 2
    INV_RESERVED_LIMIT = 4
    INV_TOKEN_LIMIT = 8
    INV_POINTS_MISMATCH = 16

cdef u64 _GAMMA = 0x9E3779B97F4A7C15ULL
cdef u64 _M1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _M2 = 0x94D049BB133111EBULL


cdef inline u64 _rng_u64(u64[::1] rst) nogil:
    cdef u64 z
    rst[0] = rst[0] + _GAMMA
    z = rst[0]
    z ^= z >> 30
    z = z * _M1
    z ^= z >> 27
    z = z * _M2
    z ^= z >> 31
    return z


cdef inline int _rng_below(u64[::1] rst, int n) nogil:
    return <int>(((_rng_u64(rst) >> 32) * <u64>n) >> 32)


# ---------------------------------------------------------------- reset


def reset_state(int[::1] s, int[::1] c, int[::1] off, u64[::1] rst):
    cdef int ntt = c[C_NTT]
    cdef int d = c[C_D]
    cdef int fuc = c[C_FUC]
    cdef int i, j, k, t, q, r, slot, lo, hi, ptr, tmp
    cdef int do_ = off[O_DO]
    cdef int db = off[O_DB]
    cdef int n_nobles, ntable, pb
    cdef int* ids

    for i in range(off[O_SSIZE]):
        s[i] = 0

    for t in range(ntt):
        s[off[O_TT] + t] = c[C_TPS]
    s[off[O_TJ]] = c[C_NJT]

    for k in range(d):
        lo = c[db + k]
        hi = c[db + k + 1]
        for i in range(lo, hi):
            s[do_ + i] = i
        for i in range(hi - lo - 1, 0, -1):
            j = _rng_below(rst, i + 1)
            tmp = s[do_ + lo + i]
            s[do_ + lo + i] = s[do_ + lo + j]
            s[do_ + lo + j] = tmp

    n_nobles = c[C_NNOBLES]
    ntable = c[C_NTABLE]
    ids = <int*>malloc(n_nobles * sizeof(int))
    if ids == NULL:
        raise MemoryError()
    try:
        for i in range(n_nobles):
            ids[i] = i
        for i in range(n_nobles - 1, 0, -1):
            j = _rng_below(rst, i + 1)
            tmp = ids[i]
            ids[i] = ids[j]
            ids[j] = tmp
        for k in range(ntable):
            s[off[O_NTID] + k] = ids[k]
            s[off[O_NO] + k] = -1
    finally:
        free(ids)

    for k in range(d):
        lo = c[db + k]
        hi = c[db + k + 1]
        for slot in range(fuc):
            ptr = s[off[O_DP] + k]
            if lo + ptr < hi:
                s[off[O_FU] + k * fuc + slot] = s[do_ + lo + ptr]
                s[off[O_DP] + k] = ptr + 1
            else:
                s[off[O_FU] + k * fuc + slot] = -1

    for q in range(c[C_P]):
        pb = off[O_PL] + q * off[O_PS]
        for r in range(c[C_MAXRC]):
            s[pb + off[O_R_RID] + r] = -1


# ------------------------------------------------------------- helpers


cdef inline int _player_base(int[::1] off, int player) nogil:
    return off[O_PL] + player * off[O_PS]


cdef inline int _card_base(int[::1] c, int[::1] off, int card_id) nogil:
    return off[O_CARDS] + card_id * (2 + c[C_NTT])


cdef inline int _noble_base(int[::1] c, int[::1] off, int noble_id) nogil:
    return off[O_NOBLES] + noble_id * (1 + c[C_NTT])


cdef int _payment_shortfall(int[::1] s, int[::1] c, int[::1] off, int pb, int cb) nogil:
    cdef int ntt = c[C_NTT]
    cdef int short_ = 0
    cdef int t, need, lack
    for t in range(ntt):
        need = c[cb + 2 + t] - s[pb + off[O_R_BS] + t]
        if need > 0:
            lack = need - s[pb + off[O_R_TOK] + t]
            if lack > 0:
                short_ += lack
    if short_ > s[pb + off[O_R_JOKERS]]:
        return -1
    return short_


cdef inline int _token_total(int[::1] s, int[::1] c, int[::1] off, int pb) nogil:
    cdef int total = s[pb + off[O_R_JOKERS]]
    cdef int t
    for t in range(c[C_NTT]):
        total += s[pb + off[O_R_TOK] + t]
    return total


cdef int _class_mask(int[::1] s, int[::1] c, int[::1] off) nogil:
    cdef int ntt = c[C_NTT]
    cdef int d = c[C_D]
    cdef int fuc = c[C_FUC]
    cdef int p = s[S_CUR]
    cdef int pb = _player_base(off, p)
    cdef int mask = 0
    cdef int t, i, k, r, cid, floor_, db

    cdef int ntpd = c[C_NTPD]
    if ntpd >= 1 and c[C_NTTPD] >= 1:
        for t in range(ntt):
            if s[off[O_TT] + t] >= ntpd:
                mask |= 1 << K_PICK_DIFF
                break
    if c[C_NTPS] >= 1:
        floor_ = c[C_MINTPS]
        if floor_ < 1:
            floor_ = 1
        for t in range(ntt):
            if s[off[O_TT] + t] >= floor_:
                mask |= 1 << K_PICK_SAME
                break
    if s[pb + off[O_R_NR]] < c[C_MAXRC]:
        for i in range(d * fuc):
            if s[off[O_FU] + i] >= 0:
                mask |= 1 << K_RESERVE_FACEUP
                break
        db = off[O_DB]
        for k in range(d):
            if s[off[O_DP] + k] < c[db + k + 1] - c[db + k]:
                mask |= 1 << K_RESERVE_DECK
                break
    for i in range(d * fuc):
        cid = s[off[O_FU] + i]
        if cid >= 0 and _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
            mask |= 1 << K_BUY_FACEUP
            break
    for r in range(s[pb + off[O_R_NR]]):
        cid = s[pb + off[O_R_RID] + r]
        if _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
            mask |= 1 << K_BUY_RESERVED
            break
    return mask


cdef void _gains_of_action(int[::1] s, int[::1] c, int[::1] off, int[::1] ab,
                           int pb, int* gain, int* gain_jokers) nogil:
    cdef int ntt = c[C_NTT]
    cdef int t, mask
    cdef int kind = ab[A_KIND]
    for t in range(ntt):
        gain[t] = 0
    gain_jokers[0] = 0
    if kind == K_PICK_DIFF:
        mask = ab[A_ARG1]
        for t in range(ntt):
            if (mask >> t) & 1:
                gain[t] = c[C_NTPD]
    elif kind == K_PICK_SAME:
        t = ab[A_ARG1]
        gain[t] = c[C_NTPS]
        if s[off[O_TT] + t] < gain[t]:
            gain[t] = s[off[O_TT] + t]
    elif kind == K_RESERVE_FACEUP or kind == K_RESERVE_DECK:
        if s[off[O_TJ]] > 0:
            gain_jokers[0] = 1


# ------------------------------------------------------------ sampling


def sample_action(int[::1] s, int[::1] c, int[::1] off, u64[::1] rst, int[::1] ab):
    cdef int ntt = c[C_NTT]
    cdef int d = c[C_D]
    cdef int fuc = c[C_FUC]
    cdef int p = s[S_CUR]
    cdef int pb = _player_base(off, p)
    cdef int i, k, t, r, n, pick, kind, cid, want, chosen, floor_, db
    cdef int avail[33]
    cdef int n_avail

    for i in range(off[O_AW]):
        ab[i] = 0

    cdef int mask = _class_mask(s, c, off)
    if mask == 0:
        ab[A_KIND] = K_PASS
        return
    n = 0
    for k in range(6):
        if (mask >> k) & 1:
            n += 1
    pick = _rng_below(rst, n)
    kind = -1
    for k in range(6):
        if (mask >> k) & 1:
            if pick == 0:
                kind = k
                break
            pick -= 1
    ab[A_KIND] = kind

    if kind == K_PICK_DIFF:
        n_avail = 0
        for t in range(ntt):
            if s[off[O_TT] + t] >= c[C_NTPD]:
                avail[n_avail] = t
                n_avail += 1
        want = c[C_NTTPD]
        if n_avail < want:
            want = n_avail
        chosen = 0
        for k in range(want):
            i = _rng_below(rst, n_avail)
            chosen |= 1 << avail[i]
            n_avail -= 1
            for t in range(i, n_avail):
                avail[t] = avail[t + 1]
        ab[A_ARG1] = chosen
    elif kind == K_PICK_SAME:
        floor_ = c[C_MINTPS]
        if floor_ < 1:
            floor_ = 1
        n_avail = 0
        for t in range(ntt):
            if s[off[O_TT] + t] >= floor_:
                avail[n_avail] = t
                n_avail += 1
        ab[A_ARG1] = avail[_rng_below(rst, n_avail)]
    elif kind == K_RESERVE_FACEUP:
        n = 0
        for i in range(d * fuc):
            if s[off[O_FU] + i] >= 0:
                n += 1
        pick = _rng_below(rst, n)
        for i in range(d * fuc):
            if s[off[O_FU] + i] >= 0:
                if pick == 0:
                    ab[A_ARG1] = i / fuc
                    ab[A_ARG2] = i % fuc
                    break
                pick -= 1
    elif kind == K_RESERVE_DECK:
        db = off[O_DB]
        n = 0
        for k in range(d):
            if s[off[O_DP] + k] < c[db + k + 1] - c[db + k]:
                n += 1
        pick = _rng_below(rst, n)
        for k in range(d):
            if s[off[O_DP] + k] < c[db + k + 1] - c[db + k]:
                if pick == 0:
                    ab[A_ARG1] = k
                    break
                pick -= 1
    elif kind == K_BUY_FACEUP:
        n = 0
        for i in range(d * fuc):
            cid = s[off[O_FU] + i]
            if cid >= 0 and _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
                n += 1
        pick = _rng_below(rst, n)
        for i in range(d * fuc):
            cid = s[off[O_FU] + i]
            if cid >= 0 and _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
                if pick == 0:
                    ab[A_ARG1] = i / fuc
                    ab[A_ARG2] = i % fuc
                    _fill_canonical_payment(s, c, off, ab, pb, cid)
                    break
                pick -= 1
    elif kind == K_BUY_RESERVED:
        n = 0
        for r in range(s[pb + off[O_R_NR]]):
            cid = s[pb + off[O_R_RID] + r]
            if _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
                n += 1
        pick = _rng_below(rst, n)
        for r in range(s[pb + off[O_R_NR]]):
            cid = s[pb + off[O_R_RID] + r]
            if _payment_shortfall(s, c, off, pb, _card_base(c, off, cid)) >= 0:
                if pick == 0:
                    ab[A_ARG1] = r
                    _fill_canonical_payment(s, c, off, ab, pb, cid)
                    break
                pick -= 1

    if kind == K_PICK_DIFF or kind == K_PICK_SAME or kind == K_RESERVE_FACEUP or kind == K_RESERVE_DECK:
        _sample_discards(s, c, off, rst, ab, pb)


cdef void _fill_canonical_payment(int[::1] s, int[::1] c, int[::1] off,
                                  int[::1] ab, int pb, int card_id) nogil:
    cdef int ntt = c[C_NTT]
    cdef int cb = _card_base(c, off, card_id)
    cdef int pay = off[O_APAY]
    cdef int jokers = 0
    cdef int t, need, have
    for t in range(ntt):
        need = c[cb + 2 + t] - s[pb + off[O_R_BS] + t]
        if need <= 0:
            continue
        have = s[pb + off[O_R_TOK] + t]
        ab[pay + t] = need if need < have else have
        if need > have:
            jokers += need - have
    ab[pay + ntt] = jokers


cdef void _sample_discards(int[::1] s, int[::1] c, int[::1] off, u64[::1] rst,
                           int[::1] ab, int pb) nogil:
    cdef int ntt = c[C_NTT]
    cdef int gain[32]
    cdef int gain_jokers
    cdef int avail[33]
    cdef int t, total, overflow, r, k
    cdef int disc = off[O_ADISC]

    _gains_of_action(s, c, off, ab, pb, gain, &gain_jokers)
    total = 0
    for t in range(ntt):
        avail[t] = s[pb + off[O_R_TOK] + t] + gain[t]
        total += avail[t]
    avail[ntt] = s[pb + off[O_R_JOKERS]] + gain_jokers
    total += avail[ntt]
    overflow = total - c[C_MAXT]
    for k in range(overflow):
        r = _rng_below(rst, total)
        for t in range(ntt + 1):
            if r < avail[t]:
                avail[t] -= 1
                ab[disc + t] += 1
                break
            r -= avail[t]
        total -= 1


# ---------------------------------------------------------- validation


def check_action(int[::1] s, int[::1] c, int[::1] off, int[::1] ab):
    return _check_action(s, c, off, ab)


cdef int _check_action(int[::1] s, int[::1] c, int[::1] off, int[::1] ab) nogil:
    if s[S_OVER]:
        return 0
    cdef int ntt = c[C_NTT]
    cdef int d = c[C_D]
    cdef int fuc = c[C_FUC]
    cdef int p = s[S_CUR]
    cdef int pb = _player_base(off, p)
    cdef int kind = ab[A_KIND]
    cdef int pay = off[O_APAY]
    cdef int disc = off[O_ADISC]
    cdef int t, deck, slot, cid, cb, r, need, paid, joker_need
    cdef int mask, ntpd, n_avail, size, floor_, db
    cdef int gain[32]
    cdef int gain_jokers
    cdef int total, overflow, disc_total, want, want_j

    if kind == K_PASS:
        return 1 if _class_mask(s, c, off) == 0 else 0

    if kind == K_BUY_FACEUP or kind == K_BUY_RESERVED:
        for t in range(ntt + 1):
            if ab[disc + t] != 0:
                return 0
        if kind == K_BUY_FACEUP:
            deck = ab[A_ARG1]
            slot = ab[A_ARG2]
            if deck < 0 or deck >= d or slot < 0 or slot >= fuc:
                return 0
            cid = s[off[O_FU] + deck * fuc + slot]
            if cid < 0:
                return 0
        else:
            r = ab[A_ARG1]
            if r < 0 or r >= s[pb + off[O_R_NR]]:
                return 0
            cid = s[pb + off[O_R_RID] + r]
        cb = _card_base(c, off, cid)
        joker_need = 0
        for t in range(ntt):
            need = c[cb + 2 + t] - s[pb + off[O_R_BS] + t]
            if need < 0:
                need = 0
            paid = ab[pay + t]
            if paid < 0 or paid > need or paid > s[pb + off[O_R_TOK] + t]:
                return 0
            joker_need += need - paid
        if ab[pay + ntt] != joker_need:
            return 0
        if joker_need > s[pb + off[O_R_JOKERS]]:
            return 0
        return 1

    for t in range(ntt + 1):
        if ab[pay + t] != 0:
            return 0

    if kind == K_PICK_DIFF:
        mask = ab[A_ARG1]
        if mask <= 0 or (mask >> ntt) != 0:
            return 0
        ntpd = c[C_NTPD]
        if ntpd < 1:
            return 0
        n_avail = 0
        for t in range(ntt):
            if s[off[O_TT] + t] >= ntpd:
                n_avail += 1
        size = 0
        for t in range(ntt):
            if (mask >> t) & 1:
                size += 1
        want = c[C_NTTPD]
        if n_avail < want:
            want = n_avail
        if size != want or size == 0:
            return 0
        for t in range(ntt):
            if ((mask >> t) & 1) and s[off[O_TT] + t] < ntpd:
                return 0
    elif kind == K_PICK_SAME:
        t = ab[A_ARG1]
        if t < 0 or t >= ntt or c[C_NTPS] < 1:
            return 0
        floor_ = c[C_MINTPS]
        if floor_ < 1:
            floor_ = 1
        if s[off[O_TT] + t] < floor_:
            return 0
    elif kind == K_RESERVE_FACEUP:
        deck = ab[A_ARG1]
        slot = ab[A_ARG2]
        if deck < 0 or deck >= d or slot < 0 or slot >= fuc:
            return 0
        if s[off[O_FU] + deck * fuc + slot] < 0:
            return 0
        if s[pb + off[O_R_NR]] >= c[C_MAXRC]:
            return 0
    elif kind == K_RESERVE_DECK:
        deck = ab[A_ARG1]
        if deck < 0 or deck >= d:
            return 0
        db = off[O_DB]
        if s[off[O_DP] + deck] >= c[db + deck + 1] - c[db + deck]:
            return 0
        if s[pb + off[O_R_NR]] >= c[C_MAXRC]:
            return 0
    else:
        return 0

    _gains_of_action(s, c, off, ab, pb, gain, &gain_jokers)
    total = _token_total(s, c, off, pb) + gain_jokers
    for t in range(ntt):
        total += gain[t]
    overflow = total - c[C_MAXT]
    if overflow < 0:
        overflow = 0
    disc_total = 0
    for t in range(ntt):
        want = ab[disc + t]
        if want < 0 or want > s[pb + off[O_R_TOK] + t] + gain[t]:
            return 0
        disc_total += want
    want_j = ab[disc + ntt]
    if want_j < 0 or want_j > s[pb + off[O_R_JOKERS]] + gain_jokers:
        return 0
    disc_total += want_j
    if disc_total != overflow:
        return 0
    return 1


# ------------------------------------------------------------ applying


cdef inline int _emit(int[::1] eb, int eo, int etype, int who, int tick, int a, int b) nogil:
    cdef int base = eo * EVENT_W
    eb[base] = etype
    eb[base + 1] = who
    eb[base + 2] = tick
    eb[base + 3] = a
    eb[base + 4] = b
    return eo + 1


cdef int _refill_slot(int[::1] s, int[::1] c, int[::1] off, int[::1] eb, int eo,
                      int who, int tick, int deck, int slot) nogil:
    cdef int fuc = c[C_FUC]
    cdef int db = off[O_DB]
    cdef int lo = c[db + deck]
    cdef int hi = c[db + deck + 1]
    cdef int ptr = s[off[O_DP] + deck]
    cdef int cid
    if lo + ptr < hi:
        cid = s[off[O_DO] + lo + ptr]
        s[off[O_DP] + deck] = ptr + 1
        s[off[O_FU] + deck * fuc + slot] = cid
        eo = _emit(eb, eo, EV_CARD_DRAW, who, tick, deck, cid)
        eo = _emit(eb, eo, EV_CARD_PLACE, who, tick, deck, slot)
    else:
        s[off[O_FU] + deck * fuc + slot] = -1
    return eo


cdef int _award_noble(int[::1] s, int[::1] c, int[::1] off, int[::1] eb, int eo,
                      int who, int tick, int pb) nogil:
    cdef int ntt = c[C_NTT]
    cdef int k, nid, nb, t, npoints
    cdef bint ok
    for k in range(c[C_NTABLE]):
        if s[off[O_NO] + k] != -1:
            continue
        nid = s[off[O_NTID] + k]
        nb = _noble_base(c, off, nid)
        ok = True
        for t in range(ntt):
            if s[pb + off[O_R_BS] + t] < c[nb + 1 + t]:
                ok = False
                break
        if not ok:
            continue
        npoints = c[nb]
        s[off[O_NO] + k] = who
        s[pb + off[O_R_POINTS]] += npoints
        eo = _emit(eb, eo, EV_NOBLE_TAKE, who, tick, k, nid)
        eo = _emit(eb, eo, EV_NOBLE_RECEIVE, who, tick, nid, npoints)
        eo = _emit(eb, eo, EV_POINTS_FROM_NOBLE, ENGINE, tick, who, npoints)
        break
    return eo


def apply_action(int[::1] s, int[::1] c, int[::1] off, int[::1] ab, int[::1] eb, int eo):
    return _apply_action(s, c, off, ab, eb, eo)


cdef int _apply_action(int[::1] s, int[::1] c, int[::1] off, int[::1] ab,
                       int[::1] eb, int eo) nogil:
    if not _check_action(s, c, off, ab):
        return -1
    cdef int ntt = c[C_NTT]
    cdef int fuc = c[C_FUC]
    cdef int who = s[S_CUR]
    cdef int tick = s[S_TICK]
    cdef int pb = _player_base(off, who)
    cdef int kind = ab[A_KIND]
    cdef int pay = off[O_APAY]
    cdef int disc = off[O_ADISC]
    cdef int gain[32]
    cdef int gain_jokers
    cdef int t, k, i, r, deck, slot, cid, hidden, nr, nb_, cb, suit, points
    cdef int cost_total, picked, discarded, nxt, db, lo, ptr

    if kind == K_PICK_DIFF or kind == K_PICK_SAME:
        _gains_of_action(s, c, off, ab, pb, gain, &gain_jokers)
        picked = 0
        for t in range(ntt):
            for k in range(gain[t]):
                s[off[O_TT] + t] -= 1
                s[pb + off[O_R_TOK] + t] += 1
                eo = _emit(eb, eo, EV_TABLE_TOKEN_DEC, who, tick, t, 0)
                eo = _emit(eb, eo, EV_PLAYER_TOKEN_INC, who, tick, t, 0)
                picked += 1
        s[pb + off[O_R_COINS]] += picked

    elif kind == K_RESERVE_FACEUP or kind == K_RESERVE_DECK:
        deck = ab[A_ARG1]
        if kind == K_RESERVE_FACEUP:
            slot = ab[A_ARG2]
            cid = s[off[O_FU] + deck * fuc + slot]
            hidden = 0
            eo = _emit(eb, eo, EV_RESERVE_FACEUP, who, tick, deck, slot)
        else:
            db = off[O_DB]
            lo = c[db + deck]
            ptr = s[off[O_DP] + deck]
            cid = s[off[O_DO] + lo + ptr]
            s[off[O_DP] + deck] = ptr + 1
            hidden = 1
            eo = _emit(eb, eo, EV_RESERVE_HIDDEN, who, tick, deck, cid)
        nr = s[pb + off[O_R_NR]]
        s[pb + off[O_R_RID] + nr] = cid
        s[pb + off[O_R_RHID] + nr] = hidden
        s[pb + off[O_R_NR]] = nr + 1
        s[pb + off[O_R_RACT]] += 1
        if s[off[O_TJ]] > 0:
            s[off[O_TJ]] -= 1
            s[pb + off[O_R_JOKERS]] += 1
            s[pb + off[O_R_COINS]] += 1
            eo = _emit(eb, eo, EV_TABLE_JOKER_DEC, who, tick, 0, 0)
            eo = _emit(eb, eo, EV_PLAYER_JOKER_INC, who, tick, 0, 0)
        if kind == K_RESERVE_FACEUP:
            eo = _refill_slot(s, c, off, eb, eo, who, tick, deck, slot)

    elif kind == K_BUY_FACEUP or kind == K_BUY_RESERVED:
        if kind == K_BUY_FACEUP:
            deck = ab[A_ARG1]
            slot = ab[A_ARG2]
            cid = s[off[O_FU] + deck * fuc + slot]
        else:
            r = ab[A_ARG1]
            cid = s[pb + off[O_R_RID] + r]
            nr = s[pb + off[O_R_NR]]
            for i in range(r, nr - 1):
                s[pb + off[O_R_RID] + i] = s[pb + off[O_R_RID] + i + 1]
                s[pb + off[O_R_RHID] + i] = s[pb + off[O_R_RHID] + i + 1]
            s[pb + off[O_R_RID] + nr - 1] = -1
            s[pb + off[O_R_RHID] + nr - 1] = 0
            s[pb + off[O_R_NR]] = nr - 1
        for t in range(ntt):
            for k in range(ab[pay + t]):
                s[pb + off[O_R_TOK] + t] -= 1
                s[off[O_TT] + t] += 1
                eo = _emit(eb, eo, EV_PLAYER_TOKEN_DEC, who, tick, t, 0)
                eo = _emit(eb, eo, EV_TABLE_TOKEN_INC, who, tick, t, 0)
        for k in range(ab[pay + ntt]):
            s[pb + off[O_R_JOKERS]] -= 1
            s[off[O_TJ]] += 1
            eo = _emit(eb, eo, EV_PLAYER_JOKER_DEC, who, tick, 0, 0)
            eo = _emit(eb, eo, EV_TABLE_JOKER_INC, who, tick, 0, 0)
        cb = _card_base(c, off, cid)
        suit = c[cb]
        points = c[cb + 1]
        cost_total = 0
        for t in range(ntt):
            cost_total += c[cb + 2 + t]
        nb_ = s[pb + off[O_R_NB]]
        s[pb + off[O_R_BID] + nb_] = cid
        s[pb + off[O_R_NB]] = nb_ + 1
        s[pb + off[O_R_BS] + suit] += 1
        s[pb + off[O_R_CS]] += cost_total
        eo = _emit(eb, eo, EV_CARD_BUY, who, tick, cid, cost_total)
        if points > 0:
            s[pb + off[O_R_POINTS]] += points
            eo = _emit(eb, eo, EV_POINTS_FROM_CARD, who, tick, points, 0)
        if kind == K_BUY_FACEUP:
            eo = _refill_slot(s, c, off, eb, eo, who, tick, deck, slot)
        eo = _award_noble(s, c, off, eb, eo, who, tick, pb)

    discarded = 0
    for t in range(ntt):
        for k in range(ab[disc + t]):
            s[pb + off[O_R_TOK] + t] -= 1
            s[off[O_TT] + t] += 1
            eo = _emit(eb, eo, EV_PLAYER_TOKEN_DEC, who, tick, t, 0)
            eo = _emit(eb, eo, EV_TABLE_TOKEN_INC, who, tick, t, 0)
            discarded += 1
    for k in range(ab[disc + ntt]):
        s[pb + off[O_R_JOKERS]] -= 1
        s[off[O_TJ]] += 1
        eo = _emit(eb, eo, EV_PLAYER_JOKER_DEC, who, tick, 0, 0)
        eo = _emit(eb, eo, EV_TABLE_JOKER_INC, who, tick, 0, 0)
        discarded += 1
    if discarded > 0:
        s[pb + off[O_R_SWAPS]] += 1

    s[S_TICK] = tick + 1
    if s[pb + off[O_R_POINTS]] >= c[C_PP]:
        s[S_FINAL] = 1
    nxt = (who + 1) % c[C_P]
    s[S_CUR] = nxt
    if s[S_FINAL] and nxt == 0:
        s[S_OVER] = 1
    if tick + 1 >= c[C_MAXTICKS]:
        s[S_OVER] = 1
    return eo


def advance_random(int[::1] s, int[::1] c, int[::1] off, u64[::1] rst,
                   int[::1] ab, int[::1] eb, int eo):
    sample_action(s, c, off, rst, ab)
    return _apply_action(s, c, off, ab, eb, eo)


# ------------------------------------------------------------ encoding


def encode_state(int[::1] s, int[::1] c, int[::1] off, int player, double[::1] out):
    return _encode_state(s, c, off, player, out)


cdef int _encode_state(int[::1] s, int[::1] c, int[::1] off, int player,
                       double[::1] out) nogil:
    cdef int ntt = c[C_NTT]
    cdef int d = c[C_D]
    cdef int fuc = c[C_FUC]
    cdef int nplayers = c[C_P]
    cdef int maxrc = c[C_MAXRC]
    cdef int card_block = 2 * ntt + 1
    cdef int db = off[O_DB]
    cdef int i = 0
    cdef int k, lo, hi, slot, cid, t, nb, q, pb, nr, r, j
    cdef bint visible

    for k in range(d):
        lo = c[db + k]
        hi = c[db + k + 1]
        out[i] = (hi - lo) - s[off[O_DP] + k]
        i += 1
        for slot in range(fuc):
            cid = s[off[O_FU] + k * fuc + slot]
            if cid < 0:
                for j in range(card_block):
                    out[i] = 0.0
                    i += 1
            else:
                i = _write_card_block(c, off, cid, out, i, ntt)

    for k in range(c[C_NTABLE]):
        if s[off[O_NO] + k] == -1:
            nb = _noble_base(c, off, s[off[O_NTID] + k])
            out[i] = c[nb]
            i += 1
            for t in range(ntt):
                out[i] = c[nb + 1 + t]
                i += 1
        else:
            for j in range(ntt + 1):
                out[i] = 0.0
                i += 1

    for t in range(ntt):
        out[i] = s[off[O_TT] + t]
        i += 1
    out[i] = s[off[O_TJ]]
    i += 1

    for k in range(nplayers):
        q = (player + k) % nplayers
        pb = _player_base(off, q)
        out[i] = s[pb + off[O_R_POINTS]]
        i += 1
        for t in range(ntt):
            out[i] = s[pb + off[O_R_TOK] + t]
            i += 1
        out[i] = s[pb + off[O_R_JOKERS]]
        i += 1
        for t in range(ntt):
            out[i] = s[pb + off[O_R_BS] + t]
            i += 1
        nr = s[pb + off[O_R_NR]]
        for r in range(maxrc):
            visible = r < nr and (q == player or s[pb + off[O_R_RHID] + r] == 0)
            if visible:
                i = _write_card_block(c, off, s[pb + off[O_R_RID] + r], out, i, ntt)
            else:
                for j in range(card_block):
                    out[i] = 0.0
                    i += 1
    return i


cdef inline int _write_card_block(int[::1] c, int[::1] off, int cid,
                                  double[::1] out, int i, int ntt) nogil:
    cdef int cb = _card_base(c, off, cid)
    cdef int suit = c[cb]
    cdef int t
    for t in range(ntt):
        out[i] = 1.0 if t == suit else 0.0
        i += 1
    for t in range(ntt):
        out[i] = c[cb + 2 + t]
        i += 1
    out[i] = c[cb + 1]
    return i + 1


def sf_delta(int[::1] s0, int[::1] s1, int[::1] c, int[::1] off, int player,
             double[::1] w, double[::1] e0, double[::1] e1):
    cdef int n = _encode_state(s0, c, off, player, e0)
    _encode_state(s1, c, off, player, e1)
    cdef double total = 0.0
    cdef int i
    for i in range(n):
        total += w[i] * (e1[i] - e0[i])
    return total


def ef_accumulate(int[::1] eb, int lo, int hi, int player, int[::1] mapping,
                  double[::1] w):
    cdef double total = 0.0
    cdef int i, base, etype, who, f
    for i in range(lo, hi):
        base = i * EVENT_W
        etype = eb[base]
        who = eb[base + 1]
        if who == player or (etype == EV_POINTS_FROM_NOBLE and who == ENGINE
                             and eb[base + 3] == player):
            f = mapping[etype]
            if f >= 0:
                total += w[f]
    return total


# ----------------------------------------------------------- checking


def check_invariants(int[::1] s, int[::1] c, int[::1] off):
    cdef int ntt = c[C_NTT]
    cdef int nplayers = c[C_P]
    cdef int bad = 0
    cdef int t, q, total, total_j, pb, points, i, k

    for t in range(ntt):
        total = s[off[O_TT] + t]
        for q in range(nplayers):
            total += s[_player_base(off, q) + off[O_R_TOK] + t]
        if total != c[C_TPS]:
            bad |= INV_TOKEN_CONSERVATION
            break
    total_j = s[off[O_TJ]]
    for q in range(nplayers):
        total_j += s[_player_base(off, q) + off[O_R_JOKERS]]
    if total_j != c[C_NJT]:
        bad |= INV_JOKER_CONSERVATION

    for q in range(nplayers):
        pb = _player_base(off, q)
        if s[pb + off[O_R_NR]] > c[C_MAXRC]:
            bad |= INV_RESERVED_LIMIT
        if _token_total(s, c, off, pb) > c[C_MAXT]:
            bad |= INV_TOKEN_LIMIT
        points = 0
        for i in range(s[pb + off[O_R_NB]]):
            points += c[_card_base(c, off, s[pb + off[O_R_BID] + i]) + 1]
        for k in range(c[C_NTABLE]):
            if s[off[O_NO] + k] == q:
                points += c[_noble_base(c, off, s[off[O_NTID] + k])]
        if points != s[pb + off[O_R_POINTS]]:
            bad |= INV_POINTS_MISMATCH
    return bad
