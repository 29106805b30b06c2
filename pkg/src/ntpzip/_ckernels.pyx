# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled codec kernels.

Same functions and semantics as _pykernels; only the loop machinery is
typed. Any divergence between the two engines is a bug, and the test
suite compares them record for record.
"""

import numpy as np

from .errors import RankOutOfRange


def argmax_in_range(const unsigned int[::1] toks, const unsigned int[::1] n16,
                    long long start, long long end, int shift):
    """Token with the highest coarsened numerator; ties and the all-zero
    case resolve to the smallest token id (0 when nothing is positive)."""
    cdef long long j
    cdef unsigned long long val, best_val = 0, half = 0
    cdef unsigned long long best_tok = 0
    if shift:
        half = 1ULL << (shift - 1)
    for j in range(start, end):
        val = n16[j]
        if shift:
            val = (val + half) >> shift
        if val > best_val:
            best_val = val
            best_tok = toks[j]
    return best_tok


def full_ranking(const unsigned int[::1] toks, const unsigned int[::1] n16,
                 long long start, long long end, int shift, long long vocab_size):
    """Permutation of 0..vocab_size-1 by coarsened value desc, id asc."""
    cdef long long j, t, r
    cdef unsigned long long val, half = 0
    if shift:
        half = 1ULL << (shift - 1)
    positive = []
    for j in range(start, end):
        val = n16[j]
        if shift:
            val = (val + half) >> shift
        if val:
            positive.append((-(<long long> val), <long long> toks[j]))
    positive.sort()
    out = np.empty(vocab_size, dtype=np.uint32)
    cdef unsigned int[::1] view = out
    r = 0
    for _, t in positive:
        view[r] = <unsigned int> t
        r += 1
    in_positive = {pt for _, pt in positive}
    for t in range(vocab_size):
        if t not in in_positive:
            view[r] = <unsigned int> t
            r += 1
    return out


cdef inline object _lookup(dict ranges, list seq, long long i, long long max_len):
    # Packed range of the longest seen suffix of seq[:i] (length <= max_len).
    cdef long long length = max_len
    while length > 0:
        packed = ranges.get(tuple(seq[i - length:i]))
        if packed is not None:
            return packed
        length -= 1
    return ranges.get((), 0)


def counter_encode(tokens, dict ranges, const unsigned int[::1] toks,
                   const unsigned int[::1] n16, long long order,
                   long long window, int shift, long long prefix_len):
    """Post-prefix body records, sign-encoded: counter n >= 0, literal ~id."""
    cdef list seq = [int(t) for t in tokens]
    cdef long long n = len(seq)
    cdef long long cap = window - 1
    cdef long long i, visible, max_len, counter = 0, t
    cdef long long j, start, end
    cdef unsigned long long packed_c, val, best_val, half = 0
    cdef long long best_tok, pred_c
    if shift:
        half = 1ULL << (shift - 1)
    body = []
    predictions = {}
    i = prefix_len if prefix_len < n else n
    while i < n:
        visible = i if i < cap else cap
        max_len = visible if visible < order else order
        key = tuple(seq[i - max_len:i])
        pred = predictions.get(key)
        if pred is None:
            packed_c = <unsigned long long> _lookup(ranges, seq, i, max_len)
            start = <long long> (packed_c >> 32)
            end = <long long> (packed_c & 0xFFFFFFFF)
            best_tok = 0
            best_val = 0
            for j in range(start, end):
                val = n16[j]
                if shift:
                    val = (val + half) >> shift
                if val > best_val:
                    best_val = val
                    best_tok = toks[j]
            pred = best_tok
            predictions[key] = pred
        t = <long long> seq[i]
        pred_c = <long long> pred
        if pred_c == t:
            counter += 1
        else:
            body.append(counter)
            counter = 0
            body.append(~t)
        i += 1
    body.append(counter)
    return body


def counter_decode(prefix, records, dict ranges, const unsigned int[::1] toks,
                   const unsigned int[::1] n16, long long order,
                   long long window, int shift):
    """Replay counters and literals back into the full token stream."""
    cdef list seq = [int(t) for t in prefix]
    cdef long long cap = window - 1
    cdef long long i, visible, max_len, rec_c, k
    cdef long long j, start, end
    cdef unsigned long long packed_c, val, best_val, half = 0
    cdef long long best_tok
    if shift:
        half = 1ULL << (shift - 1)
    predictions = {}
    for rec in records:
        rec_c = <long long> rec
        if rec_c < 0:
            seq.append(~rec_c)
            continue
        for k in range(rec_c):
            i = len(seq)
            visible = i if i < cap else cap
            max_len = visible if visible < order else order
            key = tuple(seq[i - max_len:i])
            pred = predictions.get(key)
            if pred is None:
                packed_c = <unsigned long long> _lookup(ranges, seq, i, max_len)
                start = <long long> (packed_c >> 32)
                end = <long long> (packed_c & 0xFFFFFFFF)
                best_tok = 0
                best_val = 0
                for j in range(start, end):
                    val = n16[j]
                    if shift:
                        val = (val + half) >> shift
                    if val > best_val:
                        best_val = val
                        best_tok = toks[j]
                pred = best_tok
                predictions[key] = pred
            seq.append(pred)
    return np.array(seq, dtype=np.uint32)


cdef tuple _range_entries(dict cache, object packed, const unsigned int[::1] toks,
                          const unsigned int[::1] n16, int shift):
    # Positive (value, token) entries of a packed range plus the rank-order
    # token list; memoized per packed range.
    entry = cache.get(packed)
    if entry is not None:
        return <tuple> entry
    cdef unsigned long long packed_c = <unsigned long long> packed
    cdef long long start = <long long> (packed_c >> 32)
    cdef long long end = <long long> (packed_c & 0xFFFFFFFF)
    cdef unsigned long long val, half = 0
    cdef long long j
    if shift:
        half = 1ULL << (shift - 1)
    ptoks = []
    pvals = []
    for j in range(start, end):
        val = n16[j]
        if shift:
            val = (val + half) >> shift
        if val:
            ptoks.append(<long long> toks[j])
            pvals.append(<long long> val)
    by_rank = [pt for _, pt in sorted(zip([-pv for pv in pvals], ptoks))]
    out = (ptoks, pvals, by_rank)
    cache[packed] = out
    return out


def rank_encode(tokens, dict ranges, const unsigned int[::1] toks,
                const unsigned int[::1] n16, long long order,
                long long window, int shift, long long prefix_len):
    """Rank of each post-prefix token in its context's full ranking."""
    cdef list seq = [int(t) for t in tokens]
    cdef long long n = len(seq)
    cdef long long cap = window - 1
    cdef long long i, visible, max_len, t, mine, ahead, below, k, pt, pv
    body = []
    range_cache = {}
    entry_cache = {}
    i = prefix_len if prefix_len < n else n
    while i < n:
        visible = i if i < cap else cap
        max_len = visible if visible < order else order
        key = tuple(seq[i - max_len:i])
        packed = range_cache.get(key)
        if packed is None:
            packed = _lookup(ranges, seq, i, max_len)
            range_cache[key] = packed
        ptoks, pvals, _ = _range_entries(entry_cache, packed, toks, n16, shift)
        t = <long long> seq[i]
        mine = 0
        for k in range(len(ptoks)):
            if <long long> ptoks[k] == t:
                mine = <long long> pvals[k]
                break
        ahead = 0
        below = 0
        for k in range(len(ptoks)):
            pt = <long long> ptoks[k]
            pv = <long long> pvals[k]
            if pv > mine or (pv == mine and pt < t):
                ahead += 1
            if pt < t:
                below += 1
        if mine:
            body.append(ahead)
        else:
            body.append(len(ptoks) + t - below)
        i += 1
    return body


def rank_decode(prefix, ranks, dict ranges, const unsigned int[::1] toks,
                const unsigned int[::1] n16, long long order,
                long long window, int shift, long long vocab_size):
    """Invert rank_encode by indexing each context's ranking."""
    cdef list seq = [int(t) for t in prefix]
    cdef long long cap = window - 1
    cdef long long i, visible, max_len, r_c, want, seen, prev, chosen, gap, pt
    range_cache = {}
    entry_cache = {}
    for r in ranks:
        r_c = <long long> r
        if r_c >= vocab_size:
            raise RankOutOfRange(
                f"rank {r_c} outside vocabulary of size {vocab_size}"
            )
        i = len(seq)
        visible = i if i < cap else cap
        max_len = visible if visible < order else order
        key = tuple(seq[i - max_len:i])
        packed = range_cache.get(key)
        if packed is None:
            packed = _lookup(ranges, seq, i, max_len)
            range_cache[key] = packed
        ptoks, _, by_rank = _range_entries(entry_cache, packed, toks, n16, shift)
        if r_c < len(by_rank):
            seq.append(by_rank[r_c])
        else:
            # The zero class is every id not listed, in ascending order;
            # walk the gaps between the listed ids to find the r-th one.
            want = r_c - len(by_rank)
            seen = 0
            prev = -1
            chosen = -1
            for obj in ptoks:
                pt = <long long> obj
                gap = pt - prev - 1
                if want < seen + gap:
                    chosen = prev + 1 + (want - seen)
                    break
                seen += gap
                prev = pt
            if chosen < 0:
                chosen = prev + 1 + (want - seen)
            seq.append(chosen)
    return np.array(seq, dtype=np.uint32)
