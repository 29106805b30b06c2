"""Pure-Python codec kernels.

Reference engine for the per-token loops. The compiled engine in
_ckernels.pyx implements the same functions with the same semantics;
tests assert the two agree record for record.

All kernels take a frozen distribution table unpacked into its parts:
ranges (context tuple -> (start << 32) | end), toks / n16 (uint32 arrays
of token ids and 16-bit probability numerators, tokens ascending within
each range), plus model order, window, and the coarsening shift
(16 - quant_bits). The visible context before appending token i is the
last min(i, window - 1) tokens, because the sliding context list evicts
its oldest entry as soon as it reaches the window size.
"""

from __future__ import annotations

import numpy as np

from .errors import RankOutOfRange


def argmax_in_range(toks, n16, start: int, end: int, shift: int) -> int:
    """Token with the highest coarsened numerator; ties and the all-zero
    case resolve to the smallest token id (0 when nothing is positive)."""
    best_tok = 0
    best_val = 0
    half = (1 << (shift - 1)) if shift else 0
    for j in range(start, end):
        val = (int(n16[j]) + half) >> shift if shift else int(n16[j])
        if val > best_val:
            best_val = val
            best_tok = int(toks[j])
    return best_tok


def full_ranking(toks, n16, start, end, shift, vocab_size: int) -> np.ndarray:
    """Permutation of 0..vocab_size-1 by coarsened value desc, id asc."""
    half = (1 << (shift - 1)) if shift else 0
    positive = []
    for j in range(start, end):
        val = (int(n16[j]) + half) >> shift if shift else int(n16[j])
        if val:
            positive.append((-val, int(toks[j])))
    positive.sort()
    out = np.empty(vocab_size, dtype=np.uint32)
    for r, (_, t) in enumerate(positive):
        out[r] = t
    in_positive = {t for _, t in positive}
    r = len(positive)
    for t in range(vocab_size):
        if t not in in_positive:
            out[r] = t
            r += 1
    return out


def _lookup(ranges: dict, seq: list, i: int, max_len: int) -> int:
    """Packed range of the longest seen suffix of seq[:i] (length ≤ max_len)."""
    length = max_len
    while length > 0:
        packed = ranges.get(tuple(seq[i - length : i]))
        if packed is not None:
            return packed
        length -= 1
    return ranges.get((), 0)


def counter_encode(tokens, ranges, toks, n16, order, window, shift, prefix_len):
    """Post-prefix body records, sign-encoded: counter n >= 0, literal ~id."""
    seq = [int(t) for t in tokens]
    n = len(seq)
    cap = window - 1
    body: list[int] = []
    counter = 0
    half = (1 << (shift - 1)) if shift else 0
    predictions: dict = {}
    for i in range(min(prefix_len, n), n):
        visible = i if i < cap else cap
        max_len = visible if visible < order else order
        key = tuple(seq[i - max_len : i])
        pred = predictions.get(key)
        if pred is None:
            packed = _lookup(ranges, seq, i, max_len)
            start, end = packed >> 32, packed & 0xFFFFFFFF
            best_tok = 0
            best_val = 0
            for j in range(start, end):
                val = (int(n16[j]) + half) >> shift if shift else int(n16[j])
                if val > best_val:
                    best_val = val
                    best_tok = int(toks[j])
            predictions[key] = pred = best_tok
        if pred == seq[i]:
            counter += 1
        else:
            body.append(counter)
            counter = 0
            body.append(~seq[i])
    body.append(counter)
    return body


def counter_decode(prefix, records, ranges, toks, n16, order, window, shift):
    """Replay counters and literals back into the full token stream."""
    seq = [int(t) for t in prefix]
    cap = window - 1
    half = (1 << (shift - 1)) if shift else 0
    predictions: dict = {}
    for rec in records:
        if rec < 0:
            seq.append(~rec)
            continue
        for _ in range(rec):
            i = len(seq)
            visible = i if i < cap else cap
            max_len = visible if visible < order else order
            key = tuple(seq[i - max_len : i])
            pred = predictions.get(key)
            if pred is None:
                packed = _lookup(ranges, seq, i, max_len)
                start, end = packed >> 32, packed & 0xFFFFFFFF
                best_tok = 0
                best_val = 0
                for j in range(start, end):
                    val = (int(n16[j]) + half) >> shift if shift else int(n16[j])
                    if val > best_val:
                        best_val = val
                        best_tok = int(toks[j])
                predictions[key] = pred = best_tok
            seq.append(pred)
    return np.array(seq, dtype=np.uint32)


def _range_entries(cache, packed, toks, n16, shift):
    """Positive (value, token) entries of a packed range, plus the token
    list sorted by rank order; memoized per packed range."""
    entry = cache.get(packed)
    if entry is None:
        start, end = packed >> 32, packed & 0xFFFFFFFF
        half = (1 << (shift - 1)) if shift else 0
        ptoks: list[int] = []
        pvals: list[int] = []
        for j in range(start, end):
            val = (int(n16[j]) + half) >> shift if shift else int(n16[j])
            if val:
                ptoks.append(int(toks[j]))
                pvals.append(val)
        by_rank = [t for _, t in sorted(zip([-v for v in pvals], ptoks))]
        cache[packed] = entry = (ptoks, pvals, by_rank)
    return entry


def rank_encode(tokens, ranges, toks, n16, order, window, shift, prefix_len):
    """Rank of each post-prefix token in its context's full ranking."""
    seq = [int(t) for t in tokens]
    n = len(seq)
    cap = window - 1
    body: list[int] = []
    range_cache: dict = {}
    entry_cache: dict = {}
    for i in range(min(prefix_len, n), n):
        visible = i if i < cap else cap
        max_len = visible if visible < order else order
        key = tuple(seq[i - max_len : i])
        packed = range_cache.get(key)
        if packed is None:
            range_cache[key] = packed = _lookup(ranges, seq, i, max_len)
        ptoks, pvals, _ = _range_entries(entry_cache, packed, toks, n16, shift)
        t = seq[i]
        mine = 0
        for k, pt in enumerate(ptoks):
            if pt == t:
                mine = pvals[k]
                break
        ahead = 0
        below = 0
        for k, pt in enumerate(ptoks):
            if pvals[k] > mine or (pvals[k] == mine and pt < t):
                ahead += 1
            if pt < t:
                below += 1
        if mine:
            body.append(ahead)
        else:
            body.append(len(ptoks) + t - below)
    return body


def rank_decode(prefix, ranks, ranges, toks, n16, order, window, shift, vocab_size):
    """Invert rank_encode by indexing each context's ranking."""
    seq = [int(t) for t in prefix]
    cap = window - 1
    range_cache: dict = {}
    entry_cache: dict = {}
    for r in ranks:
        if r >= vocab_size:
            raise RankOutOfRange(f"rank {r} outside vocabulary of size {vocab_size}")
        i = len(seq)
        visible = i if i < cap else cap
        max_len = visible if visible < order else order
        key = tuple(seq[i - max_len : i])
        packed = range_cache.get(key)
        if packed is None:
            range_cache[key] = packed = _lookup(ranges, seq, i, max_len)
        ptoks, _, by_rank = _range_entries(entry_cache, packed, toks, n16, shift)
        if r < len(by_rank):
            seq.append(by_rank[r])
        else:
            # The zero class is every id not listed, in ascending order;
            # walk the gaps between the listed ids to find the r-th one.
            want = r - len(by_rank)
            seen = 0
            prev = -1
            chosen = -1
            for pt in ptoks:
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
