"""Naive reference interpreter used as the test oracle.

Everything here is deliberately written the slow, literal way and shares
no code with the production package: transition counts live in plain
dicts built by nested loops, the context is a real list that drops its
head whenever it reaches the window size, probabilities are exact
Fractions rounded half-up onto the target grid, and bodies are
assembled by plain string joining. Tests compare production output
against this interpreter byte for byte.
"""

from fractions import Fraction


def count_transitions(tokens, order):
    """Raw occurrence counts for every context length 0..order."""
    counts = {(): {}}
    for tok in tokens:
        counts[()][tok] = counts[()].get(tok, 0) + 1
    for length in range(1, order + 1):
        for i in range(length, len(tokens)):
            ctx = tuple(tokens[i - length : i])
            nxt = tokens[i]
            counts.setdefault(ctx, {})
            counts[ctx][nxt] = counts[ctx].get(nxt, 0) + 1
    return counts


def round_half_up(value: Fraction) -> int:
    return int(value + Fraction(1, 2))


def quantize(count, total, bits):
    """Half-up onto the 16-bit grid, then half-up onto the target grid."""
    n16 = round_half_up(Fraction(count * 65536, total))
    if bits == 16:
        return n16
    return round_half_up(Fraction(n16, 2 ** (16 - bits)))


class NaivePredictor:
    """Longest-suffix backoff over raw counts, quantized before argmax."""

    def __init__(self, counts, order, vocab_size, quant_bits):
        self.counts = counts
        self.order = order
        self.vocab_size = vocab_size
        self.quant_bits = quant_bits
        self._predict_memo = {}
        self._ranking_memo = {}

    def _distribution(self, context):
        for length in range(min(len(context), self.order), -1, -1):
            ctx = tuple(context[len(context) - length :])
            if ctx in self.counts:
                dist = self.counts[ctx]
                total = sum(dist.values())
                return {
                    t: quantize(c, total, self.quant_bits) for t, c in dist.items()
                }
        return {}

    def _key(self, context):
        # predict/ranking read at most the last `order` items, so memoize
        # on exactly that suffix.
        return tuple(context[max(0, len(context) - self.order) :])

    def predict(self, context):
        key = self._key(context)
        if key not in self._predict_memo:
            dist = self._distribution(list(key))
            best_token = 0
            best_q = 0
            for t in sorted(dist):
                if dist[t] > best_q:
                    best_q = dist[t]
                    best_token = t
            self._predict_memo[key] = best_token
        return self._predict_memo[key]

    def ranking(self, context):
        key = self._key(context)
        if key not in self._ranking_memo:
            dist = self._distribution(list(key))
            order = sorted(
                range(self.vocab_size), key=lambda t: (-dist.get(t, 0), t)
            )
            self._ranking_memo[key] = order
        return self._ranking_memo[key]


def counter_records(tokens, predictor, window, prefix_len):
    """Step-by-step counter-mode compression over a real sliding list."""
    records = []
    counter = 0
    window_list = []
    for i, tok in enumerate(tokens):
        if i < prefix_len:
            records.append(("lit", tok))
        else:
            if predictor.predict(window_list) == tok:
                counter += 1
            else:
                records.append(("ctr", counter))
                counter = 0
                records.append(("lit", tok))
        window_list.append(tok)
        if len(window_list) == window:
            window_list.pop(0)
    records.append(("ctr", counter))
    return records


def rank_records(tokens, predictor, window, prefix_len):
    """Step-by-step rank-mode compression over a real sliding list."""
    records = []
    window_list = []
    for i, tok in enumerate(tokens):
        if i < prefix_len:
            records.append(("lit", tok))
        else:
            records.append(("rank", predictor.ranking(window_list).index(tok)))
        window_list.append(tok)
        if len(window_list) == window:
            window_list.pop(0)
    return records


def body_bytes(records):
    pieces = []
    for kind, value in records:
        if kind == "lit":
            pieces.append("@" + str(value))
        else:
            pieces.append(str(value))
    return " ".join(pieces).encode("ascii")


def replay_counter(records, predictor, window):
    """Decompression replay for counter-mode records."""
    out = []
    window_list = []

    def push(tok):
        out.append(tok)
        window_list.append(tok)
        if len(window_list) == window:
            window_list.pop(0)

    for kind, value in records:
        if kind == "lit":
            push(value)
        else:
            for _ in range(value):
                push(predictor.predict(window_list))
    return out


def replay_rank(records, predictor, window):
    """Decompression replay for rank-mode records."""
    out = []
    window_list = []
    for kind, value in records:
        if kind == "lit":
            tok = value
        else:
            tok = predictor.ranking(window_list)[value]
        out.append(tok)
        window_list.append(tok)
        if len(window_list) == window:
            window_list.pop(0)
    return out
