"""Deterministic next-token prediction from order-k transition counts.

A trained model stores occurrence counts for every context of length 0
through order (length 0 is the whole-corpus token frequency). Prediction
backs off to the longest context suffix that was seen in training, then
quantizes the conditional distribution to a fixed-point grid before
taking the argmax, so a lower-precision setting can change predictions
the way reduced-precision inference would.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BadMagic, EmptyCorpus, MalformedFile, OutOfRangeId

MODEL_MAGIC = b"NTPM1"
QUANT_LEVELS = (16, 8, 4)
WINDOW_SWEEP = (16, 32, 64, 128, 256, 512, 1024, 2048)
MAX_ORDER = 255  # the model file stores the order as one byte


@dataclass(frozen=True)
class PredictorConfig:
    """Context window size and fixed-point probability precision."""

    window: int
    quant_bits: int

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.quant_bits not in QUANT_LEVELS:
            raise ValueError(f"quant_bits must be one of {QUANT_LEVELS}")

    @property
    def shift(self) -> int:
        return 16 - self.quant_bits


def quantize16(count: int, total: int) -> int:
    """Numerator of count/total on the 1/65536 grid, rounding half up."""
    return (2 * count * 65536 + total) // (2 * total)


def coarsen16(n16: int, quant_bits: int) -> int:
    """Re-round a 16-bit numerator onto the quant_bits grid, half up."""
    shift = 16 - quant_bits
    if shift == 0:
        return n16
    return (n16 + (1 << (shift - 1))) >> shift


def quantize(count: int, total: int, quant_bits: int) -> int:
    """Probability numerator on the quant_bits grid.

    Defined as the coarsening of the 16-bit rounding, so quantizing to 16
    bits and then to b bits gives the same numerator as quantizing to b
    bits directly.
    """
    return coarsen16(quantize16(count, total), quant_bits)


class FrozenTable:
    """Flat-array view of a model's distributions for the codec kernels.

    ranges maps every context seen in training to (start << 32) | end
    into the token/numerator arrays. Entries whose 16-bit numerator
    rounds to zero are dropped from the arrays, but their context keeps
    its (possibly empty) range: backoff stops at any seen context.
    """

    __slots__ = ("order", "vocab_size", "ranges", "toks", "n16")

    def __init__(self, order, vocab_size, ranges, toks, n16):
        self.order = order
        self.vocab_size = vocab_size
        self.ranges = ranges
        self.toks = toks
        self.n16 = n16


class MarkovModel:
    """Transition counts for every context of length 0..order.

    Models are immutable once trained; predict and rank only read.
    """

    def __init__(self, order: int, vocab_size: int, counts: dict):
        if not 1 <= order <= MAX_ORDER:
            raise ValueError(f"order must be in 1..{MAX_ORDER}")
        if vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        self.order = order
        self.vocab_size = vocab_size
        self.counts = counts
        self._frozen: FrozenTable | None = None
        self._digest: bytes | None = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MarkovModel)
            and self.order == other.order
            and self.vocab_size == other.vocab_size
            and self.counts == other.counts
        )

    def frozen(self) -> FrozenTable:
        if self._frozen is None:
            ranges = {}
            tok_list: list[int] = []
            val_list: list[int] = []
            for ctx in sorted(self.counts):
                nexts = self.counts[ctx]
                total = sum(nexts.values())
                start = len(tok_list)
                for t in sorted(nexts):
                    v = quantize16(nexts[t], total)
                    if v:
                        tok_list.append(t)
                        val_list.append(v)
                ranges[ctx] = (start << 32) | len(tok_list)
            self._frozen = FrozenTable(
                self.order,
                self.vocab_size,
                ranges,
                np.array(tok_list, dtype=np.uint32),
                np.array(val_list, dtype=np.uint32),
            )
        return self._frozen

    def to_bytes(self) -> bytes:
        """Serialize as NTPM1 with (context, next, count) triples.

        Triples are sorted by (context, next) so equal models always
        serialize to identical bytes.
        """
        parts = [MODEL_MAGIC, struct.pack("<BI", self.order, self.vocab_size)]
        for ctx in sorted(self.counts):
            nexts = self.counts[ctx]
            head = struct.pack("<%dI" % (len(ctx) + 1), len(ctx), *ctx)
            for t in sorted(nexts):
                parts.append(head)
                parts.append(struct.pack("<II", t, nexts[t]))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "MarkovModel":
        if data[:5] != MODEL_MAGIC:
            raise BadMagic("not a model file")
        try:
            order, vocab_size = struct.unpack_from("<BI", data, 5)
        except struct.error as exc:
            raise MalformedFile("truncated model header") from exc
        if order < 1:
            raise MalformedFile("model order must be at least 1")
        offset = 10
        counts: dict = {}
        prev = None
        while offset < len(data):
            if offset + 4 > len(data):
                raise MalformedFile("truncated model triple")
            (ctx_len,) = struct.unpack_from("<I", data, offset)
            if ctx_len > order:
                raise MalformedFile("context longer than model order")
            end = offset + 4 * (ctx_len + 3)
            if end > len(data):
                raise MalformedFile("truncated model triple")
            fields = struct.unpack_from("<%dI" % (ctx_len + 2), data, offset + 4)
            ctx, nxt, count = fields[:ctx_len], fields[ctx_len], fields[ctx_len + 1]
            if any(t >= vocab_size for t in ctx) or nxt >= vocab_size:
                raise MalformedFile("token id outside declared vocabulary")
            if count < 1:
                raise MalformedFile("zero-count triple")
            if prev is not None and (ctx, nxt) <= prev:
                raise MalformedFile("model triples out of order")
            prev = (ctx, nxt)
            counts.setdefault(ctx, {})[nxt] = count
            offset = end
        return cls(order, vocab_size, counts)

    def identity_digest(self) -> bytes:
        """32-byte content hash of the serialized model."""
        if self._digest is None:
            self._digest = hashlib.sha256(self.to_bytes()).digest()
        return self._digest


def train_markov(corpus_tokens, order: int, vocab_size: int) -> MarkovModel:
    """Count next-token occurrences for every context length 0..order."""
    seq = [int(t) for t in corpus_tokens]
    n = len(seq)
    if n < 2:
        raise EmptyCorpus("need at least two tokens to count transitions")
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}")
    unigram: dict = {}
    for t in seq:
        if not 0 <= t < vocab_size:
            raise OutOfRangeId(f"token id {t} outside vocabulary of size {vocab_size}")
        unigram[t] = unigram.get(t, 0) + 1
    counts = {(): unigram}
    for length in range(1, order + 1):
        for i in range(length, n):
            key = tuple(seq[i - length : i])
            dist = counts.get(key)
            if dist is None:
                counts[key] = dist = {}
            t = seq[i]
            dist[t] = dist.get(t, 0) + 1
    return MarkovModel(order, vocab_size, counts)


def _context_range(frozen: FrozenTable, context, window: int) -> tuple[int, int]:
    """Range of the longest seen suffix, after window truncation."""
    ids = [int(t) for t in context]
    if len(ids) > window:
        ids = ids[len(ids) - window :]
    key = tuple(ids[len(ids) - frozen.order :]) if ids else ()
    while True:
        packed = frozen.ranges.get(key)
        if packed is not None:
            return packed >> 32, packed & 0xFFFFFFFF
        if not key:
            return 0, 0
        key = key[1:]


def predict(model: MarkovModel, context, config: PredictorConfig) -> int:
    """Most probable next token; ties go to the smallest token id."""
    frozen = model.frozen()
    start, end = _context_range(frozen, context, config.window)
    return kernels.argmax_in_range(frozen.toks, frozen.n16, start, end, config.shift)


def rank(model: MarkovModel, context, config: PredictorConfig) -> np.ndarray:
    """Whole vocabulary ordered by quantized probability, then token id."""
    frozen = model.frozen()
    start, end = _context_range(frozen, context, config.window)
    return kernels.full_ranking(
        frozen.toks, frozen.n16, start, end, config.shift, frozen.vocab_size
    )


def predictor_fingerprint(predictor, config: PredictorConfig) -> bytes:
    """32-byte digest binding a predictor's identity to a config."""
    ident = predictor.identity_digest()
    return hashlib.sha256(
        ident + struct.pack("<IB", config.window, config.quant_bits)
    ).digest()
