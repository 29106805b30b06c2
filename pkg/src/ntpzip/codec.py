"""Lossless token-stream codec driven by a deterministic predictor.

Counter mode stores the first literal_prefix_len tokens verbatim, then a
run length for every stretch of correct predictions and an "@"-marked
literal token id for every miss. Rank mode stores, for each token after
the prefix, the position of the true token in the predictor's
probability ranking. Either way the body is space-separated ASCII that
is then DEFLATE-compressed behind a fixed header, and decompression
replays the same predictor to reconstruct the exact input bytes.
"""

from __future__ import annotations

import os
import re
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    BadMagic,
    BadVersion,
    FingerprintMismatch,
    MalformedBody,
    RankOutOfRange,
)
from .predictor import MarkovModel, PredictorConfig, predictor_fingerprint

CONTAINER_MAGIC = b"NTPZ1"
CONTAINER_VERSION = 1
MODE_COUNTER = 0
MODE_RANK = 1
DEFAULT_PREFIX_LEN = 10

_HEADER = struct.Struct("<5sBBIBH32s32sQ")
HEADER_SIZE = _HEADER.size

_COUNTER_RE = re.compile(rb"\A(?:0|[1-9][0-9]*)\Z")
_LITERAL_RE = re.compile(rb"\A@(?:0|[1-9][0-9]*)\Z")


@dataclass(frozen=True)
class Counter:
    """Run of consecutive correct predictions (or a rank, in rank mode)."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("counter value must be non-negative")


@dataclass(frozen=True)
class Literal:
    """Token stored verbatim."""

    token: int

    def __post_init__(self):
        if self.token < 0:
            raise ValueError("token id must be non-negative")


def serialize_body(records) -> bytes:
    """Space-separated ASCII: counters as decimals, literals as @decimals."""
    parts = []
    for rec in records:
        if isinstance(rec, Literal):
            parts.append(b"@%d" % rec.token)
        elif isinstance(rec, Counter):
            parts.append(b"%d" % rec.value)
        else:
            raise TypeError(f"not a body record: {rec!r}")
    return b" ".join(parts)


def parse_body(data: bytes):
    """Exact inverse of serialize_body; rejects any non-canonical byte."""
    if data == b"":
        return []
    records = []
    for piece in data.split(b" "):
        if _COUNTER_RE.match(piece):
            records.append(Counter(int(piece)))
        elif _LITERAL_RE.match(piece):
            records.append(Literal(int(piece[1:])))
        else:
            raise MalformedBody(f"bad body record {piece[:32]!r}")
    return records


def deflate_level() -> int:
    """DEFLATE level for the post-pass: NTPZIP_DEFLATE_LEVEL, default 6."""
    raw = os.environ.get("NTPZIP_DEFLATE_LEVEL")
    if raw is None:
        return 6
    try:
        level = int(raw)
    except ValueError:
        raise ValueError(f"NTPZIP_DEFLATE_LEVEL must be an integer, not {raw!r}")
    if not 0 <= level <= 9:
        raise ValueError("NTPZIP_DEFLATE_LEVEL must be in 0..9")
    return level


def deflate_bytes(data: bytes, level: int | None = None) -> bytes:
    """Raw DEFLATE stream (no zlib/gzip wrapper, empty dictionary)."""
    if level is None:
        level = deflate_level()
    co = zlib.compressobj(level=level, method=zlib.DEFLATED, wbits=-15)
    return co.compress(data) + co.flush()


def _inflate(data: bytes) -> bytes:
    do = zlib.decompressobj(wbits=-15)
    try:
        out = do.decompress(data) + do.flush()
    except zlib.error as exc:
        raise MalformedBody(f"body is not a DEFLATE stream: {exc}") from exc
    if not do.eof:
        raise MalformedBody("truncated DEFLATE body")
    if do.unused_data:
        raise MalformedBody("trailing bytes after DEFLATE body")
    return out


def _evict_append(ctx: list, token: int, window: int) -> None:
    # Append first, then drop the oldest entry the moment the list
    # reaches the window size, so at most window - 1 tokens stay visible.
    ctx.append(token)
    if len(ctx) == window:
        ctx.pop(0)


def _generic_counter_encode(seq, predictor, window, prefix_len):
    body: list[int] = []
    counter = 0
    ctx: list[int] = []
    for i, t in enumerate(seq):
        if i >= prefix_len:
            if predictor.predict_next(ctx) == t:
                counter += 1
            else:
                body.append(counter)
                counter = 0
                body.append(~t)
        _evict_append(ctx, t, window)
    body.append(counter)
    return body


def _generic_counter_decode(prefix, records, predictor, window):
    seq: list[int] = []
    ctx: list[int] = []
    for t in prefix:
        seq.append(int(t))
        _evict_append(ctx, int(t), window)
    for rec in records:
        if rec < 0:
            t = ~rec
            seq.append(t)
            _evict_append(ctx, t, window)
        else:
            for _ in range(rec):
                t = predictor.predict_next(ctx)
                seq.append(t)
                _evict_append(ctx, t, window)
    return np.array(seq, dtype=np.uint32)


def _generic_rank_encode(seq, predictor, window, prefix_len):
    body: list[int] = []
    ctx: list[int] = []
    for i, t in enumerate(seq):
        if i >= prefix_len:
            body.append(predictor.ranking(ctx).index(t))
        _evict_append(ctx, t, window)
    return body


def _generic_rank_decode(prefix, ranks, predictor, window, vocab_size):
    seq: list[int] = []
    ctx: list[int] = []
    for t in prefix:
        seq.append(int(t))
        _evict_append(ctx, int(t), window)
    for r in ranks:
        if r >= vocab_size:
            raise RankOutOfRange(f"rank {r} outside vocabulary of size {vocab_size}")
        t = predictor.ranking(ctx)[r]
        seq.append(t)
        _evict_append(ctx, t, window)
    return np.array(seq, dtype=np.uint32)


def compress(
    text: bytes,
    tokenizer,
    predictor,
    config: PredictorConfig,
    *,
    mode: str = "counter",
    literal_prefix_len: int = DEFAULT_PREFIX_LEN,
    deflate_level: int | None = None,
) -> bytes:
    """Compress text into a self-describing container."""
    if mode not in ("counter", "rank"):
        raise ValueError(f"mode must be counter or rank, not {mode!r}")
    if not 0 <= literal_prefix_len <= 0xFFFF:
        raise ValueError("literal_prefix_len must fit in 16 bits")
    mode_byte = MODE_COUNTER if mode == "counter" else MODE_RANK
    tokens = np.asarray(tokenizer.encode(text), dtype=np.uint32)
    seq = [int(t) for t in tokens]
    records = [Literal(t) for t in seq[:literal_prefix_len]]
    if isinstance(predictor, MarkovModel):
        f = predictor.frozen()
        args = (f.ranges, f.toks, f.n16, f.order, config.window, config.shift)
        if mode_byte == MODE_COUNTER:
            raw = kernels.counter_encode(tokens, *args, literal_prefix_len)
        else:
            raw = kernels.rank_encode(tokens, *args, literal_prefix_len)
    else:
        if mode_byte == MODE_COUNTER:
            raw = _generic_counter_encode(seq, predictor, config.window, literal_prefix_len)
        else:
            raw = _generic_rank_encode(seq, predictor, config.window, literal_prefix_len)
    if mode_byte == MODE_COUNTER:
        records.extend(Literal(~v) if v < 0 else Counter(v) for v in raw)
    else:
        records.extend(Counter(v) for v in raw)
    deflated = deflate_bytes(serialize_body(records), deflate_level)
    header = _HEADER.pack(
        CONTAINER_MAGIC,
        CONTAINER_VERSION,
        mode_byte,
        config.window,
        config.quant_bits,
        literal_prefix_len,
        tokenizer.fingerprint(),
        predictor_fingerprint(predictor, config),
        len(deflated),
    )
    return header + deflated


def compress_rank(text, tokenizer, predictor, config, **kwargs) -> bytes:
    """Compress storing per-token ranks instead of run-length counters."""
    return compress(text, tokenizer, predictor, config, mode="rank", **kwargs)


def read_header(container: bytes):
    """Header fields as a dict; raises on bad magic/version/shape."""
    if len(container) < HEADER_SIZE:
        raise MalformedBody("container shorter than its fixed header")
    magic, version, mode_byte, window, quant, prefix_len, tok_fp, pred_fp, body_len = (
        _HEADER.unpack_from(container, 0)
    )
    if magic != CONTAINER_MAGIC:
        raise BadMagic("not a compressed container")
    if version != CONTAINER_VERSION:
        raise BadVersion(f"unsupported container version {version}")
    if mode_byte not in (MODE_COUNTER, MODE_RANK):
        raise MalformedBody(f"unknown codec mode byte {mode_byte}")
    try:
        config = PredictorConfig(window, quant)
    except ValueError as exc:
        raise MalformedBody(f"invalid header config: {exc}") from exc
    return {
        "mode": "counter" if mode_byte == MODE_COUNTER else "rank",
        "config": config,
        "literal_prefix_len": prefix_len,
        "tokenizer_fingerprint": tok_fp,
        "predictor_fingerprint": pred_fp,
        "body_len": body_len,
    }


def decompress(
    container: bytes,
    tokenizer,
    predictor,
    *,
    expected_config: PredictorConfig | None = None,
) -> bytes:
    """Recover the exact original bytes from a container."""
    header = read_header(container)
    config = header["config"]
    if expected_config is not None and expected_config != config:
        raise FingerprintMismatch(
            f"container was written with window={config.window} "
            f"quant_bits={config.quant_bits}, not the expected "
            f"window={expected_config.window} quant_bits={expected_config.quant_bits}"
        )
    if tokenizer.fingerprint() != header["tokenizer_fingerprint"]:
        raise FingerprintMismatch("tokenizer does not match the container")
    if predictor_fingerprint(predictor, config) != header["predictor_fingerprint"]:
        raise FingerprintMismatch("predictor does not match the container")
    payload = container[HEADER_SIZE:]
    if len(payload) != header["body_len"]:
        raise MalformedBody("container body length does not match its header")
    records = parse_body(_inflate(payload))
    prefix_len = header["literal_prefix_len"]
    vocab_size = tokenizer.vocab_size

    k = 0
    prefix: list[int] = []
    while k < len(records) and k < prefix_len and isinstance(records[k], Literal):
        prefix.append(records[k].token)
        k += 1
    rest = records[k:]
    for rec in records:
        if isinstance(rec, Literal) and rec.token >= vocab_size:
            raise MalformedBody(
                f"literal token id {rec.token} outside vocabulary of size {vocab_size}"
            )
    prefix_arr = np.array(prefix, dtype=np.uint32)

    markov = isinstance(predictor, MarkovModel)
    if markov:
        f = predictor.frozen()
        args = (f.ranges, f.toks, f.n16, f.order, config.window, config.shift)
    if header["mode"] == "counter":
        if not rest:
            raise MalformedBody("counter body is missing its trailing counter")
        for idx, rec in enumerate(rest):
            expect_counter = idx % 2 == 0
            if expect_counter != isinstance(rec, Counter):
                raise MalformedBody("counter body must alternate counters and literals")
        if len(rest) % 2 == 0:
            raise MalformedBody("counter body must end with a counter")
        raw = [rec.value if isinstance(rec, Counter) else ~rec.token for rec in rest]
        if markov:
            tokens = kernels.counter_decode(prefix_arr, raw, *args)
        else:
            tokens = _generic_counter_decode(prefix_arr, raw, predictor, config.window)
    else:
        if any(isinstance(rec, Literal) for rec in rest):
            raise MalformedBody("rank body cannot contain literals after the prefix")
        ranks = [rec.value for rec in rest]
        if markov:
            tokens = kernels.rank_decode(prefix_arr, ranks, *args, vocab_size)
        else:
            tokens = _generic_rank_decode(
                prefix_arr, ranks, predictor, config.window, vocab_size
            )
    return tokenizer.decode(tokens)


def decompress_rank(container, tokenizer, predictor, **kwargs) -> bytes:
    """Rank-mode containers carry their mode in the header; alias kept for
    symmetry with compress_rank."""
    return decompress(container, tokenizer, predictor, **kwargs)
