"""Compression accounting: ratio, bits per character, sweep benchmarks,
and uniform line-sampled batching for large corpora."""

from __future__ import annotations

import json
import time
import zlib
from dataclasses import dataclass

from . import codec
from .errors import EmptyCorpus, VerificationError
from .predictor import PredictorConfig
from .tokenizer import encode_prefix

CSV_HEADER = (
    "document,window,quant_bits,mode,original_bytes,compressed_bytes,"
    "ratio,bpc,tokens_per_second"
)


@dataclass(frozen=True)
class CompressionReport:
    """One measured compression run (config is None for the raw-DEFLATE
    baseline)."""

    document: str
    original_bytes: int
    compressed_bytes: int
    ratio: float
    bpc: float
    tokens_per_second: float
    config: PredictorConfig | None
    codec_mode: str


def ratio(original_bytes: int, compressed_bytes: int) -> float:
    """Size of the original divided by the size of the compressed form."""
    if compressed_bytes == 0:
        raise ZeroDivisionError("compressed size is zero")
    return original_bytes / compressed_bytes


def bpc(compressed_bytes: int, characters: int) -> float:
    """Average number of bits spent per character of the original."""
    if characters == 0:
        raise ZeroDivisionError("character count is zero")
    return 8 * compressed_bytes / characters


def character_count(text: bytes) -> int:
    """Unicode scalar count when the text is valid UTF-8, else byte count."""
    try:
        return len(text.decode("utf-8"))
    except UnicodeDecodeError:
        return len(text)


def batch_start_lines(total_lines: int, n_batches: int) -> list[int]:
    """Evenly spaced batch starts: multiples of floor(total/n)."""
    stride = total_lines // n_batches
    return [i * stride for i in range(n_batches)]


def line_offsets(corpus: bytes) -> list[int]:
    """Byte offset of the first character of every line."""
    offsets = [0]
    pos = corpus.find(b"\n")
    while pos != -1:
        if pos + 1 < len(corpus):
            offsets.append(pos + 1)
        pos = corpus.find(b"\n", pos + 1)
    return offsets


def sample_batches(corpus: bytes, n_batches: int, batch_tokens: int, tokenizer):
    """Token batches starting at evenly spaced lines of the corpus.

    Batch i begins at the first byte of its start line and extends
    batch_tokens tokens forward, truncated at the corpus end.
    """
    if n_batches < 1:
        raise ValueError("n_batches must be at least 1")
    if batch_tokens < 0:
        raise ValueError("batch_tokens must be non-negative")
    if not corpus:
        raise EmptyCorpus("corpus is empty")
    offsets = line_offsets(corpus)
    if len(offsets) < n_batches:
        raise EmptyCorpus(
            f"corpus has {len(offsets)} lines but {n_batches} batches were requested"
        )
    starts = batch_start_lines(len(offsets), n_batches)
    return [
        encode_prefix(corpus, tokenizer, offsets[line], batch_tokens)
        for line in starts
    ]


def _measure(document, text, compressed_bytes, tokens, elapsed, config, mode):
    chars = character_count(text)
    return CompressionReport(
        document=document,
        original_bytes=len(text),
        compressed_bytes=compressed_bytes,
        ratio=ratio(len(text), compressed_bytes),
        bpc=bpc(compressed_bytes, chars),
        tokens_per_second=tokens / max(elapsed, 1e-9),
        config=config,
        codec_mode=mode,
    )


def bench_sweep(
    text: bytes,
    tokenizer,
    model,
    windows,
    quants,
    *,
    mode: str = "counter",
    document: str = "-",
) -> list[CompressionReport]:
    """One verified CompressionReport per (window, quant) pair, then a
    DEFLATE-only baseline report."""
    windows = list(windows)
    quants = list(quants)
    if not windows or not quants:
        raise ValueError("sweep lists must be non-empty")
    token_count = len(tokenizer.encode(text))
    reports = []
    for window in windows:
        for quant in quants:
            config = PredictorConfig(window, quant)
            begin = time.perf_counter()
            container = codec.compress(text, tokenizer, model, config, mode=mode)
            elapsed = time.perf_counter() - begin
            if codec.decompress(container, tokenizer, model) != text:
                raise VerificationError(
                    f"round-trip failed at window={window} quant_bits={quant}"
                )
            reports.append(
                _measure(document, text, len(container), token_count, elapsed, config, mode)
            )
    begin = time.perf_counter()
    deflated = codec.deflate_bytes(text)
    elapsed = time.perf_counter() - begin
    if zlib.decompress(deflated, wbits=-15) != text:
        raise VerificationError("DEFLATE baseline failed to round-trip")
    reports.append(
        _measure(document, text, len(deflated), token_count, elapsed, None, "deflate")
    )
    return reports


def report_csv(reports) -> str:
    lines = [CSV_HEADER]
    for r in reports:
        window = r.config.window if r.config else ""
        quant = r.config.quant_bits if r.config else ""
        lines.append(
            f"{r.document},{window},{quant},{r.codec_mode},{r.original_bytes},"
            f"{r.compressed_bytes},{r.ratio:.6g},{r.bpc:.6g},{r.tokens_per_second:.6g}"
        )
    return "\n".join(lines)


def report_json(reports) -> str:
    rows = []
    for r in reports:
        rows.append(
            {
                "document": r.document,
                "window": r.config.window if r.config else None,
                "quant_bits": r.config.quant_bits if r.config else None,
                "mode": r.codec_mode,
                "original_bytes": r.original_bytes,
                "compressed_bytes": r.compressed_bytes,
                "ratio": r.ratio,
                "bpc": r.bpc,
                "tokens_per_second": r.tokens_per_second,
            }
        )
    return json.dumps(rows, indent=2)
