"""Command-line front end.

Exit codes: 0 success, 1 other failures, 2 usage, 3 unreadable or
malformed input files, 4 fingerprint mismatch, 5 malformed container.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import codec, membership, metrics
from .errors import (
    BadMagic,
    BadVersion,
    FingerprintMismatch,
    MalformedBody,
    MalformedFile,
    NtpzipError,
    RankOutOfRange,
)
from .predictor import (
    MarkovModel,
    PredictorConfig,
    QUANT_LEVELS,
    WINDOW_SWEEP,
    train_markov,
)
from .remote import RemotePredictor
from .tokenizer import Vocabulary, byte_vocabulary, train_word_vocab


class _CliFailure(Exception):
    """Failure with a pre-assigned exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except OSError as exc:
        raise _CliFailure(3, f"cannot read {path}: {exc}") from exc


def _write(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as handle:
            handle.write(data)
    except OSError as exc:
        raise _CliFailure(3, f"cannot write {path}: {exc}") from exc


def _load_vocab(path: str) -> Vocabulary:
    try:
        return Vocabulary.from_bytes(_read(path))
    except (BadMagic, MalformedFile) as exc:
        raise _CliFailure(3, f"vocabulary file {path}: {exc}") from exc


def _load_model(path: str) -> MarkovModel:
    try:
        return MarkovModel.from_bytes(_read(path))
    except (BadMagic, MalformedFile) as exc:
        raise _CliFailure(3, f"model file {path}: {exc}") from exc


def _endpoints(args):
    """Tokenizer and predictor per the flags: local files or one remote
    process filling both roles."""
    if args.external_predictor:
        if args.model or args.vocab:
            raise _CliFailure(
                2, "--external-predictor replaces --model and --vocab"
            )
        remote = RemotePredictor(args.external_predictor)
        return remote, remote, remote
    if not args.model or not args.vocab:
        raise _CliFailure(2, "--model and --vocab are required without --external-predictor")
    return _load_vocab(args.vocab), _load_model(args.model), None


def _cmd_train_vocab(args) -> int:
    if args.kind == "byte":
        vocab = byte_vocabulary()
    else:
        if not args.input:
            raise _CliFailure(2, "training a word vocabulary requires --input")
        vocab = train_word_vocab(_read(args.input), args.target_size)
    _write(args.output, vocab.to_bytes())
    print(f"wrote {args.kind} vocabulary ({vocab.vocab_size} entries) to {args.output}")
    return 0


def _cmd_train_model(args) -> int:
    vocab = _load_vocab(args.vocab)
    tokens = vocab.encode(_read(args.input))
    model = train_markov(tokens, args.order, vocab.vocab_size)
    _write(args.output, model.to_bytes())
    print(
        f"wrote order-{args.order} model ({len(model.counts)} contexts, "
        f"{len(tokens)} training tokens) to {args.output}"
    )
    return 0


def _cmd_compress(args) -> int:
    tokenizer, predictor, remote = _endpoints(args)
    try:
        text = _read(args.input)
        config = PredictorConfig(args.window, args.quant_bits)
        begin = time.perf_counter()
        container = codec.compress(
            text,
            tokenizer,
            predictor,
            config,
            mode=args.mode,
            literal_prefix_len=args.prefix_len,
        )
        elapsed = time.perf_counter() - begin
        _write(args.output, container)
        tokens = len(tokenizer.encode(text))
        report = metrics.CompressionReport(
            document=args.input,
            original_bytes=len(text),
            compressed_bytes=len(container),
            ratio=metrics.ratio(len(text), len(container)),
            bpc=metrics.bpc(len(container), metrics.character_count(text)),
            tokens_per_second=tokens / max(elapsed, 1e-9),
            config=config,
            codec_mode=args.mode,
        )
        print(metrics.report_csv([report]))
        return 0
    finally:
        if remote is not None:
            remote.close()


def _cmd_decompress(args) -> int:
    tokenizer, predictor, remote = _endpoints(args)
    try:
        if (args.window is None) != (args.quant_bits is None):
            raise _CliFailure(2, "give both --window and --quant-bits, or neither")
        expected = None
        if args.window is not None:
            expected = PredictorConfig(args.window, args.quant_bits)
        text = codec.decompress(
            _read(args.input), tokenizer, predictor, expected_config=expected
        )
        _write(args.output, text)
        return 0
    finally:
        if remote is not None:
            remote.close()


def _parse_int_list(raw: str, what: str) -> list[int]:
    try:
        return [int(piece) for piece in raw.split(",") if piece]
    except ValueError as exc:
        raise _CliFailure(2, f"bad {what} list {raw!r}") from exc


def _cmd_bench(args) -> int:
    vocab = _load_vocab(args.vocab)
    model = _load_model(args.model)
    if args.sweep:
        windows, quants = list(WINDOW_SWEEP), list(QUANT_LEVELS)
    else:
        windows = _parse_int_list(args.windows, "window")
        quants = _parse_int_list(args.quants, "quant")
    reports = metrics.bench_sweep(
        _read(args.input),
        vocab,
        model,
        windows,
        quants,
        mode=args.mode,
        document=args.input,
    )
    print(metrics.report_csv(reports))
    if args.json:
        _write(args.json, metrics.report_json(reports).encode())
    return 0


def _cmd_sample_batches(args) -> int:
    vocab = _load_vocab(args.vocab)
    corpus = _read(args.input)
    batches = metrics.sample_batches(corpus, args.batches, args.batch_tokens, vocab)
    starts = metrics.batch_start_lines(len(metrics.line_offsets(corpus)), args.batches)
    print("batch,start_line,tokens")
    for i, (line, batch) in enumerate(zip(starts, batches)):
        print(f"{i},{line},{len(batch)}")
    return 0


def _cmd_probe(args) -> int:
    vocab = _load_vocab(args.vocab)
    model = _load_model(args.model)
    report = membership.membership_probe(
        _read(args.input), vocab, model, args.threshold
    )
    print(f"worst_size={report.worst_size}")
    print(f"best_size={report.best_size}")
    print(f"degradation_ratio={report.degradation_ratio:.6g}")
    print(f"baseline_ratio={report.baseline_ratio:.6g}")
    print(f"threshold={report.threshold:.6g}")
    print(
        f"worst_config=window:{report.worst_config.window},"
        f"quant_bits:{report.worst_config.quant_bits}"
    )
    print(
        f"best_config=window:{report.best_config.window},"
        f"quant_bits:{report.best_config.quant_bits}"
    )
    print(f"verdict={report.verdict}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ntpzip",
        description="Lossless text compression driven by a deterministic "
        "next-token predictor.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = subs.add_parser("train-vocab", help="build a tokenizer vocabulary", formatter_class=fmt)
    p.add_argument("-i", "--input", help="training corpus (word kind only)")
    p.add_argument("-o", "--output", required=True, help="vocabulary file to write")
    p.add_argument("--kind", choices=("byte", "word"), default="word", help="vocabulary kind")
    p.add_argument("--target-size", type=int, default=512, help="word vocabulary size")
    p.set_defaults(func=_cmd_train_vocab)

    p = subs.add_parser("train-model", help="train a Markov model", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True, help="training corpus")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--vocab", required=True, help="vocabulary file")
    p.add_argument("--order", type=int, default=3, help="maximum context length")
    p.set_defaults(func=_cmd_train_model)

    p = subs.add_parser("compress", help="compress a file", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--model", help="model file")
    p.add_argument("--vocab", help="vocabulary file")
    p.add_argument("--external-predictor", help="command for a predictor process")
    p.add_argument("-w", "--window", type=int, default=2048, help="context window")
    p.add_argument(
        "-q", "--quant-bits", type=int, choices=QUANT_LEVELS, default=16,
        help="probability precision",
    )
    p.add_argument("--mode", choices=("counter", "rank"), default="counter")
    p.add_argument("--prefix-len", type=int, default=codec.DEFAULT_PREFIX_LEN,
                   help="tokens stored literally before prediction starts")
    p.set_defaults(func=_cmd_compress)

    p = subs.add_parser("decompress", help="restore a compressed file", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--model", help="model file")
    p.add_argument("--vocab", help="vocabulary file")
    p.add_argument("--external-predictor", help="command for a predictor process")
    p.add_argument("-w", "--window", type=int, help="expected window (checked against the header)")
    p.add_argument("-q", "--quant-bits", type=int, choices=QUANT_LEVELS,
                   help="expected precision (checked against the header)")
    p.set_defaults(func=_cmd_decompress)

    p = subs.add_parser("bench", help="sweep configurations and report", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--sweep", action="store_true", help="full window x quant grid")
    p.add_argument("--windows", default="16,2048", help="comma-separated windows")
    p.add_argument("--quants", default="4,16", help="comma-separated precisions")
    p.add_argument("--mode", choices=("counter", "rank"), default="counter")
    p.add_argument("--json", help="also write the report as JSON to this path")
    p.set_defaults(func=_cmd_bench)

    p = subs.add_parser("sample-batches", help="evenly line-sampled token batches",
                        formatter_class=fmt)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--batches", type=int, default=10)
    p.add_argument("--batch-tokens", type=int, default=100000)
    p.set_defaults(func=_cmd_sample_batches)

    p = subs.add_parser("probe", help="training-set membership probe", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--threshold", type=float, default=3.0,
                   help="degradation ratio above which text counts as a member")
    p.set_defaults(func=_cmd_probe)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliFailure as exc:
        print(f"ntpzip: {exc}", file=sys.stderr)
        return exc.code
    except FingerprintMismatch as exc:
        print(f"ntpzip: {exc}", file=sys.stderr)
        return 4
    except (BadMagic, BadVersion, MalformedBody, RankOutOfRange) as exc:
        print(f"ntpzip: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"ntpzip: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"ntpzip: {exc}", file=sys.stderr)
        return 2
    except NtpzipError as exc:
        print(f"ntpzip: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
