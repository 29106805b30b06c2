"""Throughput comparison of the compiled and pure-Python codec kernels.

Builds one trained table, runs both engines over the same token stream,
checks that their outputs are byte-for-byte identical, and prints
tokens/second for each per-token loop.

Usage: python3 benchmarks/kernel_benchmark.py [--tokens N] [--rank-tokens N]
"""

import argparse
import random
import time

import numpy as np

from ntpzip import _pykernels
from ntpzip.predictor import train_markov
from ntpzip.tokenizer import byte_vocabulary

try:
    from ntpzip import _ckernels
except ImportError:
    _ckernels = None


def _text_stream(rng: random.Random, n_bytes: int) -> bytes:
    """Word-shaped filler so the predictor gets realistic hit runs."""
    syllables = ["ta", "re", "no", "vi", "sol", "mar", "den", "ki"]
    words = ["".join(rng.choices(syllables, k=rng.randint(1, 3))) for _ in range(80)]
    out = []
    size = 0
    while size < n_bytes:
        word = rng.choice(words)
        out.append(word)
        size += len(word) + 1
    return " ".join(out).encode("ascii")[:n_bytes]


def _timed(fn, *args):
    start = time.perf_counter()
    result = fn(*args)
    return result, time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tokens", type=int, default=200_000,
                        help="stream length for the counter loops")
    parser.add_argument("--rank-tokens", type=int, default=25_000,
                        help="stream length for the rank loops")
    parser.add_argument("--train-bytes", type=int, default=60_000)
    parser.add_argument("--order", type=int, default=3)
    parser.add_argument("--window", type=int, default=128)
    parser.add_argument("--quant", type=int, default=16, choices=(4, 8, 16))
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    vocab = byte_vocabulary()
    train = vocab.encode(_text_stream(rng, args.train_bytes))
    model = train_markov(train, args.order, vocab.vocab_size)
    frozen = model.frozen()
    shift = 16 - args.quant
    common = (frozen.ranges, frozen.toks, frozen.n16, frozen.order,
              args.window, shift)
    stream = np.asarray(
        vocab.encode(_text_stream(rng, max(args.tokens, args.rank_tokens))),
        dtype=np.uint32,
    )
    counter_stream = stream[: args.tokens]
    rank_stream = stream[: args.rank_tokens]
    prefix = 10

    engines = [("py", _pykernels)]
    if _ckernels is not None:
        engines.append(("c", _ckernels))
    else:
        print("compiled kernels not built; benchmarking pure Python only")

    jobs = [
        ("counter_encode", counter_stream,
         lambda e, s: e.counter_encode(s, *common, prefix)),
        ("rank_encode", rank_stream,
         lambda e, s: e.rank_encode(s, *common, prefix)),
    ]
    print(f"order={args.order} window={args.window} quant={args.quant} "
          f"contexts={len(frozen.ranges)}")
    print(f"{'op':<16}{'engine':<8}{'tokens':>10}{'seconds':>10}{'tok/s':>12}")
    rates: dict[tuple[str, str], float] = {}
    outputs: dict[tuple[str, str], object] = {}
    for op, op_stream, run in jobs:
        for name, engine in engines:
            result, seconds = _timed(run, engine, op_stream)
            outputs[(op, name)] = result
            rates[(op, name)] = len(op_stream) / seconds
            print(f"{op:<16}{name:<8}{len(op_stream):>10}{seconds:>10.3f}"
                  f"{rates[(op, name)]:>12.0f}")

    decode_jobs = [
        ("counter_decode", "counter_encode", counter_stream,
         lambda e, body: e.counter_decode(counter_stream[:prefix], body, *common)),
        ("rank_decode", "rank_encode", rank_stream,
         lambda e, body: e.rank_decode(rank_stream[:prefix], body, *common,
                                       frozen.vocab_size)),
    ]
    for op, source_op, op_stream, run in decode_jobs:
        for name, engine in engines:
            body = outputs[(source_op, name)]
            result, seconds = _timed(run, engine, body)
            assert list(result) == list(op_stream), f"{op}/{name} mismatch"
            rates[(op, name)] = len(op_stream) / seconds
            print(f"{op:<16}{name:<8}{len(op_stream):>10}{seconds:>10.3f}"
                  f"{rates[(op, name)]:>12.0f}")

    if _ckernels is not None:
        for op in ("counter_encode", "rank_encode"):
            py_out, c_out = outputs[(op, "py")], outputs[(op, "c")]
            assert list(py_out) == list(c_out), f"{op}: engines disagree"
        print("engine outputs identical")
        for op in ("counter_encode", "counter_decode", "rank_encode",
                   "rank_decode"):
            print(f"{op}: c is {rates[(op, 'c')] / rates[(op, 'py')]:.1f}x py")


if __name__ == "__main__":
    main()
