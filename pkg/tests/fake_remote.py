"""Deterministic scripted predictor process for client tests.

Speaks the newline-delimited JSON protocol over stdin/stdout. The
"model" is a byte cycler: after context byte b it predicts b+1, b+2, ...
(mod 256), and its tokenizer is the raw byte identity. --behavior
selects deliberate protocol violations so the client's validation paths
can be exercised.
"""

import argparse
import base64
import json
import sys

VOCAB_SIZE = 256


def ranking_for(context, top_k):
    last = context[-1] if context else 0
    return [(last + 1 + j) % VOCAB_SIZE for j in range(top_k)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "--behavior",
        default="ok",
        choices=["ok", "short-rank", "dup-rank", "big-encode", "error",
                 "exit-after-identify", "garbage", "bad-identify"],
    )
    args = parser.parse_args()
    rank_calls = 0

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            op = request.get("op")
        except json.JSONDecodeError:
            op = None

        if op == "identify":
            if args.behavior == "bad-identify":
                response = {"model_id": "byte-cycler"}
            else:
                response = {
                    "model_id": "byte-cycler",
                    "vocab_size": VOCAB_SIZE,
                    "tokenizer_id": "raw-bytes",
                }
        elif args.behavior == "exit-after-identify":
            return
        elif args.behavior == "error":
            response = {"error": "refused"}
        elif args.behavior == "garbage":
            print("this is not json", flush=True)
            continue
        elif op == "encode":
            if args.behavior == "big-encode":
                response = {"tokens": [999]}
            else:
                text = base64.b64decode(request["text_b64"])
                response = {"tokens": list(text)}
        elif op == "decode":
            tokens = request["tokens"]
            if any(not 0 <= t < VOCAB_SIZE for t in tokens):
                response = {"error": "token id out of range"}
            else:
                response = {
                    "text_b64": base64.b64encode(bytes(tokens)).decode("ascii")
                }
        elif op == "rank":
            rank_calls += 1
            ranking = ranking_for(request["context"], request["top_k"])
            if args.behavior == "short-rank":
                ranking = ranking[:-1]
            elif args.behavior == "dup-rank" and len(ranking) > 1:
                ranking[-1] = ranking[0]
            response = {"ranking": ranking}
        elif op == "stats":
            response = {"rank_calls": rank_calls}
        else:
            response = {"error": f"unknown op {op!r}"}
        print(json.dumps(response), flush=True)


if __name__ == "__main__":
    main()
