"""Newline-delimited JSON request loop.

One request object per input line, one response object per output line.
Malformed input of any kind gets an {"error": ...} response; the loop
itself never dies on a request.
"""

from __future__ import annotations

import base64
import json
import sys

from .model import VOCAB_SIZE, BytePredictor


def _byte_ids(value) -> bool:
    return isinstance(value, list) and all(
        isinstance(t, int) and 0 <= t < VOCAB_SIZE for t in value
    )


def handle(predictor: BytePredictor, request) -> dict:
    if not isinstance(request, dict):
        return {"error": "request is not an object"}
    op = request.get("op")
    if op == "identify":
        return {
            "model_id": predictor.model_id,
            "vocab_size": VOCAB_SIZE,
            "tokenizer_id": "raw-bytes",
        }
    if op == "encode":
        try:
            raw = base64.b64decode(request["text_b64"], validate=True)
        except (KeyError, TypeError, ValueError):
            return {"error": "encode needs base64 text in text_b64"}
        return {"tokens": list(raw)}
    if op == "decode":
        tokens = request.get("tokens")
        if not _byte_ids(tokens):
            return {"error": "decode needs a list of byte ids in tokens"}
        return {"text_b64": base64.b64encode(bytes(tokens)).decode("ascii")}
    if op == "rank":
        context = request.get("context")
        top_k = request.get("top_k", VOCAB_SIZE)
        if not _byte_ids(context):
            return {"error": "rank needs a list of byte ids in context"}
        if not isinstance(top_k, int) or not 1 <= top_k <= VOCAB_SIZE:
            return {"error": "top_k must be between 1 and the vocabulary size"}
        return {"ranking": predictor.ranking(context, top_k)}
    return {"error": f"unknown op {op!r}"}


def serve(predictor: BytePredictor, stdin=None, stdout=None) -> None:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            response = {"error": "unparseable request line"}
        else:
            try:
                response = handle(predictor, request)
            except Exception as exc:  # answer, never crash the loop
                response = {"error": f"internal failure: {exc}"}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
