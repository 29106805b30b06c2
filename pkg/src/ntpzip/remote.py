"""Client for external predictor processes.

The remote side is a child process answering newline-delimited JSON
requests on stdin with one JSON response per line on stdout: identify,
encode, decode, and rank ops. It owns both the model and its tokenizer,
so one RemotePredictor object serves the codec as predictor and
tokenizer at once. Requests are strictly serial; responses must be
deterministic for identical requests.
"""

from __future__ import annotations

import base64
import hashlib
import json
import shlex
import subprocess

import numpy as np

from .errors import ProtocolError


class RemotePredictor:
    """Spawns and talks to an external predictor process."""

    def __init__(self, endpoint: str):
        argv = shlex.split(endpoint)
        if not argv:
            raise ValueError("empty external predictor command")
        self._proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
        )
        self._cache: dict = {}
        info = self._call({"op": "identify"})
        try:
            self.model_id = str(info["model_id"])
            self.vocab_size = int(info["vocab_size"])
            self.tokenizer_id = str(info["tokenizer_id"])
        except (KeyError, TypeError, ValueError) as exc:
            self.close()
            raise ProtocolError(f"bad identify response: {info!r}") from exc
        if self.vocab_size < 1:
            self.close()
            raise ProtocolError("remote predictor declared an empty vocabulary")

    def _call(self, request: dict) -> dict:
        proc = self._proc
        if proc.poll() is not None:
            raise ProtocolError("external predictor process has exited")
        try:
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
        except OSError as exc:
            raise ProtocolError(f"cannot write to external predictor: {exc}") from exc
        line = proc.stdout.readline()
        if not line:
            raise ProtocolError("external predictor closed its output")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable response line: {line[:80]!r}") from exc
        if not isinstance(response, dict):
            raise ProtocolError("response is not an object")
        if "error" in response:
            raise ProtocolError(f"remote error: {response['error']}")
        return response

    # Tokenizer role.

    def encode(self, text: bytes) -> np.ndarray:
        payload = base64.b64encode(bytes(text)).decode("ascii")
        response = self._call({"op": "encode", "text_b64": payload})
        tokens = response.get("tokens")
        if not isinstance(tokens, list) or any(
            not isinstance(t, int) or not 0 <= t < self.vocab_size for t in tokens
        ):
            raise ProtocolError("encode response is not a list of in-range ids")
        return np.array(tokens, dtype=np.uint32)

    def decode(self, tokens) -> bytes:
        response = self._call({"op": "decode", "tokens": [int(t) for t in tokens]})
        payload = response.get("text_b64")
        if not isinstance(payload, str):
            raise ProtocolError("decode response carries no text")
        try:
            return base64.b64decode(payload, validate=True)
        except (ValueError, TypeError) as exc:
            raise ProtocolError("decode response is not valid base64") from exc

    def fingerprint(self) -> bytes:
        return hashlib.sha256(b"remote-tokenizer:" + self.tokenizer_id.encode()).digest()

    # Predictor role.

    def ranking(self, context, top_k: int | None = None) -> list:
        if top_k is None:
            top_k = self.vocab_size
        key = (tuple(int(t) for t in context), top_k)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        response = self._call(
            {"op": "rank", "context": list(key[0]), "top_k": top_k}
        )
        ranking = response.get("ranking")
        if (
            not isinstance(ranking, list)
            or len(ranking) != top_k
            or any(
                not isinstance(t, int) or not 0 <= t < self.vocab_size for t in ranking
            )
            or len(set(ranking)) != len(ranking)
        ):
            raise ProtocolError("rank response is not a valid permutation prefix")
        self._cache[key] = ranking
        return ranking

    def predict_next(self, context) -> int:
        return self.ranking(context, 1)[0]

    def identity_digest(self) -> bytes:
        return hashlib.sha256(b"remote:" + self.model_id.encode()).digest()

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __enter__(self) -> "RemotePredictor":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
