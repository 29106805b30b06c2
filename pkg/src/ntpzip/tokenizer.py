"""Reversible byte/word tokenizers.

Both vocabulary kinds keep the 256 single-byte entries at ids 0..255, so
encoding is total: any byte that no learned unit covers falls back to its
own byte id. There is no unknown token and decode(encode(t)) == t for
every byte-string.
"""

from __future__ import annotations

import hashlib
import struct
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from .errors import BadMagic, MalformedFile, OutOfRangeId, TargetTooSmall

VOCAB_MAGIC = b"NTPV1"
BYTE_KIND = 0
WORD_KIND = 1
_KIND_NAMES = {BYTE_KIND: "byte", WORD_KIND: "word"}

# Token streams are numpy uint32 arrays internally; any int sequence is
# accepted at API boundaries.
TokenStream = np.ndarray


class Vocabulary:
    """Dense token table: ids 0..n-1, single bytes first, learned units after."""

    def __init__(self, entries: Sequence[bytes], kind: int):
        if kind not in _KIND_NAMES:
            raise ValueError(f"unknown vocabulary kind {kind!r}")
        entries = [bytes(e) for e in entries]
        if kind == BYTE_KIND and len(entries) != 256:
            raise ValueError("byte vocabulary must have exactly 256 entries")
        if len(entries) < 256:
            raise ValueError("vocabulary must include the 256-byte fallback plane")
        for i in range(256):
            if entries[i] != bytes([i]):
                raise ValueError(f"entry {i} must be the single byte {i:#04x}")
        if len(set(entries)) != len(entries):
            raise ValueError("vocabulary entries must be unique")
        self.entries = entries
        self.kind = kind
        self.id_of = {e: i for i, e in enumerate(entries)}
        self._max_len = max(len(e) for e in entries)

    @property
    def vocab_size(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.kind == other.kind
            and self.entries == other.entries
        )

    def encode(self, text: bytes) -> TokenStream:
        return encode(text, self)

    def decode(self, stream: Iterable[int]) -> bytes:
        return decode(stream, self)

    def to_bytes(self) -> bytes:
        """Serialize as NTPV1: kind byte, entry count, length-prefixed entries."""
        parts = [VOCAB_MAGIC, struct.pack("<BI", self.kind, len(self.entries))]
        for entry in self.entries:
            if len(entry) > 0xFFFF:
                raise ValueError("vocabulary entry longer than 65535 bytes")
            parts.append(struct.pack("<H", len(entry)))
            parts.append(entry)
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Vocabulary":
        if data[:5] != VOCAB_MAGIC:
            raise BadMagic("not a vocabulary file")
        try:
            kind, count = struct.unpack_from("<BI", data, 5)
        except struct.error as exc:
            raise MalformedFile("truncated vocabulary header") from exc
        offset = 10
        entries = []
        for _ in range(count):
            if offset + 2 > len(data):
                raise MalformedFile("truncated vocabulary entry")
            (length,) = struct.unpack_from("<H", data, offset)
            offset += 2
            if offset + length > len(data):
                raise MalformedFile("truncated vocabulary entry")
            entries.append(data[offset : offset + length])
            offset += length
        if offset != len(data):
            raise MalformedFile("trailing bytes after vocabulary entries")
        try:
            return cls(entries, kind)
        except ValueError as exc:
            raise MalformedFile(str(exc)) from exc

    def fingerprint(self) -> bytes:
        """32-byte content hash identifying this vocabulary exactly."""
        return hashlib.sha256(self.to_bytes()).digest()


def byte_vocabulary() -> Vocabulary:
    """The identity tokenizer: one token per byte."""
    return Vocabulary([bytes([i]) for i in range(256)], BYTE_KIND)


def encode(text: bytes, vocab: Vocabulary) -> TokenStream:
    """Tokenize text. Greedy longest match over units; single bytes always match."""
    if vocab.kind == BYTE_KIND:
        return np.frombuffer(bytes(text), dtype=np.uint8).astype(np.uint32)
    return encode_prefix(text, vocab, 0, None)


def encode_prefix(
    text: bytes, vocab: Vocabulary, start: int, max_tokens: int | None
) -> TokenStream:
    """Tokenize text[start:], stopping after max_tokens tokens when given."""
    text = bytes(text)
    if vocab.kind == BYTE_KIND:
        end = len(text) if max_tokens is None else min(len(text), start + max_tokens)
        return np.frombuffer(text[start:end], dtype=np.uint8).astype(np.uint32)
    id_of = vocab.id_of
    max_len = vocab._max_len
    ids: list[int] = []
    i = start
    n = len(text)
    while i < n and (max_tokens is None or len(ids) < max_tokens):
        length = min(max_len, n - i)
        while length > 1 and text[i : i + length] not in id_of:
            length -= 1
        ids.append(id_of[text[i : i + length]])
        i += length
    return np.array(ids, dtype=np.uint32)


def decode(stream: Iterable[int], vocab: Vocabulary) -> bytes:
    """Concatenate entry byte-strings; raises OutOfRangeId on any bad id."""
    entries = vocab.entries
    size = len(entries)
    parts = []
    for raw in stream:
        i = int(raw)
        if not 0 <= i < size:
            raise OutOfRangeId(f"token id {i} outside vocabulary of size {size}")
        parts.append(entries[i])
    return b"".join(parts)


def train_word_vocab(corpus: bytes, target_size: int) -> Vocabulary:
    """Grow a word vocabulary by merging the most frequent adjacent pair.

    Deterministic: ties go to the lexicographically smallest pair, and
    training stops early once no adjacent pair occurs twice.
    """
    if target_size < 257:
        raise TargetTooSmall("target_size must be at least 257")
    entries = [bytes([i]) for i in range(256)]
    seq = [bytes([b]) for b in bytes(corpus)]
    known = set(entries)
    while len(entries) < target_size:
        pairs = Counter(zip(seq, seq[1:]))
        # A unit may already exist when separate merges produce the same
        # byte-string; skip those pairs to keep entries unique.
        candidates = {p: c for p, c in pairs.items() if c >= 2 and p[0] + p[1] not in known}
        if not candidates:
            break
        best_count = max(candidates.values())
        left, right = min(p for p, c in candidates.items() if c == best_count)
        merged = left + right
        entries.append(merged)
        known.add(merged)
        new_seq = []
        j = 0
        while j < len(seq):
            if j + 1 < len(seq) and seq[j] == left and seq[j + 1] == right:
                new_seq.append(merged)
                j += 2
            else:
                new_seq.append(seq[j])
                j += 1
        seq = new_seq
    return Vocabulary(entries, WORD_KIND)
