"""Deterministic byte-level LSTM language model.

Everything that feeds the weights is pinned: the training text is
synthesized from a fixed seed, initialization and batch sampling use
fixed seeds, and torch runs single-threaded. Two processes built with
the same parameters therefore produce identical rankings, which is what
lets a compressor in one process and a decompressor in another agree.
"""

from __future__ import annotations

import random

import numpy as np
import torch
from torch import nn

VOCAB_SIZE = 256
BOS = 256


def training_text(n_bytes: int = 8192) -> bytes:
    """Word-shaped filler; identical bytes on every call."""
    rng = random.Random(11)
    syllables = ["an", "or", "est", "il", "un", "re", "th", "om", "ed", "is"]
    words = ["".join(rng.choices(syllables, k=rng.randint(1, 3))) for _ in range(150)]
    out: list[str] = []
    size = 0
    while size < n_bytes:
        sentence = " ".join(rng.choices(words, k=rng.randint(4, 9))) + ".\n"
        out.append(sentence)
        size += len(sentence)
    return "".join(out).encode("ascii")[:n_bytes]


class ByteLstm(nn.Module):
    def __init__(self, hidden_size: int, embed_size: int = 32):
        super().__init__()
        self.embed = nn.Embedding(VOCAB_SIZE + 1, embed_size)
        self.lstm = nn.LSTM(embed_size, hidden_size, batch_first=True)
        self.out = nn.Linear(hidden_size, VOCAB_SIZE)

    def forward(self, tokens, state=None):
        hidden, state = self.lstm(self.embed(tokens), state)
        return self.out(hidden), state


class BytePredictor:
    """Trained byte LM with an incremental-state cache for rankings.

    Requests arrive with the full visible context each time, but during
    compression and decompression consecutive contexts extend each other
    by one token, so keeping the last few LSTM states turns each request
    into a single step instead of a full replay.
    """

    def __init__(self, seed: int = 0, train_steps: int = 120, hidden_size: int = 64):
        torch.manual_seed(seed)
        torch.set_num_threads(1)
        self.seed = seed
        self.train_steps = train_steps
        self.hidden_size = hidden_size
        self.model = ByteLstm(hidden_size)
        self._train(train_steps)
        self.model.eval()
        self._states: dict[tuple, tuple] = {}

    @property
    def model_id(self) -> str:
        return f"byte-lstm-seed{self.seed}-steps{self.train_steps}-h{self.hidden_size}"

    def _train(self, steps: int) -> None:
        data = torch.tensor(list(training_text()), dtype=torch.long)
        rng = random.Random(7)
        optimizer = torch.optim.Adam(self.model.parameters(), lr=1e-2)
        loss_fn = nn.CrossEntropyLoss()
        seq_len, batch = 64, 16
        self.model.train()
        for _ in range(steps):
            starts = [rng.randrange(len(data) - seq_len - 1) for _ in range(batch)]
            x = torch.stack([data[s : s + seq_len] for s in starts])
            y = torch.stack([data[s + 1 : s + seq_len + 1] for s in starts])
            logits, _ = self.model(x)
            loss = loss_fn(logits.reshape(-1, VOCAB_SIZE), y.reshape(-1))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

    def logits(self, context) -> np.ndarray:
        """Next-byte logits after BOS plus the given context bytes."""
        key = tuple(int(t) for t in context)
        with torch.no_grad():
            prev = self._states.get(key[:-1]) if key else None
            if prev is not None:
                out, state = self.model(torch.tensor([[key[-1]]]), prev)
            else:
                out, state = self.model(torch.tensor([[BOS, *key]]))
        self._states[key] = state
        while len(self._states) > 8:
            self._states.pop(next(iter(self._states)))
        return out[0, -1].numpy()

    def ranking(self, context, top_k: int) -> list[int]:
        order = np.argsort(-self.logits(context), kind="stable")
        return [int(t) for t in order[:top_k]]
