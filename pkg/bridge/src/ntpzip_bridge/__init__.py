"""Byte-level LSTM predictor behind the external-predictor protocol."""

from .model import BOS, VOCAB_SIZE, BytePredictor
from .server import serve

__all__ = ["BOS", "VOCAB_SIZE", "BytePredictor", "serve"]
