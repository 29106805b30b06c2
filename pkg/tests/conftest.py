"""Shared fixtures and deterministic hypothesis settings."""

import pytest
from hypothesis import HealthCheck, settings

from ntpzip import byte_vocabulary, train_markov

import corpora

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def byte_vocab():
    return byte_vocabulary()


@pytest.fixture(scope="session")
def ab_model(byte_vocab):
    """Order-2 model of a perfectly periodic two-byte text."""
    return train_markov(byte_vocab.encode(b"ab" * 1000), 2, byte_vocab.vocab_size)


@pytest.fixture(scope="session")
def trained_setup():
    """Synthetic corpus, its member documents, vocabulary, order-3 model."""
    return corpora.training_setup()
