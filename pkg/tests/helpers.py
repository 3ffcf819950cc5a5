"""Shared fixtures and random-case generators for the test suite."""

from __future__ import annotations

import random

import numpy as np

from roleaug.corpus import LabeledCorpus, build_corpus
from roleaug.embeddings import EmbeddingTable

# Ten-document two-class corpus with hand-checkable statistics. With the
# vectors below and alpha=1, the global-quartile roles are:
#   tech : Gold {circuit, voltage, sensor}, Venture {monday},
#          Trivial {game, ladder, score}, Bonus {}
#   sport: Gold {team, game, score}, Venture {ladder},
#          Trivial {voltage, monday, sensor}, Bonus {}
FIXTURE_DOCS = [
    ("Circuit sensor voltage and monday.", "tech"),
    ("The circuit monday voltage.", "tech"),
    ("Sensor circuit of the monday.", "tech"),
    ("Voltage sensor and the circuit.", "tech"),
    ("The diode circuit and voltage.", "tech"),
    ("Team game score and ladder.", "sport"),
    ("The team ladder game.", "sport"),
    ("Score team of the ladder.", "sport"),
    ("Game score and the team.", "sport"),
    ("The referee team and game.", "sport"),
]

FIXTURE_VECTORS = {
    "tech": (1.0, 0.0, 0.0),
    "sport": (0.0, 1.0, 0.0),
    "circuit": (0.9, 0.1, 0.2),
    "sensor": (0.85, 0.05, 0.3),
    "voltage": (0.95, 0.0, 0.1),
    "diode": (0.8, 0.1, 0.25),
    "resistor": (0.88, 0.02, 0.2),
    "team": (0.1, 0.9, 0.2),
    "game": (0.05, 0.85, 0.3),
    "score": (0.0, 0.95, 0.1),
    "referee": (0.1, 0.8, 0.25),
    "league": (0.02, 0.88, 0.2),
    "monday": (-0.3, -0.2, 0.9),
    "ladder": (-0.2, -0.3, 0.85),
    "the": (0.1, 0.1, 0.95),
    "and": (0.12, 0.08, 0.9),
    "of": (0.08, 0.12, 0.92),
}


def fixture_corpus() -> LabeledCorpus:
    return build_corpus(FIXTURE_DOCS)


def make_table(vectors: dict[str, tuple]) -> EmbeddingTable:
    words = list(vectors)
    return EmbeddingTable(words, np.array([vectors[w] for w in words], dtype=np.float64))


def fixture_table() -> EmbeddingTable:
    return make_table(FIXTURE_VECTORS)


WORD_POOL = [f"w{i}" for i in range(200)]


def random_corpus(
    rng: random.Random,
    max_classes: int = 5,
    max_docs: int = 50,
    vocab: list[str] | None = None,
) -> LabeledCorpus:
    """Small random corpus with every class populated."""
    k = rng.randint(2, max_classes)
    labels = [f"class{i}" for i in range(k)]
    n_docs = rng.randint(k, max_docs)
    pool = vocab if vocab is not None else WORD_POOL
    records = []
    for i in range(n_docs):
        label = labels[i] if i < k else rng.choice(labels)
        words = [rng.choice(pool) for _ in range(rng.randint(1, 25))]
        if rng.random() < 0.3:
            words.append("!")
        records.append((" ".join(words), label))
    return build_corpus(records)


def random_table(rng: random.Random, words: list[str], dim: int | None = None) -> EmbeddingTable:
    dim = dim if dim is not None else rng.randint(2, 12)
    matrix = np.array(
        [[rng.uniform(-1.0, 1.0) for _ in range(dim)] for _ in words], dtype=np.float64
    )
    return EmbeddingTable(list(words), matrix)


def table_for_corpus(rng: random.Random, corpus: LabeledCorpus, coverage: float = 0.8) -> EmbeddingTable:
    """Random table covering the label names and most of the corpus vocabulary."""
    words = [li.name for li in corpus.label_set]
    for w in sorted(corpus.vocabulary):
        if rng.random() < coverage:
            words.append(w)
    return random_table(rng, words)
