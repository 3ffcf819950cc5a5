"""Access to the bundled 2-class mini dataset (50 train / 200 test docs).

The dataset is synthetic word salad with a controlled structure that makes
role recognition meaningful at desk scale; see tools/gen_mini_dataset.py in
the repository for how it is produced.
"""

from __future__ import annotations

from importlib.resources import as_file, files
from pathlib import Path

from .corpus import LabeledCorpus, load_corpus
from .embeddings import EmbeddingTable, load_embeddings


def mini_dataset_dir() -> Path:
    """Directory holding the bundled data files (regular-directory installs)."""
    with as_file(files("roleaug") / "data") as path:
        return Path(path)


def load_mini_dataset() -> tuple[LabeledCorpus, LabeledCorpus, EmbeddingTable]:
    """(train corpus, test corpus, embedding table) of the bundled mini dataset."""
    base = files("roleaug") / "data"
    with as_file(base / "mini_train.jsonl") as p:
        train = load_corpus(p)
    with as_file(base / "mini_test.jsonl") as p:
        test = load_corpus(p)
    with as_file(base / "mini_vectors.txt") as p:
        table = load_embeddings(p)
    return train, test, table
