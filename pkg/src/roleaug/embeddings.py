"""Static word-vector table: loading, cosine similarity, exact neighbor search.

The on-disk format is the plain-text interchange format: an optional header
line ``<count> <dim>`` followed by one line per word, the token and then
``dim`` space-separated decimal floats. Files ending in ``.gz`` are
decompressed transparently.
"""

from __future__ import annotations

import gzip
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import TokenKind, tokenize
from .errors import DataError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Neighbor:
    word: str
    score: float  # cosine similarity to the query vector


class EmbeddingTable:
    """Immutable word -> vector map with precomputed norms.

    Keys are case-folded; lookups case-fold the query. Zero-norm or
    non-finite vectors are rejected at construction.
    """

    def __init__(self, words: Sequence[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise DataError("embedding matrix shape does not match word list")
        if matrix.shape[0] == 0:
            raise DataError("embedding table is empty")
        if not np.all(np.isfinite(matrix)):
            raise DataError("embedding table contains non-finite values")
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(norms == 0.0):
            raise DataError("embedding table contains zero-norm vectors")
        index: dict[str, int] = {}
        for i, w in enumerate(words):
            if w in index:
                raise DataError(f"duplicate word {w!r} in embedding table")
            index[w] = i
        matrix.setflags(write=False)
        norms.setflags(write=False)
        self._words = tuple(words)
        self._index = index
        self._matrix = matrix
        self._norms = norms
        self.dim = int(matrix.shape[1])

    def __contains__(self, word: str) -> bool:
        return word.casefold() in self._index

    def __len__(self) -> int:
        return len(self._words)

    @property
    def words(self) -> tuple[str, ...]:
        return self._words

    def vector(self, word: str) -> np.ndarray:
        key = word.casefold()
        if key not in self._index:
            raise DataError(f"word {word!r} not in embedding table")
        return self._matrix[self._index[key]]

    def cosines(self, vec: np.ndarray) -> np.ndarray:
        """Cosine similarity of ``vec`` against every row, in row order."""
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DataError(f"expected vector of dimension {self.dim}, got shape {vec.shape}")
        vnorm = float(np.linalg.norm(vec))
        if vnorm == 0.0:
            raise DataError("zero-norm query vector")
        return (self._matrix @ vec) / (self._norms * vnorm)


def _open_text(path: Path):
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return path.open("r", encoding="utf-8")


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse a plain-text vector file into an EmbeddingTable.

    Words are case-folded; on duplicates the first entry wins. Zero-norm
    vectors are skipped with a warning; an inconsistent dimension is fatal
    and names the offending line.
    """
    path = Path(path)
    words: list[str] = []
    vectors: list[list[float]] = []
    seen: set[str] = set()
    dim: int | None = None

    with _open_text(path) as fp:
        first_data_seen = False
        for lineno, line in enumerate(fp, start=1):
            parts = line.split()
            if not parts:
                continue
            if not first_data_seen and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                except ValueError:
                    pass
                else:
                    dim = int(parts[1])  # header "<count> <dim>"
                    first_data_seen = True
                    continue
            first_data_seen = True
            word = parts[0].casefold()
            try:
                values = [float(x) for x in parts[1:]]
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: invalid float: {exc}") from exc
            if dim is None:
                if not values:
                    raise DataError(f"{path}: line {lineno}: no vector components")
                dim = len(values)
            if len(values) != dim:
                raise DataError(
                    f"{path}: line {lineno}: expected {dim} components, got {len(values)}"
                )
            if word in seen:
                continue  # first entry wins
            if math.sqrt(math.fsum(v * v for v in values)) == 0.0:
                log.warning("%s: line %d: skipping zero-norm vector for %r", path, lineno, word)
                continue
            seen.add(word)
            words.append(word)
            vectors.append(values)

    if not words:
        raise DataError(f"{path}: no usable vectors")
    return EmbeddingTable(words, np.array(vectors, dtype=np.float64))


def cosine_similarity(u: Iterable[float], v: Iterable[float]) -> float:
    """(u . v) / (|u| |v|); both vectors must be same-dimension and nonzero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DataError("cosine similarity undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


def label_vector(description: str, table: EmbeddingTable) -> np.ndarray:
    """Mean vector of the description's in-vocabulary words.

    Words absent from the table are skipped; if none remain, that is an error.
    """
    words = [t.normalized for t in tokenize(description) if t.kind is TokenKind.WORD]
    if not words:
        raise DataError(f"label description {description!r} has no word tokens")
    rows = [table.vector(w) for w in words if w in table]
    if not rows:
        raise DataError(f"no word of label description {description!r} is in the embedding table")
    return np.mean(rows, axis=0)


def nearest_neighbors(word: str, k: int, table: EmbeddingTable) -> list[Neighbor]:
    """Exact top-k neighbors by cosine similarity, self excluded.

    Full scan over the table; descending score, ties broken by lexicographic
    word order.
    """
    if k < 0:
        raise DataError(f"k must be non-negative, got {k}")
    key = word.casefold()
    qvec = table.vector(key)  # raises on OOV
    if k == 0:
        return []
    sims = table.cosines(qvec)
    order = sorted(
        (i for i, w in enumerate(table.words) if w != key),
        key=lambda i: (-sims[i], table.words[i]),
    )
    return [Neighbor(word=table.words[i], score=float(sims[i])) for i in order[:k]]
