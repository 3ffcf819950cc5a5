"""Labeled-corpus loading, tokenization, and per-class count statistics.

The tokenizer splits on whitespace and peels leading/trailing punctuation
runs off each chunk into separate punctuation tokens. Statistics are
computed over case-folded word tokens only; punctuation and numeric tokens
are excluded from counts and from the vocabulary.
"""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DataError

_CHUNK = re.compile(r"\S+")


class TokenKind(Enum):
    WORD = "word"
    PUNCTUATION = "punctuation"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    kind: TokenKind
    span: tuple[int, int]  # byte offsets into the raw text (UTF-8)


@dataclass(frozen=True)
class LabelInfo:
    id: str
    name: str
    description: str | None = None


@dataclass(frozen=True)
class Document:
    id: str
    raw_text: str
    label: str
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class LabeledCorpus:
    documents: tuple[Document, ...]
    label_set: tuple[LabelInfo, ...]
    vocabulary: frozenset[str]

    def labels(self) -> tuple[str, ...]:
        return tuple(li.id for li in self.label_set)

    def label_info(self, label: str) -> LabelInfo:
        for li in self.label_set:
            if li.id == label:
                return li
        raise DataError(f"unknown class {label!r}")

    def with_label_descriptions(self, descriptions: Mapping[str, str]) -> "LabeledCorpus":
        """Return a copy with per-class description strings attached."""
        new_set = tuple(
            replace(li, description=descriptions.get(li.id, li.description))
            for li in self.label_set
        )
        return replace(self, label_set=new_set)


def classify_kind(surface: str) -> TokenKind:
    """Kind of a token surface: punctuation iff no alphanumeric char, numeric iff all digits."""
    if not any(ch.isalnum() for ch in surface):
        return TokenKind.PUNCTUATION
    if surface.isdigit():
        return TokenKind.NUMERIC
    return TokenKind.WORD


def _make_token(surface: str, span: tuple[int, int]) -> Token:
    return Token(surface=surface, normalized=surface.casefold(), kind=classify_kind(surface), span=span)


def make_word_token(surface: str) -> Token:
    """Synthetic token for generated text; carries an empty span."""
    return _make_token(surface, (0, 0))


def tokenize(text: str) -> list[Token]:
    """Deterministic whitespace tokenizer with punctuation peeling.

    Each whitespace-delimited chunk yields its maximal leading and trailing
    non-alphanumeric runs as punctuation tokens; the remaining core is one
    word or numeric token. Spans are byte offsets into the UTF-8 encoding.
    """
    # byte offset of each char position
    boffs = [0] * (len(text) + 1)
    total = 0
    for i, ch in enumerate(text):
        boffs[i] = total
        total += len(ch.encode("utf-8"))
    boffs[len(text)] = total

    tokens: list[Token] = []

    def emit(cs: int, ce: int) -> None:
        tokens.append(_make_token(text[cs:ce], (boffs[cs], boffs[ce])))

    for m in _CHUNK.finditer(text):
        s, e = m.start(), m.end()
        core_start = s
        while core_start < e and not text[core_start].isalnum():
            core_start += 1
        if core_start == e:  # chunk is pure punctuation
            emit(s, e)
            continue
        core_end = e
        while core_end > core_start and not text[core_end - 1].isalnum():
            core_end -= 1
        if core_start > s:
            emit(s, core_start)
        emit(core_start, core_end)
        if core_end < e:
            emit(core_end, e)
    return tokens


def detokenize(tokens: Sequence[Token]) -> str:
    """Join tokens with single spaces, omitting the space before punctuation."""
    parts: list[str] = []
    for i, tok in enumerate(tokens):
        if i > 0 and tok.kind is not TokenKind.PUNCTUATION:
            parts.append(" ")
        parts.append(tok.surface)
    return "".join(parts)


def make_document(doc_id: str, raw_text: str, label: str) -> Document:
    return Document(id=doc_id, raw_text=raw_text, label=label, tokens=tuple(tokenize(raw_text)))


def build_corpus(
    records: Iterable[tuple[str, str]],
    ids: Sequence[str] | None = None,
    descriptions: Mapping[str, str] | None = None,
) -> LabeledCorpus:
    """Assemble a corpus from (text, label) pairs.

    Labels become the sorted distinct label set; at least two classes and one
    record are required.
    """
    records = list(records)
    if not records:
        raise DataError("no records")
    if ids is None:
        ids = [str(i) for i in range(len(records))]
    docs = tuple(make_document(i, text, label) for i, (text, label) in zip(ids, records))
    labels = sorted({d.label for d in docs})
    if len(labels) < 2:
        raise DataError("need at least 2 classes")
    descriptions = descriptions or {}
    label_set = tuple(LabelInfo(id=lab, name=lab, description=descriptions.get(lab)) for lab in labels)
    vocab = frozenset(
        t.normalized for d in docs for t in d.tokens if t.kind is TokenKind.WORD
    )
    return LabeledCorpus(documents=docs, label_set=label_set, vocabulary=vocab)


def _records_from_jsonl(path: Path, text_field: str, label_field: str) -> list[tuple[str, str]]:
    records = []
    with path.open("r", encoding="utf-8") as fp:
        row = 0
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"row {row} (line {lineno}): invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise DataError(f"row {row} (line {lineno}): expected a JSON object")
            for field in (text_field, label_field):
                if field not in obj or obj[field] is None:
                    raise DataError(f"row {row} (line {lineno}): missing field {field!r}")
            records.append((str(obj[text_field]), str(obj[label_field])))
            row += 1
    return records


def _records_from_csv(path: Path, text_field: str, label_field: str) -> list[tuple[str, str]]:
    records = []
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        header = reader.fieldnames or []
        for field in (text_field, label_field):
            if field not in header:
                raise DataError(f"missing column {field!r} in CSV header")
        for row, rec in enumerate(reader):
            text = rec.get(text_field)
            label = rec.get(label_field)
            if text is None or label is None:
                raise DataError(f"row {row}: missing field value")
            records.append((text, label))
    return records


def load_corpus(
    path: str | Path,
    format: str = "jsonl",
    text_field: str = "text",
    label_field: str = "label",
) -> LabeledCorpus:
    """Load a labeled corpus from a JSONL or CSV file.

    Document ids are the 0-based row index as a string; the label set is the
    sorted distinct labels found in the file.
    """
    path = Path(path)
    if format == "jsonl":
        records = _records_from_jsonl(path, text_field, label_field)
    elif format == "csv":
        records = _records_from_csv(path, text_field, label_field)
    else:
        raise DataError(f"unknown corpus format {format!r}")
    return build_corpus(records)


@dataclass(frozen=True)
class ClassCounts:
    """Word-token counts per class, the inputs to smoothed probability estimates."""

    classes: tuple[str, ...]
    totals: Mapping[str, int]               # N_y: word tokens in class y
    counts: Mapping[str, Mapping[str, int]] # class -> word -> occurrences
    vocabulary: frozenset[str]
    alpha: float

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def total(self, label: str) -> int:
        if label not in self.totals:
            raise DataError(f"unknown class {label!r}")
        return self.totals[label]

    def count(self, word: str, label: str) -> int:
        if label not in self.counts:
            raise DataError(f"unknown class {label!r}")
        return self.counts[label].get(word, 0)


def class_stats(corpus: LabeledCorpus, alpha: float = 1.0) -> ClassCounts:
    """Count word-kind token occurrences per class (punctuation/numeric excluded)."""
    if alpha <= 0:
        raise DataError(f"smoothing constant must be positive, got {alpha}")
    classes = corpus.labels()
    totals: dict[str, int] = {c: 0 for c in classes}
    counts: dict[str, Counter[str]] = {c: Counter() for c in classes}
    for doc in corpus.documents:
        words = [t.normalized for t in doc.tokens if t.kind is TokenKind.WORD]
        totals[doc.label] += len(words)
        counts[doc.label].update(words)
    return ClassCounts(
        classes=classes,
        totals=totals,
        counts={c: dict(counter) for c, counter in counts.items()},
        vocabulary=corpus.vocabulary,
        alpha=alpha,
    )
