"""Word-role recognition: scores, thresholds, and role assignment.

Every vocabulary word gets, per class, a statistical-correlation score
(weighted log-likelihood ratio over smoothed token frequencies) and a
semantic-similarity score (cosine between the word vector and the class
label vector). High/low cuts on the two axes split words into the four
roles:

    Gold    = high correlation, high similarity
    Venture = high correlation, low similarity
    Bonus   = low correlation,  high similarity
    Trivial = low correlation,  low similarity

The global strategy cuts at the upper/lower quartiles of each class's score
distribution (words between the quartiles stay unassigned); the local
strategy splits each document's own words at their median, so every scored
token gets a role.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .corpus import ClassCounts, Document, LabeledCorpus, TokenKind, class_stats
from .embeddings import EmbeddingTable, label_vector
from .errors import DataError


class Role(Enum):
    GOLD = "gold"
    VENTURE = "venture"
    BONUS = "bonus"
    TRIVIAL = "trivial"
    UNASSIGNED = "unassigned"


CRITERION_MODES = ("both", "correlation_only", "similarity_only")


@dataclass(frozen=True)
class ScoreTable:
    """Per-class (wllr, similarity) scores for every vocabulary word.

    ``sim`` is None for words absent from the embedding table (OOV); those
    words are always classified low-similarity.
    """

    classes: tuple[str, ...]
    vocabulary: frozenset[str]
    wllr: Mapping[str, Mapping[str, float]]
    sim: Mapping[str, Mapping[str, float | None]]

    def wllr_of(self, word: str, label: str) -> float:
        return self.wllr[label][word]

    def sim_of(self, word: str, label: str) -> float | None:
        return self.sim[label][word]


@dataclass(frozen=True)
class Thresholds:
    wllr_high: float
    wllr_low: float
    sim_high: float
    sim_low: float
    strategy: str  # "global" | "local"

    def __post_init__(self):
        if self.wllr_low > self.wllr_high or self.sim_low > self.sim_high:
            raise DataError("low threshold above high threshold")


@dataclass(frozen=True)
class DocRoles:
    """Role (and wllr score, for fallbacks) of each token of one document."""

    doc_id: str
    label: str
    roles: tuple[Role, ...]
    wllr: tuple[float | None, ...]


@dataclass(frozen=True)
class RoleAssignment:
    criterion_mode: str
    strategy: str
    by_doc: Mapping[str, DocRoles]


def wllr_score(word: str, label: str, counts: ClassCounts) -> float:
    """Weighted log-likelihood ratio p(w|y) * ln(p(w|y) / p(w|not-y)).

    Probabilities are Laplace-smoothed token frequencies:
    (count + alpha) / (total + alpha * |V|), with the complement class
    pooling all other classes.
    """
    if word not in counts.vocabulary:
        raise DataError(f"word {word!r} not in vocabulary")
    if label not in counts.classes:
        raise DataError(f"unknown class {label!r}")
    a = counts.alpha
    v = counts.vocab_size
    n_y = counts.total(label)
    c_y = counts.count(word, label)
    n_rest = sum(counts.total(c) for c in counts.classes if c != label)
    c_rest = sum(counts.count(word, c) for c in counts.classes if c != label)
    p = (c_y + a) / (n_y + a * v)
    q = (c_rest + a) / (n_rest + a * v)
    return p * math.log(p / q)


def similarity_score(word: str, table: EmbeddingTable, label_vec: np.ndarray) -> float | None:
    """Cosine of the word vector and the label vector; None when the word is OOV."""
    if word not in table:
        return None
    vec = table.vector(word)
    vnorm = float(np.linalg.norm(vec))
    lnorm = float(np.linalg.norm(label_vec))
    if lnorm == 0.0:
        raise DataError("zero-norm label vector")
    return float(np.dot(vec, np.asarray(label_vec, dtype=np.float64)) / (vnorm * lnorm))


def class_label_vectors(corpus: LabeledCorpus, table: EmbeddingTable) -> dict[str, np.ndarray]:
    """Label vector per class, from the class description when set, else the name."""
    vecs: dict[str, np.ndarray] = {}
    for li in corpus.label_set:
        text = li.description or li.name
        try:
            vecs[li.id] = label_vector(text, table)
        except DataError as exc:
            raise DataError(f"class {li.id!r}: {exc}") from exc
    return vecs


def build_score_table(
    corpus: LabeledCorpus, table: EmbeddingTable, alpha: float = 1.0
) -> ScoreTable:
    """Score the full word x class cross product."""
    present = {d.label for d in corpus.documents}
    for li in corpus.label_set:
        if li.id not in present:
            raise DataError(f"class {li.id!r} has no documents")
    counts = class_stats(corpus, alpha)
    label_vecs = class_label_vectors(corpus, table)
    vocab = sorted(corpus.vocabulary)
    in_table = [w for w in vocab if w in table]
    rows = (
        np.stack([table.vector(w) for w in in_table]) if in_table else np.empty((0, table.dim))
    )
    row_norms = np.linalg.norm(rows, axis=1) if in_table else np.empty(0)

    wllr: dict[str, dict[str, float]] = {}
    sim: dict[str, dict[str, float | None]] = {}
    for c in corpus.labels():
        wllr[c] = {w: wllr_score(w, c, counts) for w in vocab}
        sims_c: dict[str, float | None] = dict.fromkeys(vocab)
        if in_table:
            lv = label_vecs[c]
            lnorm = float(np.linalg.norm(lv))
            values = (rows @ lv) / (row_norms * lnorm)
            sims_c.update(zip(in_table, (float(x) for x in values)))
        sim[c] = sims_c
    return ScoreTable(
        classes=corpus.labels(), vocabulary=frozenset(vocab), wllr=wllr, sim=sim
    )


def _nearest_rank(sorted_values: list[float], fraction: float) -> float:
    rank = math.ceil(fraction * len(sorted_values))
    return sorted_values[max(rank, 1) - 1]


def compute_thresholds_global(scores: ScoreTable, label: str) -> Thresholds:
    """Quartile cuts over the class's whole-vocabulary score distributions.

    OOV words are excluded from the similarity distribution; all words enter
    the wllr distribution.
    """
    if label not in scores.classes:
        raise DataError(f"unknown class {label!r}")
    wllr_vals = sorted(scores.wllr[label].values())
    sim_vals = sorted(v for v in scores.sim[label].values() if v is not None)
    if not wllr_vals:
        raise DataError("empty score list")
    if not sim_vals:
        raise DataError(f"class {label!r}: no vocabulary word has an embedding")
    return Thresholds(
        wllr_high=_nearest_rank(wllr_vals, 0.75),
        wllr_low=_nearest_rank(wllr_vals, 0.25),
        sim_high=_nearest_rank(sim_vals, 0.75),
        sim_low=_nearest_rank(sim_vals, 0.25),
        strategy="global",
    )


def _median(values: list[float]) -> float:
    values = sorted(values)
    m = len(values)
    mid = m // 2
    if m % 2 == 1:
        return values[mid]
    return (values[mid - 1] + values[mid]) / 2.0


def compute_thresholds_local(doc: Document, scores: ScoreTable) -> Thresholds:
    """Median split over the document's own distinct scored words.

    High and low thresholds coincide at the median, so classification is a
    two-way split with no middle band.
    """
    label = doc.label
    words = sorted(
        {
            t.normalized
            for t in doc.tokens
            if t.kind is TokenKind.WORD and t.normalized in scores.vocabulary
        }
    )
    if not words:
        raise DataError(f"document {doc.id!r}: no scorable tokens")
    wllr_med = _median([scores.wllr[label][w] for w in words])
    sims = [scores.sim[label][w] for w in words if scores.sim[label][w] is not None]
    # with every word OOV nothing can classify high; the OOV rule already forces low
    sim_med = _median(sims) if sims else math.inf
    return Thresholds(
        wllr_high=wllr_med, wllr_low=wllr_med, sim_high=sim_med, sim_low=sim_med, strategy="local"
    )


_HIGH, _LOW, _MID = 1, -1, 0


def _band(score: float, high: float, low: float) -> int:
    # the high test wins on degenerate high == low ties
    if score >= high:
        return _HIGH
    if score <= low:
        return _LOW
    return _MID


def classify_word(
    wllr_value: float,
    sim_value: float | None,
    thresholds: Thresholds,
    mode: str = "both",
) -> Role:
    """Map one word's scores to a role under the given thresholds.

    ``correlation_only`` treats every word as high-similarity (so only the
    wllr axis separates roles); ``similarity_only`` symmetric.
    """
    if mode not in CRITERION_MODES:
        raise DataError(f"unknown criterion mode {mode!r}")
    if mode == "similarity_only":
        cor = _HIGH
    else:
        cor = _band(wllr_value, thresholds.wllr_high, thresholds.wllr_low)
    if mode == "correlation_only":
        sem = _HIGH
    elif sim_value is None:
        sem = _LOW
    else:
        sem = _band(sim_value, thresholds.sim_high, thresholds.sim_low)
    if cor == _MID or sem == _MID:
        return Role.UNASSIGNED
    if cor == _HIGH:
        return Role.GOLD if sem == _HIGH else Role.VENTURE
    return Role.BONUS if sem == _HIGH else Role.TRIVIAL


def assign_roles(
    doc: Document, scores: ScoreTable, thresholds: Thresholds, mode: str = "both"
) -> DocRoles:
    """Assign one role per token; punctuation, numerics, and unscored words stay unassigned."""
    roles: list[Role] = []
    wllrs: list[float | None] = []
    for tok in doc.tokens:
        if tok.kind is not TokenKind.WORD or tok.normalized not in scores.vocabulary:
            roles.append(Role.UNASSIGNED)
            wllrs.append(None)
            continue
        w = scores.wllr[doc.label][tok.normalized]
        s = scores.sim[doc.label][tok.normalized]
        roles.append(classify_word(w, s, thresholds, mode))
        wllrs.append(w)
    return DocRoles(doc_id=doc.id, label=doc.label, roles=tuple(roles), wllr=tuple(wllrs))


def assign_corpus_roles(
    corpus: LabeledCorpus,
    scores: ScoreTable,
    strategy: str = "global",
    mode: str = "both",
) -> RoleAssignment:
    """Assign roles to every document under the chosen threshold strategy."""
    if strategy not in ("global", "local"):
        raise DataError(f"unknown strategy {strategy!r}")
    by_doc: dict[str, DocRoles] = {}
    if strategy == "global":
        per_class = {c: compute_thresholds_global(scores, c) for c in corpus.labels()}
        for doc in corpus.documents:
            by_doc[doc.id] = assign_roles(doc, scores, per_class[doc.label], mode)
    else:
        for doc in corpus.documents:
            th = compute_thresholds_local(doc, scores)
            by_doc[doc.id] = assign_roles(doc, scores, th, mode)
    return RoleAssignment(criterion_mode=mode, strategy=strategy, by_doc=by_doc)


# ---------------------------------------------------------------------------
# vocabulary-level role report

REPORT_ROLE_ORDER = (Role.GOLD, Role.VENTURE, Role.BONUS, Role.TRIVIAL)


def role_report(
    corpus: LabeledCorpus,
    scores: ScoreTable,
    thresholds: Mapping[str, Thresholds] | None = None,
) -> dict[str, dict[Role, list[tuple[str, float, float | None]]]]:
    """Bucket every vocabulary word into its role, per class, under global cuts.

    Gold and Venture lists are sorted by descending wllr, Bonus by descending
    similarity, Trivial by ascending wllr; ties fall back to word order.
    """
    if thresholds is None:
        thresholds = {c: compute_thresholds_global(scores, c) for c in scores.classes}
    report: dict[str, dict[Role, list[tuple[str, float, float | None]]]] = {}
    for c in scores.classes:
        buckets: dict[Role, list[tuple[str, float, float | None]]] = {
            r: [] for r in REPORT_ROLE_ORDER
        }
        for w in sorted(scores.vocabulary):
            role = classify_word(scores.wllr[c][w], scores.sim[c][w], thresholds[c])
            if role is not Role.UNASSIGNED:
                buckets[role].append((w, scores.wllr[c][w], scores.sim[c][w]))
        buckets[Role.GOLD].sort(key=lambda e: (-e[1], e[0]))
        buckets[Role.VENTURE].sort(key=lambda e: (-e[1], e[0]))
        buckets[Role.BONUS].sort(key=lambda e: (-(e[2] if e[2] is not None else -math.inf), e[0]))
        buckets[Role.TRIVIAL].sort(key=lambda e: (e[1], e[0]))
        report[c] = buckets
    return report


def render_report_csv(report: Mapping[str, Mapping[Role, list]]) -> str:
    """CSV rows (class, role, word, wllr, sim); sim empty for OOV words."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["class", "role", "word", "wllr", "sim"])
    for c in report:
        for role in REPORT_ROLE_ORDER:
            for word, wllr_v, sim_v in report[c][role]:
                writer.writerow(
                    [c, role.value, word, f"{wllr_v:.9f}", "" if sim_v is None else f"{sim_v:.9f}"]
                )
    return buf.getvalue()


def render_report_text(report: Mapping[str, Mapping[Role, list]], top_n: int = 8) -> str:
    """Compact per-class listing of the strongest words in each role."""
    lines: list[str] = []
    for c in report:
        lines.append(f"category: {c}")
        for role in REPORT_ROLE_ORDER:
            entries = report[c][role]
            shown = ", ".join(f'"{w}"' for w, _, _ in entries[:top_n])
            suffix = ", ..." if len(entries) > top_n else ""
            lines.append(f"  {role.value.capitalize() + ':':<9}[{shown}{suffix}]")
        lines.append("")
    return "\n".join(lines)
