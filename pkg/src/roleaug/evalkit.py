"""Desk-scale verification harness: multinomial naive Bayes plus an
experiment runner that compares augmented against non-augmented training.

The classifier is intentionally lightweight so the comparison runs in
seconds on a laptop; it is a direction check, not a benchmark.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .augment import AugmentConfig, augment_corpus, config_label, replace_seed
from .corpus import Document, LabeledCorpus, TokenKind, build_corpus, class_stats
from .embeddings import EmbeddingTable
from .errors import DataError
from .roles import ScoreTable, build_score_table

NON_AUG_LABEL = "non-aug"


def bow(doc: Document) -> Counter[str]:
    """Bag of normalized word tokens (punctuation/numeric excluded)."""
    return Counter(t.normalized for t in doc.tokens if t.kind is TokenKind.WORD)


@dataclass(frozen=True)
class NbModel:
    classes: tuple[str, ...]  # label-set order, also the tie-break order
    log_prior: Mapping[str, float]
    log_likelihood: Mapping[str, Mapping[str, float]]
    vocabulary: frozenset[str]
    beta: float


def train_nb(train: LabeledCorpus, beta: float = 1.0) -> NbModel:
    """Multinomial naive Bayes with Laplace smoothing beta."""
    doc_counts = Counter(d.label for d in train.documents)
    for c in train.labels():
        if doc_counts[c] == 0:
            raise DataError(f"class {c!r} has no documents")
    counts = class_stats(train, alpha=beta)
    total_docs = len(train.documents)
    v = counts.vocab_size
    log_prior = {c: math.log(doc_counts[c] / total_docs) for c in train.labels()}
    log_likelihood = {
        c: {
            w: math.log((counts.count(w, c) + beta) / (counts.total(c) + beta * v))
            for w in counts.vocabulary
        }
        for c in train.labels()
    }
    return NbModel(
        classes=train.labels(),
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        vocabulary=counts.vocabulary,
        beta=beta,
    )


def predict(model: NbModel, doc: Document) -> str:
    """Argmax class of log prior plus count-weighted log likelihoods.

    Unseen words are dropped; ties resolve to the earliest class in
    label-set order.
    """
    features = bow(doc)
    best_label = model.classes[0]
    best_score = -math.inf
    for c in model.classes:
        score = model.log_prior[c]
        lik = model.log_likelihood[c]
        for w, n in features.items():
            if w in model.vocabulary:
                score += n * lik[w]
        if score > best_score:
            best_score = score
            best_label = c
    return best_label


def evaluate(model: NbModel, test: LabeledCorpus) -> float:
    """Fraction of test documents predicted correctly."""
    if not test.documents:
        raise DataError("empty test set")
    correct = sum(1 for d in test.documents if predict(model, d) == d.label)
    return correct / len(test.documents)


@dataclass(frozen=True)
class ExperimentRow:
    config: str
    seed: int
    accuracy: float


@dataclass(frozen=True)
class ConfigSummary:
    config: str
    mean: float
    std: float
    seeds: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ExperimentRow, ...]
    summary: tuple[ConfigSummary, ...]

    def mean_accuracy(self, config: str) -> float:
        for s in self.summary:
            if s.config == config:
                return s.mean
        raise KeyError(config)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["config", "seed", "accuracy"])
        for row in self.rows:
            writer.writerow([row.config, row.seed, f"{row.accuracy:.6f}"])
        return buf.getvalue()

    def summary_text(self) -> str:
        width = max(len(s.config) for s in self.summary)
        lines = [f"{'config':<{width}}  mean_acc  std_acc  seeds"]
        for s in self.summary:
            seeds = ",".join(str(x) for x in s.seeds)
            lines.append(f"{s.config:<{width}}  {s.mean:8.4f}  {s.std:7.4f}  {seeds}")
        return "\n".join(lines)


def _merge_with_augmented(train: LabeledCorpus, augmented) -> LabeledCorpus:
    records = [(d.raw_text, d.label) for d in train.documents]
    ids = [d.id for d in train.documents]
    for aug in augmented:
        records.append((aug.new_text, aug.label))
        ids.append(f"{aug.source_id}::{aug.op}::{aug.copy_index}")
    return build_corpus(records, ids=ids)


def run_experiment(
    train: LabeledCorpus,
    test: LabeledCorpus,
    configs: Sequence[AugmentConfig],
    seeds: Sequence[int],
    table: EmbeddingTable | None = None,
    alpha: float = 1.0,
    beta: float = 1.0,
    workers: int = 1,
    scores: ScoreTable | None = None,
) -> ExperimentReport:
    """Accuracy of originals-plus-augmented training versus the non-aug baseline.

    For every config and seed the train set is augmented with that seed as
    master seed, a fresh classifier is fitted on originals plus augmented
    samples, and test accuracy recorded. The report always contains the
    non-aug row. Deterministic given (corpora, configs, seeds).
    """
    if not seeds:
        raise DataError("need at least one seed")
    if configs and table is None:
        raise DataError("augmentation configs need an embedding table")
    if configs and scores is None:
        scores = build_score_table(train, table, alpha)

    rows: list[ExperimentRow] = []
    order: list[str] = []
    baseline = evaluate(train_nb(train, beta), test)
    order.append(NON_AUG_LABEL)
    for seed in seeds:
        rows.append(ExperimentRow(config=NON_AUG_LABEL, seed=seed, accuracy=baseline))

    for cfg in configs:
        name = config_label(cfg)
        order.append(name)
        for seed in seeds:
            augmented = augment_corpus(
                train, scores, replace_seed(cfg, seed), table, workers=workers
            )
            merged = _merge_with_augmented(train, augmented)
            model = train_nb(merged, beta)
            rows.append(ExperimentRow(config=name, seed=seed, accuracy=evaluate(model, test)))

    summary = []
    for name in order:
        accs = [r.accuracy for r in rows if r.config == name]
        summary.append(
            ConfigSummary(
                config=name,
                mean=statistics.fmean(accs),
                std=statistics.pstdev(accs),
                seeds=tuple(seeds),
            )
        )
    return ExperimentReport(rows=tuple(rows), summary=tuple(summary))
