"""Role-aware text-editing operations and the corpus augmentation plan.

Each operation edits n = max(1, round(p * L)) of a document's L word tokens,
where p is the augmentation strength. Candidates are restricted by role:
replacement and deletion never touch Gold tokens, insertion never amplifies
Venture tokens, and positive selection keeps the Gold tokens (plus a random
sprinkle of Trivial words and punctuation) and drops everything else.
Random-edit baselines apply the same contracts with unrestricted candidates.

All randomness is drawn from a per-sample generator seeded by
(master_seed, source_id, op, copy_index), so output is reproducible
regardless of parallelism or iteration order.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .corpus import (
    Document,
    LabeledCorpus,
    Token,
    TokenKind,
    detokenize,
    make_word_token,
)
from .embeddings import EmbeddingTable, nearest_neighbors
from .errors import ConfigError, DataError
from .roles import DocRoles, Role, RoleAssignment, ScoreTable

log = logging.getLogger(__name__)

OP_SELECTIVE_REPLACEMENT = "selective_replacement"
OP_SELECTIVE_INSERTION = "selective_insertion"
OP_SELECTIVE_DELETION = "selective_deletion"
OP_POSITIVE_SELECTION = "positive_selection"
OP_RANDOM_REPLACE = "random_replace"
OP_RANDOM_INSERT = "random_insert"
OP_RANDOM_DELETE = "random_delete"
OP_RANDOM_SWAP = "random_swap"

ALL_OPS = (
    OP_SELECTIVE_REPLACEMENT,
    OP_SELECTIVE_INSERTION,
    OP_SELECTIVE_DELETION,
    OP_POSITIVE_SELECTION,
    OP_RANDOM_REPLACE,
    OP_RANDOM_INSERT,
    OP_RANDOM_DELETE,
    OP_RANDOM_SWAP,
)
DEFAULT_OPS = ALL_OPS[:4]

STRENGTH_GRID = (0.05, 0.10, 0.20)

# warning flags carried on AugmentedDoc
FLAG_SHORTFALL = "shortfall"          # fewer eligible tokens than requested edits
FLAG_TOO_SHORT = "too_short"          # document too short for the operation
FLAG_NO_GOLD_FALLBACK = "no_gold_fallback"  # positive selection kept top-wllr words instead


@dataclass(frozen=True)
class AugmentConfig:
    strength: float = 0.10
    neighbor_k: int = 5
    trivial_keep_prob: float = 0.5
    copies_per_op: int = 1
    enabled_ops: tuple[str, ...] = DEFAULT_OPS
    master_seed: int = 0
    strategy: str = "global"
    criterion_mode: str = "both"

    def __post_init__(self):
        if not 0.0 < self.strength <= 1.0:
            raise ConfigError(f"strength must be in (0, 1], got {self.strength}")
        if not 0.0 <= self.trivial_keep_prob <= 1.0:
            raise ConfigError(f"keep probability must be in [0, 1], got {self.trivial_keep_prob}")
        if self.neighbor_k < 1:
            raise ConfigError(f"neighbor_k must be positive, got {self.neighbor_k}")
        if self.copies_per_op < 1:
            raise ConfigError(f"copies_per_op must be positive, got {self.copies_per_op}")
        if not self.enabled_ops:
            raise ConfigError("enabled_ops must not be empty")
        for op in self.enabled_ops:
            if op not in ALL_OPS:
                raise ConfigError(f"unknown operation {op!r}")
        if self.strategy not in ("global", "local"):
            raise ConfigError(f"strategy must be 'global' or 'local', got {self.strategy!r}")
        if self.criterion_mode not in ("both", "correlation_only", "similarity_only"):
            raise ConfigError(f"unknown criterion mode {self.criterion_mode!r}")
        # canonical op order, enum order of ALL_OPS
        object.__setattr__(
            self,
            "enabled_ops",
            tuple(op for op in ALL_OPS if op in set(self.enabled_ops)),
        )


@dataclass(frozen=True)
class Edit:
    position: int
    kind: str  # "replace" | "insert" | "delete"
    old: str
    new: str


@dataclass(frozen=True)
class AugmentedDoc:
    new_text: str
    label: str
    source_id: str
    op: str
    copy_index: int
    seed: int
    edits: tuple[Edit, ...]
    warnings: tuple[str, ...] = ()


def derive_seed(master_seed: int, source_id: str, op: str, copy_index: int) -> int:
    """Stable 64-bit per-sample seed; independent of platform and process."""
    payload = f"{master_seed}|{source_id}|{op}|{copy_index}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def edit_count(strength: float, n_words: int) -> int:
    """n = max(1, round(p * L)) with half-up rounding."""
    return max(1, math.floor(strength * n_words + 0.5))


def apply_edits(tokens: Sequence[Token], edits: Iterable[Edit]) -> list[Token]:
    """Replay an edit log over the source tokens, in log order."""
    out = list(tokens)
    for e in edits:
        if e.kind == "replace":
            out[e.position] = make_word_token(e.new)
        elif e.kind == "insert":
            out.insert(e.position, make_word_token(e.new))
        elif e.kind == "delete":
            del out[e.position]
        else:
            raise DataError(f"unknown edit kind {e.kind!r}")
    return out


def _word_positions(tokens: Sequence[Token]) -> list[int]:
    return [i for i, t in enumerate(tokens) if t.kind is TokenKind.WORD]


def _match_capitalization(word: str, old_surface: str) -> str:
    if old_surface[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def _rng_for(doc: Document, cfg: AugmentConfig, op: str, copy_index: int) -> tuple[random.Random, int]:
    seed = derive_seed(cfg.master_seed, doc.id, op, copy_index)
    return random.Random(seed), seed


def _result(doc, op, copy_index, seed, tokens, edits, warnings) -> AugmentedDoc:
    return AugmentedDoc(
        new_text=detokenize(tokens),
        label=doc.label,
        source_id=doc.id,
        op=op,
        copy_index=copy_index,
        seed=seed,
        edits=tuple(edits),
        warnings=tuple(warnings),
    )


def _replace_op(
    doc: Document,
    pool: list[int],
    cfg: AugmentConfig,
    table: EmbeddingTable,
    op: str,
    copy_index: int,
) -> AugmentedDoc:
    words = _word_positions(doc.tokens)
    if not words:
        raise DataError(f"document {doc.id!r}: nothing to augment")
    rng, seed = _rng_for(doc, cfg, op, copy_index)
    n = edit_count(cfg.strength, len(words))
    # tokens without a vector have no neighbors; they are skipped up front,
    # which backfills their slots from the rest of the pool
    usable = [i for i in pool if doc.tokens[i].normalized in table] if len(table) > 1 else []
    n_eff = min(n, len(usable))
    warnings = [FLAG_SHORTFALL] if n_eff < n else []
    chosen = sorted(rng.sample(usable, n_eff))
    out = list(doc.tokens)
    edits: list[Edit] = []
    for i in chosen:
        neighbors = nearest_neighbors(doc.tokens[i].normalized, cfg.neighbor_k, table)
        new_word = rng.choice(neighbors).word
        surface = _match_capitalization(new_word, doc.tokens[i].surface)
        out[i] = make_word_token(surface)
        edits.append(Edit(position=i, kind="replace", old=doc.tokens[i].surface, new=surface))
    return _result(doc, op, copy_index, seed, out, edits, warnings)


def _insert_op(
    doc: Document,
    pool: list[int],
    cfg: AugmentConfig,
    table: EmbeddingTable,
    op: str,
    copy_index: int,
) -> AugmentedDoc:
    words = _word_positions(doc.tokens)
    if not words:
        raise DataError(f"document {doc.id!r}: nothing to augment")
    rng, seed = _rng_for(doc, cfg, op, copy_index)
    n = edit_count(cfg.strength, len(words))
    usable = [i for i in pool if doc.tokens[i].normalized in table] if len(table) > 1 else []
    n_eff = min(n, len(usable))
    warnings = [FLAG_SHORTFALL] if n_eff < n else []
    sources = sorted(rng.sample(usable, n_eff))
    out = list(doc.tokens)
    edits: list[Edit] = []
    for i in sources:
        neighbors = nearest_neighbors(doc.tokens[i].normalized, cfg.neighbor_k, table)
        new_word = rng.choice(neighbors).word
        gap = rng.randrange(len(out) + 1)
        out.insert(gap, make_word_token(new_word))
        edits.append(Edit(position=gap, kind="insert", old="", new=new_word))
    return _result(doc, op, copy_index, seed, out, edits, warnings)


def _delete_op(
    doc: Document,
    pool: list[int],
    cfg: AugmentConfig,
    op: str,
    copy_index: int,
) -> AugmentedDoc:
    words = _word_positions(doc.tokens)
    if not words:
        raise DataError(f"document {doc.id!r}: nothing to augment")
    rng, seed = _rng_for(doc, cfg, op, copy_index)
    if len(words) == 1:
        return _result(doc, op, copy_index, seed, list(doc.tokens), [], [FLAG_TOO_SHORT])
    n = min(edit_count(cfg.strength, len(words)), len(words) - 1)
    n_eff = min(n, len(pool))
    warnings = [FLAG_SHORTFALL] if n_eff < n else []
    chosen = sorted(rng.sample(pool, n_eff), reverse=True)
    out = list(doc.tokens)
    edits: list[Edit] = []
    for i in chosen:  # descending, so positions stay valid during replay
        edits.append(Edit(position=i, kind="delete", old=doc.tokens[i].surface, new=""))
        del out[i]
    return _result(doc, op, copy_index, seed, out, edits, warnings)


def selective_replacement(
    doc: Document, roles: DocRoles, cfg: AugmentConfig, table: EmbeddingTable, copy_index: int = 0
) -> AugmentedDoc:
    """Replace n non-Gold word tokens with sampled top-k neighbors."""
    pool = [i for i in _word_positions(doc.tokens) if roles.roles[i] is not Role.GOLD]
    return _replace_op(doc, pool, cfg, table, OP_SELECTIVE_REPLACEMENT, copy_index)


def selective_insertion(
    doc: Document, roles: DocRoles, cfg: AugmentConfig, table: EmbeddingTable, copy_index: int = 0
) -> AugmentedDoc:
    """Insert neighbors of n non-Venture word tokens at random gaps."""
    pool = [i for i in _word_positions(doc.tokens) if roles.roles[i] is not Role.VENTURE]
    return _insert_op(doc, pool, cfg, table, OP_SELECTIVE_INSERTION, copy_index)


def selective_deletion(
    doc: Document, roles: DocRoles, cfg: AugmentConfig, copy_index: int = 0
) -> AugmentedDoc:
    """Delete n non-Gold word tokens, keeping at least one word token."""
    pool = [i for i in _word_positions(doc.tokens) if roles.roles[i] is not Role.GOLD]
    return _delete_op(doc, pool, cfg, OP_SELECTIVE_DELETION, copy_index)


def positive_selection(
    doc: Document, roles: DocRoles, cfg: AugmentConfig, copy_index: int = 0
) -> AugmentedDoc:
    """Keep the Gold tokens, plus Trivial words and punctuation with probability q.

    Documents without any Gold token fall back to keeping their top quarter
    of word tokens by wllr score, flagged.
    """
    rng, seed = _rng_for(doc, cfg, OP_POSITIVE_SELECTION, copy_index)
    words = _word_positions(doc.tokens)
    warnings: list[str] = []
    gold = [i for i in words if roles.roles[i] is Role.GOLD]
    if gold:
        keep = set(gold)
    else:
        warnings.append(FLAG_NO_GOLD_FALLBACK)
        take = math.ceil(len(words) / 4)
        ranked = sorted(
            words,
            key=lambda i: (-(roles.wllr[i] if roles.wllr[i] is not None else -math.inf), i),
        )
        keep = set(ranked[:take])
    q = cfg.trivial_keep_prob
    for i, tok in enumerate(doc.tokens):
        if i in keep:
            continue
        if tok.kind is TokenKind.PUNCTUATION or roles.roles[i] is Role.TRIVIAL:
            if rng.random() < q:
                keep.add(i)
    out: list[Token] = []
    edits: list[Edit] = []
    for i in range(len(doc.tokens) - 1, -1, -1):  # deletions logged descending
        if i not in keep:
            edits.append(Edit(position=i, kind="delete", old=doc.tokens[i].surface, new=""))
    for i, tok in enumerate(doc.tokens):
        if i in keep:
            out.append(tok)
    return _result(doc, OP_POSITIVE_SELECTION, copy_index, seed, out, edits, warnings)


def random_edit(
    doc: Document,
    cfg: AugmentConfig,
    mode: str,
    table: EmbeddingTable | None = None,
    copy_index: int = 0,
) -> AugmentedDoc:
    """Non-selective baseline edits: candidates drawn uniformly from all word tokens."""
    words = _word_positions(doc.tokens)
    if mode == "replace":
        if table is None:
            raise ConfigError("random replace needs an embedding table")
        return _replace_op(doc, words, cfg, table, OP_RANDOM_REPLACE, copy_index)
    if mode == "insert":
        if table is None:
            raise ConfigError("random insert needs an embedding table")
        return _insert_op(doc, words, cfg, table, OP_RANDOM_INSERT, copy_index)
    if mode == "delete":
        return _delete_op(doc, words, cfg, OP_RANDOM_DELETE, copy_index)
    if mode == "swap":
        return _swap_op(doc, cfg, copy_index)
    raise ConfigError(f"unknown random edit mode {mode!r}")


def _swap_op(doc: Document, cfg: AugmentConfig, copy_index: int) -> AugmentedDoc:
    words = _word_positions(doc.tokens)
    if not words:
        raise DataError(f"document {doc.id!r}: nothing to augment")
    rng, seed = _rng_for(doc, cfg, OP_RANDOM_SWAP, copy_index)
    if len(words) < 2:
        return _result(doc, OP_RANDOM_SWAP, copy_index, seed, list(doc.tokens), [], [FLAG_TOO_SHORT])
    n = edit_count(cfg.strength, len(words))
    out = list(doc.tokens)
    edits: list[Edit] = []
    for _ in range(n):
        i, j = rng.sample(words, 2)
        si, sj = out[i].surface, out[j].surface
        out[i] = make_word_token(sj)
        out[j] = make_word_token(si)
        edits.append(Edit(position=i, kind="replace", old=si, new=sj))
        edits.append(Edit(position=j, kind="replace", old=sj, new=si))
    return _result(doc, OP_RANDOM_SWAP, copy_index, seed, out, edits, [])


def apply_op(
    doc: Document,
    roles: DocRoles,
    cfg: AugmentConfig,
    op: str,
    table: EmbeddingTable | None = None,
    copy_index: int = 0,
) -> AugmentedDoc:
    """Dispatch one named operation."""
    if op == OP_SELECTIVE_REPLACEMENT:
        return selective_replacement(doc, roles, cfg, table, copy_index)
    if op == OP_SELECTIVE_INSERTION:
        return selective_insertion(doc, roles, cfg, table, copy_index)
    if op == OP_SELECTIVE_DELETION:
        return selective_deletion(doc, roles, cfg, copy_index)
    if op == OP_POSITIVE_SELECTION:
        return positive_selection(doc, roles, cfg, copy_index)
    if op in (OP_RANDOM_REPLACE, OP_RANDOM_INSERT, OP_RANDOM_DELETE, OP_RANDOM_SWAP):
        return random_edit(doc, cfg, op.removeprefix("random_"), table, copy_index)
    raise ConfigError(f"unknown operation {op!r}")


def _augment_document(
    doc: Document,
    roles: DocRoles,
    cfg: AugmentConfig,
    table: EmbeddingTable | None,
) -> list[AugmentedDoc]:
    out: list[AugmentedDoc] = []
    for op in cfg.enabled_ops:
        for copy_index in range(cfg.copies_per_op):
            try:
                out.append(apply_op(doc, roles, cfg, op, table, copy_index))
            except DataError as exc:
                log.error("skipping %s on document %r: %s", op, doc.id, exc)
    return out


def _augment_task(args: tuple) -> list[AugmentedDoc]:
    return _augment_document(*args)


def _assign_roles_skipping_failures(corpus, scores, cfg) -> dict[str, DocRoles]:
    """Per-document role assignment; documents that cannot be scored are
    dropped with a logged error instead of failing the whole run."""
    from .roles import assign_roles, compute_thresholds_global, compute_thresholds_local

    per_class = None
    if cfg.strategy == "global":
        per_class = {c: compute_thresholds_global(scores, c) for c in scores.classes}
    by_doc: dict[str, DocRoles] = {}
    for doc in corpus.documents:
        try:
            thresholds = (
                per_class[doc.label]
                if per_class is not None
                else compute_thresholds_local(doc, scores)
            )
            by_doc[doc.id] = assign_roles(doc, scores, thresholds, cfg.criterion_mode)
        except DataError as exc:
            log.error("skipping document %r: %s", doc.id, exc)
    return by_doc


def augment_corpus(
    corpus: LabeledCorpus,
    scores: ScoreTable,
    cfg: AugmentConfig,
    table: EmbeddingTable | None = None,
    workers: int = 1,
    assignment: RoleAssignment | None = None,
) -> list[AugmentedDoc]:
    """Generate copies_per_op samples per enabled operation for every document.

    Output order is deterministic: corpus document order, then operation
    order, then copy index. A document that fails an operation is skipped for
    that sample with a logged error.
    """
    needs_table = any(
        op in (OP_SELECTIVE_REPLACEMENT, OP_SELECTIVE_INSERTION, OP_RANDOM_REPLACE, OP_RANDOM_INSERT)
        for op in cfg.enabled_ops
    )
    if needs_table and table is None:
        raise ConfigError("the enabled operations need an embedding table")
    if assignment is not None:
        by_doc = assignment.by_doc
    else:
        by_doc = _assign_roles_skipping_failures(corpus, scores, cfg)
    tasks = [
        (doc, by_doc[doc.id], cfg, table) for doc in corpus.documents if doc.id in by_doc
    ]
    results: list[list[AugmentedDoc]]
    if workers <= 1 or len(tasks) < 2:
        results = [_augment_task(t) for t in tasks]
    else:
        chunksize = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_augment_task, tasks, chunksize=chunksize))
    return [aug for per_doc in results for aug in per_doc]


def augmented_to_record(aug: AugmentedDoc) -> dict:
    return {
        "text": aug.new_text,
        "label": aug.label,
        "source_id": aug.source_id,
        "op": aug.op,
        "copy": aug.copy_index,
        "seed": aug.seed,
    }


def write_augmented_jsonl(
    augmented: Sequence[AugmentedDoc],
    fp: IO[str],
    corpus: LabeledCorpus | None = None,
    include_originals: bool = False,
) -> int:
    """Write augmented samples as JSONL; optionally interleave the originals.

    With ``include_originals`` each source document precedes its augmented
    copies with op "original". Returns the number of lines written.
    """
    lines = 0

    def emit(record: dict) -> None:
        nonlocal lines
        fp.write(json.dumps(record, ensure_ascii=False) + "\n")
        lines += 1

    if include_originals:
        if corpus is None:
            raise ConfigError("interleaving originals requires the source corpus")
        by_source: dict[str, list[AugmentedDoc]] = {}
        for aug in augmented:
            by_source.setdefault(aug.source_id, []).append(aug)
        for doc in corpus.documents:
            emit(
                {
                    "text": doc.raw_text,
                    "label": doc.label,
                    "source_id": doc.id,
                    "op": "original",
                    "copy": 0,
                    "seed": 0,
                }
            )
            for aug in by_source.get(doc.id, []):
                emit(augmented_to_record(aug))
    else:
        for aug in augmented:
            emit(augmented_to_record(aug))
    return lines


def config_label(cfg: AugmentConfig) -> str:
    """Compact human-readable identifier for report rows."""
    ops = "+".join(cfg.enabled_ops)
    return f"ops={ops}|p={cfg.strength:g}|strategy={cfg.strategy}|mode={cfg.criterion_mode}"


def replace_seed(cfg: AugmentConfig, seed: int) -> AugmentConfig:
    return dataclasses.replace(cfg, master_seed=seed)
