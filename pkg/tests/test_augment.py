import json
import logging
import random
from io import StringIO

import pytest

from roleaug.augment import (
    ALL_OPS,
    DEFAULT_OPS,
    FLAG_NO_GOLD_FALLBACK,
    FLAG_SHORTFALL,
    FLAG_TOO_SHORT,
    OP_POSITIVE_SELECTION,
    AugmentConfig,
    apply_edits,
    apply_op,
    augment_corpus,
    derive_seed,
    edit_count,
    positive_selection,
    random_edit,
    selective_deletion,
    selective_insertion,
    selective_replacement,
    write_augmented_jsonl,
)
from roleaug.corpus import TokenKind, build_corpus, detokenize, make_document
from roleaug.embeddings import nearest_neighbors
from roleaug.errors import ConfigError, DataError
from roleaug.roles import DocRoles, Role, build_score_table

from helpers import fixture_corpus, fixture_table

G, V, B, T, U = Role.GOLD, Role.VENTURE, Role.BONUS, Role.TRIVIAL, Role.UNASSIGNED


def roled(doc, roles, wllr=None):
    wllr = wllr if wllr is not None else [None] * len(roles)
    return DocRoles(doc_id=doc.id, label=doc.label, roles=tuple(roles), wllr=tuple(wllr))


def word_surfaces(doc_or_tokens):
    tokens = getattr(doc_or_tokens, "tokens", doc_or_tokens)
    return [t.surface for t in tokens if t.kind is TokenKind.WORD]


def cfg(**kwargs):
    return AugmentConfig(**kwargs)


class TestEditCount:
    def test_spec_example(self):
        assert edit_count(0.10, 20) == 2

    def test_minimum_one(self):
        assert edit_count(0.05, 3) == 1

    def test_half_rounds_up(self):
        assert edit_count(0.05, 30) == 2  # 1.5 -> 2
        assert edit_count(0.25, 2) == 1  # 0.5 -> 1

    def test_full_strength(self):
        assert edit_count(1.0, 7) == 7


class TestDeriveSeed:
    def test_stable(self):
        assert derive_seed(1, "a", "op", 0) == derive_seed(1, "a", "op", 0)

    def test_distinguishes_inputs(self):
        base = derive_seed(1, "a", "op", 0)
        assert base != derive_seed(2, "a", "op", 0)
        assert base != derive_seed(1, "b", "op", 0)
        assert base != derive_seed(1, "a", "po", 0)
        assert base != derive_seed(1, "a", "op", 1)

    def test_64_bit_range(self):
        seed = derive_seed(99, "doc", "op", 3)
        assert 0 <= seed < 2**64


class TestAugmentConfig:
    def test_defaults(self):
        c = AugmentConfig()
        assert c.enabled_ops == DEFAULT_OPS
        assert c.strength == 0.10

    def test_validation(self):
        with pytest.raises(ConfigError):
            AugmentConfig(strength=0.0)
        with pytest.raises(ConfigError):
            AugmentConfig(strength=1.5)
        with pytest.raises(ConfigError):
            AugmentConfig(trivial_keep_prob=-0.1)
        with pytest.raises(ConfigError):
            AugmentConfig(enabled_ops=("bogus",))
        with pytest.raises(ConfigError):
            AugmentConfig(neighbor_k=0)

    def test_ops_canonical_order(self):
        c = AugmentConfig(enabled_ops=("positive_selection", "selective_replacement"))
        assert c.enabled_ops == ("selective_replacement", "positive_selection")


class TestSelectiveReplacement:
    def test_forced_single_candidate(self, table):
        doc = make_document("0", "circuit sensor monday", "tech")
        roles = roled(doc, [G, G, V])
        out = selective_replacement(doc, roles, cfg(strength=0.05, neighbor_k=3), table)
        assert len(out.edits) == 1
        assert out.edits[0].position == 2
        assert out.edits[0].old == "monday"
        neighbors = [n.word for n in nearest_neighbors("monday", 3, table)]
        assert out.edits[0].new in neighbors

    def test_token_count_and_gold_preserved(self, table):
        doc = make_document("0", "Circuit sensor voltage and monday.", "tech")
        roles = roled(doc, [G, G, G, U, V, U])
        out = selective_replacement(doc, roles, cfg(strength=0.2), table)
        new_tokens = apply_edits(doc.tokens, out.edits)
        assert len(new_tokens) == len(doc.tokens)
        assert len(out.edits) == 1
        assert out.edits[0].position in (3, 4)
        for pos in (0, 1, 2):
            assert new_tokens[pos].surface == doc.tokens[pos].surface

    def test_capitalization_inherited(self, table):
        doc = make_document("0", "Monday circuit", "tech")
        roles = roled(doc, [V, G])
        out = selective_replacement(doc, roles, cfg(strength=0.05), table)
        assert out.edits[0].new[0].isupper()

    def test_oov_skipped_and_backfilled(self, table):
        doc = make_document("0", "circuit mystery monday", "tech")
        roles = roled(doc, [G, T, V])
        out = selective_replacement(doc, roles, cfg(strength=0.5), table)
        # wanted n=2 but only "monday" has a vector
        assert len(out.edits) == 1
        assert out.edits[0].old == "monday"
        assert FLAG_SHORTFALL in out.warnings

    def test_no_word_tokens_is_error(self, table):
        doc = make_document("0", "...", "tech")
        with pytest.raises(DataError, match="nothing to augment"):
            selective_replacement(doc, roled(doc, [U]), cfg(), table)

    def test_new_text_matches_edit_replay(self, table):
        doc = make_document("0", "Circuit sensor voltage and monday.", "tech")
        roles = roled(doc, [G, G, G, U, V, U])
        out = selective_replacement(doc, roles, cfg(strength=0.4), table)
        assert detokenize(apply_edits(doc.tokens, out.edits)) == out.new_text


class TestSelectiveInsertion:
    def test_insertion_counts_and_subsequence(self, table):
        doc = make_document("0", "circuit sensor voltage monday", "tech")
        roles = roled(doc, [G, G, G, V])
        out = selective_insertion(doc, roles, cfg(strength=0.5, neighbor_k=4), table)
        new_tokens = apply_edits(doc.tokens, out.edits)
        assert len(word_surfaces(new_tokens)) == 4 + 2  # n = round(0.5*4) = 2
        originals = [t.surface for t in doc.tokens]
        it = iter(t.surface for t in new_tokens)
        assert all(s in it for s in originals)  # subsequence check

    def test_venture_quarantine(self, table):
        doc = make_document("0", "circuit monday ladder", "tech")
        roles = roled(doc, [G, V, V])
        allowed = {n.word for n in nearest_neighbors("circuit", 5, table)}
        for seed in range(20):
            out = selective_insertion(doc, roles, cfg(strength=0.3, master_seed=seed), table)
            for e in out.edits:
                assert e.new in allowed

    def test_all_candidates_oov_degrades(self, table):
        doc = make_document("0", "qqq zzz", "tech")
        roles = roled(doc, [T, T])
        out = selective_insertion(doc, roles, cfg(strength=0.5), table)
        assert out.edits == ()
        assert FLAG_SHORTFALL in out.warnings
        assert out.new_text == detokenize(doc.tokens)

    def test_replay(self, table):
        doc = make_document("0", "Circuit sensor voltage and monday.", "tech")
        roles = roled(doc, [G, G, G, T, V, U])
        out = selective_insertion(doc, roles, cfg(strength=0.4), table)
        assert detokenize(apply_edits(doc.tokens, out.edits)) == out.new_text


class TestSelectiveDeletion:
    def test_two_words_one_deleted(self):
        doc = make_document("0", "alpha beta", "tech")
        out = selective_deletion(doc, roled(doc, [T, T]), cfg(strength=0.3))
        assert len(word_surfaces(apply_edits(doc.tokens, out.edits))) == 1

    def test_single_word_unchanged(self):
        doc = make_document("0", "alpha", "tech")
        out = selective_deletion(doc, roled(doc, [T]), cfg())
        assert out.new_text == "alpha"
        assert FLAG_TOO_SHORT in out.warnings

    def test_gold_retained(self):
        doc = make_document("0", "circuit monday sensor ladder voltage", "tech")
        roles = roled(doc, [G, T, G, T, G])
        out = selective_deletion(doc, roles, cfg(strength=1.0))
        kept = word_surfaces(apply_edits(doc.tokens, out.edits))
        assert set(kept) >= {"circuit", "sensor", "voltage"}

    def test_cap_at_length_minus_one(self):
        doc = make_document("0", "a b c d e", "tech")
        out = selective_deletion(doc, roled(doc, [T] * 5), cfg(strength=1.0))
        assert len(word_surfaces(apply_edits(doc.tokens, out.edits))) == 1

    def test_all_gold_shortfall(self):
        doc = make_document("0", "circuit sensor", "tech")
        out = selective_deletion(doc, roled(doc, [G, G]), cfg())
        assert out.edits == ()
        assert FLAG_SHORTFALL in out.warnings

    def test_order_preserved(self):
        doc = make_document("0", "one two three four five six", "tech")
        out = selective_deletion(doc, roled(doc, [T] * 6), cfg(strength=0.5))
        kept = word_surfaces(apply_edits(doc.tokens, out.edits))
        originals = word_surfaces(doc.tokens)
        it = iter(originals)
        assert all(s in it for s in kept)


class TestPositiveSelection:
    def test_only_gold_doc_unchanged(self):
        doc = make_document("0", "circuit sensor voltage", "tech")
        out = positive_selection(doc, roled(doc, [G, G, G]), cfg())
        assert out.new_text == "circuit sensor voltage"
        assert out.edits == ()

    def test_q_zero_keeps_exactly_gold(self):
        doc = make_document("0", "circuit the monday sensor.", "tech")
        roles = roled(doc, [G, T, V, G, U])
        out = positive_selection(doc, roles, cfg(trivial_keep_prob=0.0))
        assert out.new_text == "circuit sensor"

    def test_q_one_keeps_trivial_and_punctuation(self):
        doc = make_document("0", "circuit the monday sensor.", "tech")
        roles = roled(doc, [G, T, V, G, U])
        out = positive_selection(doc, roles, cfg(trivial_keep_prob=1.0))
        assert out.new_text == "circuit the sensor."

    def test_gold_order_preserved(self):
        doc = make_document("0", "alpha beta gamma delta", "tech")
        roles = roled(doc, [G, T, G, T])
        for seed in range(10):
            out = positive_selection(doc, roles, cfg(master_seed=seed))
            kept = word_surfaces(apply_edits(doc.tokens, out.edits))
            gold_kept = [w for w in kept if w in ("alpha", "gamma")]
            assert gold_kept == ["alpha", "gamma"]

    def test_zero_gold_fallback_top_quarter_wllr(self):
        doc = make_document("0", "alpha beta gamma delta", "tech")
        roles = roled(doc, [T, B, V, T], wllr=[0.1, 0.4, 0.3, 0.2])
        out = positive_selection(doc, roles, cfg(trivial_keep_prob=0.0))
        assert out.new_text == "beta"  # ceil(4/4) = 1 highest-wllr token
        assert FLAG_NO_GOLD_FALLBACK in out.warnings

    def test_replay(self):
        doc = make_document("0", "circuit the monday sensor, voltage.", "tech")
        roles = roled(doc, [G, T, V, G, U, G, U])
        out = positive_selection(doc, roles, cfg(trivial_keep_prob=0.5, master_seed=3))
        assert detokenize(apply_edits(doc.tokens, out.edits)) == out.new_text


class TestRandomEdit:
    def test_swap_single_word_unchanged(self):
        doc = make_document("0", "alpha", "tech")
        out = random_edit(doc, cfg(), "swap")
        assert out.new_text == "alpha"
        assert FLAG_TOO_SHORT in out.warnings

    def test_swap_preserves_multiset(self):
        doc = make_document("0", "one two three four, five.", "tech")
        out = random_edit(doc, cfg(strength=0.5), "swap")
        new_tokens = apply_edits(doc.tokens, out.edits)
        assert sorted(word_surfaces(new_tokens)) == sorted(word_surfaces(doc.tokens))

    def test_delete_cap(self):
        doc = make_document("0", "a b c", "tech")
        out = random_edit(doc, cfg(strength=1.0), "delete")
        assert len(word_surfaces(apply_edits(doc.tokens, out.edits))) == 1

    def test_replace_uses_any_word(self, table):
        doc = make_document("0", "circuit team", "tech")
        positions = set()
        for seed in range(15):
            out = random_edit(doc, cfg(master_seed=seed), "replace", table)
            positions.add(out.edits[0].position)
        assert positions == {0, 1}

    def test_insert_needs_table(self):
        doc = make_document("0", "alpha beta", "tech")
        with pytest.raises(ConfigError):
            random_edit(doc, cfg(), "insert")

    def test_unknown_mode(self, table):
        doc = make_document("0", "alpha", "tech")
        with pytest.raises(ConfigError):
            random_edit(doc, cfg(), "scramble", table)


class TestAugmentCorpus:
    def test_default_plan_cardinality(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(corpus, scores, cfg(), table)
        assert len(out) == 4 * len(corpus.documents)

    def test_single_op_cardinality(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(corpus, scores, cfg(enabled_ops=(OP_POSITIVE_SELECTION,)), table)
        assert len(out) == len(corpus.documents)
        assert all(a.op == OP_POSITIVE_SELECTION for a in out)

    def test_labels_inherited(self, corpus, table):
        scores = build_score_table(corpus, table)
        by_id = {d.id: d.label for d in corpus.documents}
        for aug in augment_corpus(corpus, scores, cfg(), table):
            assert aug.label == by_id[aug.source_id]

    def test_deterministic_order_and_content(self, corpus, table):
        scores = build_score_table(corpus, table)
        first = augment_corpus(corpus, scores, cfg(master_seed=5), table)
        second = augment_corpus(corpus, scores, cfg(master_seed=5), table)
        assert first == second
        expected = [(d.id, op) for d in corpus.documents for op in DEFAULT_OPS]
        assert [(a.source_id, a.op) for a in first] == expected

    def test_worker_equivalence(self, corpus, table):
        scores = build_score_table(corpus, table)
        serial = augment_corpus(corpus, scores, cfg(master_seed=9), table, workers=1)
        parallel = augment_corpus(corpus, scores, cfg(master_seed=9), table, workers=2)
        assert serial == parallel

    def test_copies_per_op(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(
            corpus, scores, cfg(enabled_ops=(OP_POSITIVE_SELECTION,), copies_per_op=3), table
        )
        assert len(out) == 3 * len(corpus.documents)
        assert [a.copy_index for a in out[:3]] == [0, 1, 2]

    def test_failing_document_skipped_not_fatal(self, table, caplog):
        corpus = build_corpus([("...", "tech"), ("circuit sensor", "sport")])
        scores = build_score_table(corpus, table)
        with caplog.at_level(logging.ERROR):
            out = augment_corpus(corpus, scores, cfg(), table)
        # the punctuation-only doc only yields the positive-selection sample
        assert len(out) == 1 + 4
        assert sum("skipping" in rec.message for rec in caplog.records) == 3

    def test_local_strategy_runs(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(corpus, scores, cfg(strategy="local"), table)
        assert len(out) == 4 * len(corpus.documents)

    def test_local_strategy_skips_unscorable_document(self, table, caplog):
        corpus = build_corpus([("... !!!", "tech"), ("circuit sensor", "sport")])
        scores = build_score_table(corpus, table)
        with caplog.at_level(logging.ERROR):
            out = augment_corpus(corpus, scores, cfg(strategy="local"), table)
        assert {a.source_id for a in out} == {"1"}
        assert any("skipping document" in rec.message for rec in caplog.records)

    def test_missing_table_rejected(self, corpus, table):
        scores = build_score_table(corpus, table)
        with pytest.raises(ConfigError):
            augment_corpus(corpus, scores, cfg(), table=None)

    def test_all_ops_replayable(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(corpus, scores, cfg(enabled_ops=ALL_OPS, master_seed=2), table)
        docs = {d.id: d for d in corpus.documents}
        assert len(out) == 8 * len(corpus.documents)
        for aug in out:
            tokens = apply_edits(docs[aug.source_id].tokens, aug.edits)
            assert detokenize(tokens) == aug.new_text


class TestJsonlOutput:
    def test_schema(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(corpus, scores, cfg(), table)
        buf = StringIO()
        lines = write_augmented_jsonl(out, buf)
        assert lines == len(out)
        first = json.loads(buf.getvalue().splitlines()[0])
        assert list(first) == ["text", "label", "source_id", "op", "copy", "seed"]

    def test_include_originals_interleaves(self, corpus, table):
        scores = build_score_table(corpus, table)
        out = augment_corpus(corpus, scores, cfg(), table)
        buf = StringIO()
        lines = write_augmented_jsonl(out, buf, corpus=corpus, include_originals=True)
        assert lines == len(corpus.documents) + len(out)
        records = [json.loads(line) for line in buf.getvalue().splitlines()]
        assert records[0]["op"] == "original"
        assert records[1]["op"] == DEFAULT_OPS[0]
        # every block of five shares one source id
        for i in range(0, len(records), 5):
            assert len({r["source_id"] for r in records[i : i + 5]}) == 1


class TestOperationContractsRandomized:
    def test_contracts_hold_on_fixture_randomization(self, corpus, table):
        scores = build_score_table(corpus, table)
        rng = random.Random(71)
        from roleaug.roles import assign_corpus_roles

        for _ in range(60):
            seed = rng.randrange(2**32)
            p = rng.choice([0.05, 0.1, 0.2, 0.5])
            config = cfg(strength=p, master_seed=seed)
            assignment = assign_corpus_roles(corpus, scores, config.strategy, config.criterion_mode)
            doc = rng.choice(corpus.documents)
            droles = assignment.by_doc[doc.id]
            gold_surfaces = sorted(
                t.surface
                for t, r in zip(doc.tokens, droles.roles)
                if r is Role.GOLD
            )
            rep = selective_replacement(doc, droles, config, table)
            rep_tokens = apply_edits(doc.tokens, rep.edits)
            assert len(rep_tokens) == len(doc.tokens)
            kept_gold = sorted(
                t.surface for t, r in zip(rep_tokens, droles.roles) if r is Role.GOLD
            )
            assert kept_gold == gold_surfaces

            dele = selective_deletion(doc, droles, config)
            del_tokens = apply_edits(doc.tokens, dele.edits)
            deleted = [e for e in dele.edits if e.kind == "delete"]
            word_count = len(word_surfaces(doc.tokens))
            assert len(word_surfaces(del_tokens)) == word_count - len(deleted)
            remaining_gold = sorted(
                t.surface for t in del_tokens if t.surface in set(gold_surfaces)
            )
            assert len(remaining_gold) >= len(gold_surfaces)
