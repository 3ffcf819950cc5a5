#!/usr/bin/env python3
"""Freeze golden outputs for the fixture corpus into tests/golden/.

Run from the repo root after any intentional behavior change, inspect the
diff by hand, and commit. The golden tests compare byte-for-byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from helpers import fixture_corpus, fixture_table  # noqa: E402

from roleaug.augment import ALL_OPS, AugmentConfig, apply_op  # noqa: E402
from roleaug.roles import (  # noqa: E402
    assign_corpus_roles,
    build_score_table,
    render_report_csv,
    role_report,
)

GOLDEN_DIR = ROOT / "tests" / "golden"

# settings shared with tests/test_acceptance.py
GOLDEN_CONFIG = dict(strength=0.2, neighbor_k=3, trivial_keep_prob=0.5, master_seed=7)
GOLDEN_DOC_ID = "0"


def op_outputs() -> list[dict]:
    corpus = fixture_corpus()
    table = fixture_table()
    scores = build_score_table(corpus, table)
    cfg = AugmentConfig(**GOLDEN_CONFIG)
    assignment = assign_corpus_roles(corpus, scores, cfg.strategy, cfg.criterion_mode)
    doc = next(d for d in corpus.documents if d.id == GOLDEN_DOC_ID)
    outputs = []
    for op in ALL_OPS:
        aug = apply_op(doc, assignment.by_doc[doc.id], cfg, op, table)
        outputs.append(
            {
                "op": op,
                "source_text": doc.raw_text,
                "new_text": aug.new_text,
                "seed": aug.seed,
                "edits": [[e.position, e.kind, e.old, e.new] for e in aug.edits],
                "warnings": list(aug.warnings),
            }
        )
    return outputs


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    corpus = fixture_corpus()
    table = fixture_table()
    scores = build_score_table(corpus, table)
    csv_text = render_report_csv(role_report(corpus, scores))
    (GOLDEN_DIR / "roles_report.csv").write_text(csv_text, encoding="utf-8")
    ops = op_outputs()
    (GOLDEN_DIR / "op_outputs.json").write_text(
        json.dumps(ops, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"wrote roles_report.csv and op_outputs.json to {GOLDEN_DIR}")
    for entry in ops:
        print(f"  {entry['op']}: {entry['new_text']!r} warnings={entry['warnings']}")


if __name__ == "__main__":
    main()
