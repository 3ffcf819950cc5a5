"""Command-line front end: ``roleaug roles|augment|eval``.

Configuration precedence is CLI flags over config-file entries over
defaults. The config file is a flat ``key = value`` text format using the
long flag names with underscores (see README). Every run writes a
``manifest.json`` into the output directory with the fully resolved
configuration, enough to reproduce the outputs byte for byte.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from collections import Counter
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .augment import (
    ALL_OPS,
    DEFAULT_OPS,
    STRENGTH_GRID,
    AugmentConfig,
    augment_corpus,
    write_augmented_jsonl,
)
from .corpus import load_corpus
from .embeddings import load_embeddings
from .errors import ConfigError, DataError
from .evalkit import run_experiment
from .roles import (
    assign_corpus_roles,
    build_score_table,
    compute_thresholds_global,
    render_report_csv,
    render_report_text,
    role_report,
)

EMBEDDINGS_ENV = "ROLEAUG_EMBEDDINGS"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems must exit 1, not argparse's 2
        raise UsageError(message)


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def _parse_ops(text: str) -> tuple[str, ...]:
    ops = tuple(part.strip() for part in text.split(",") if part.strip())
    for op in ops:
        if op not in ALL_OPS:
            raise UsageError(f"unknown operation {op!r} (choose from {', '.join(ALL_OPS)})")
    if not ops:
        raise UsageError("operation list is empty")
    return ops


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers: {exc}") from exc


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"expected comma-separated floats: {exc}") from exc


def _parse_label_desc(entries) -> dict[str, str]:
    """class=description pairs, from repeated flags or a ;-separated string."""
    if isinstance(entries, str):
        entries = [part for part in entries.split(";") if part.strip()]
    out: dict[str, str] = {}
    for entry in entries:
        if "=" not in entry:
            raise UsageError(f"label description {entry!r} is not of the form class=text")
        key, _, value = entry.partition("=")
        out[key.strip()] = value.strip()
    return out


@dataclass
class RunConfig:
    input: str | None = None
    format: str = "jsonl"
    text_field: str = "text"
    label_field: str = "label"
    embeddings: str | None = None
    label_desc: dict[str, str] | None = None
    strategy: str = "global"
    criterion_mode: str = "both"
    alpha: float = 1.0
    beta: float = 1.0
    strength: float = 0.10
    keep_prob: float = 0.5
    neighbor_k: int = 5
    copies: int = 1
    ops: tuple[str, ...] = DEFAULT_OPS
    seed: int = 0
    workers: int = 1
    outdir: str = "."
    include_originals: bool = False
    top_n: int = 8
    test: str | None = None
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    strengths: tuple[float, ...] = STRENGTH_GRID
    configs: str = "default"


# config-file value parsers, keyed by RunConfig field name
_FILE_PARSERS: dict[str, Callable[[str], Any]] = {
    "input": str,
    "format": str,
    "text_field": str,
    "label_field": str,
    "embeddings": str,
    "label_desc": _parse_label_desc,
    "strategy": str,
    "criterion_mode": str,
    "alpha": float,
    "beta": float,
    "strength": float,
    "keep_prob": float,
    "neighbor_k": int,
    "copies": int,
    "ops": _parse_ops,
    "seed": int,
    "workers": int,
    "outdir": str,
    "include_originals": _parse_bool,
    "top_n": int,
    "test": str,
    "seeds": _parse_ints,
    "strengths": _parse_floats,
    "configs": str,
}


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parse the flat ``key = value`` config format (# starts a comment line)."""
    values: dict[str, Any] = {}
    with Path(path).open("r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}: line {lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _FILE_PARSERS:
                raise UsageError(f"{path}: line {lineno}: unknown key {key!r}")
            values[key] = _FILE_PARSERS[key](value.strip())
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over config-file entries over defaults."""
    file_values: dict[str, Any] = {}
    if getattr(args, "config", None):
        file_values = read_config_file(args.config)
    cfg = RunConfig()
    for f in fields(RunConfig):
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            setattr(cfg, f.name, cli_value)
        elif f.name in file_values:
            setattr(cfg, f.name, file_values[f.name])
    if cfg.embeddings is None:
        cfg.embeddings = os.environ.get(EMBEDDINGS_ENV) or None
    if cfg.label_desc is None:
        cfg.label_desc = {}
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            flag = "--" + name.replace("_", "-")
            raise UsageError(f"{flag} is required (flag, config file, or environment)")


def _augment_config(cfg: RunConfig, ops: tuple[str, ...] | None = None) -> AugmentConfig:
    try:
        return AugmentConfig(
            strength=cfg.strength,
            neighbor_k=cfg.neighbor_k,
            trivial_keep_prob=cfg.keep_prob,
            copies_per_op=cfg.copies,
            enabled_ops=ops or cfg.ops,
            master_seed=cfg.seed,
            strategy=cfg.strategy,
            criterion_mode=cfg.criterion_mode,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc


def _load_inputs(cfg: RunConfig):
    corpus = load_corpus(cfg.input, cfg.format, cfg.text_field, cfg.label_field)
    if cfg.label_desc:
        corpus = corpus.with_label_descriptions(cfg.label_desc)
    table = load_embeddings(cfg.embeddings)
    return corpus, table


def _write_manifest(cfg: RunConfig, command: str, outdir: Path) -> None:
    resolved = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
    manifest = {"command": command, "version": __version__, "config": resolved}
    with (outdir / "manifest.json").open("w", encoding="utf-8") as fp:
        json.dump(manifest, fp, indent=2, sort_keys=True, ensure_ascii=False, default=list)
        fp.write("\n")


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_roles(cfg: RunConfig) -> int:
    _require(cfg, "input", "embeddings")
    corpus, table = _load_inputs(cfg)
    scores = build_score_table(corpus, table, cfg.alpha)
    outdir = _outdir(cfg)

    thresholds = {c: compute_thresholds_global(scores, c) for c in scores.classes}
    report = role_report(corpus, scores, thresholds)
    (outdir / "roles.csv").write_text(render_report_csv(report), encoding="utf-8")
    (outdir / "roles.txt").write_text(
        render_report_text(report, cfg.top_n) + "\n", encoding="utf-8"
    )
    written = ["roles.csv", "roles.txt"]

    if cfg.strategy == "local":
        assignment = assign_corpus_roles(corpus, scores, "local", cfg.criterion_mode)
        with (outdir / "roles_by_doc.jsonl").open("w", encoding="utf-8") as fp:
            for doc in corpus.documents:
                droles = assignment.by_doc[doc.id]
                record = {
                    "id": doc.id,
                    "label": doc.label,
                    "tokens": [
                        [tok.surface, role.value] for tok, role in zip(doc.tokens, droles.roles)
                    ],
                }
                fp.write(json.dumps(record, ensure_ascii=False) + "\n")
        written.append("roles_by_doc.jsonl")

    _write_manifest(cfg, "roles", outdir)
    print(f"wrote {', '.join(written)} to {outdir}")
    return EXIT_OK


def cmd_augment(cfg: RunConfig) -> int:
    _require(cfg, "input", "embeddings")
    corpus, table = _load_inputs(cfg)
    scores = build_score_table(corpus, table, cfg.alpha)
    aug_cfg = _augment_config(cfg)
    augmented = augment_corpus(corpus, scores, aug_cfg, table, workers=cfg.workers)
    outdir = _outdir(cfg)
    out_path = outdir / "augmented.jsonl"
    with out_path.open("w", encoding="utf-8") as fp:
        lines = write_augmented_jsonl(
            augmented, fp, corpus=corpus, include_originals=cfg.include_originals
        )
    _write_manifest(cfg, "augment", outdir)
    per_op = Counter(aug.op for aug in augmented)
    print(f"wrote {lines} lines ({len(augmented)} augmented samples) to {out_path}")
    for op in aug_cfg.enabled_ops:
        print(f"  {op}: {per_op.get(op, 0)}")
    return EXIT_OK


def _eval_configs(cfg: RunConfig) -> list[AugmentConfig]:
    choice = cfg.configs.strip()
    if choice == "none":
        return []
    ops = DEFAULT_OPS if choice == "default" else _parse_ops(choice)
    base = _augment_config(cfg, ops=ops)
    try:
        return [dataclasses.replace(base, strength=p) for p in cfg.strengths]
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc


def cmd_eval(cfg: RunConfig) -> int:
    _require(cfg, "input", "test")
    configs = _eval_configs(cfg)
    train = load_corpus(cfg.input, cfg.format, cfg.text_field, cfg.label_field)
    if cfg.label_desc:
        train = train.with_label_descriptions(cfg.label_desc)
    test = load_corpus(cfg.test, cfg.format, cfg.text_field, cfg.label_field)
    table = None
    if configs:
        _require(cfg, "embeddings")
        table = load_embeddings(cfg.embeddings)
    report = run_experiment(
        train, test, configs, cfg.seeds, table,
        alpha=cfg.alpha, beta=cfg.beta, workers=cfg.workers,
    )
    outdir = _outdir(cfg)
    (outdir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    _write_manifest(cfg, "eval", outdir)
    print(report.summary_text())
    print(f"wrote report.csv to {outdir}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="roleaug", description=__doc__)
    parser.add_argument("--version", action="version", version=f"roleaug {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--input", help="labeled corpus file (JSONL or CSV)")
        p.add_argument("--format", choices=["jsonl", "csv"], help="corpus file format (default jsonl)")
        p.add_argument("--text-field", dest="text_field", help="text field/column name (default text)")
        p.add_argument("--label-field", dest="label_field", help="label field/column name (default label)")
        p.add_argument(
            "--embeddings",
            help=f"word-vector file; defaults to ${EMBEDDINGS_ENV} when set",
        )
        p.add_argument(
            "--label-desc",
            dest="label_desc",
            action="append",
            metavar="CLASS=TEXT",
            help="per-class description used for the label vector (repeatable)",
        )
        p.add_argument("--strategy", choices=["global", "local"], help="threshold strategy (default global)")
        p.add_argument(
            "--criterion-mode",
            dest="criterion_mode",
            choices=["both", "correlation_only", "similarity_only"],
            help="which scoring axes drive role assignment (default both)",
        )
        p.add_argument("--alpha", type=float, help="smoothing for correlation scores (default 1.0)")
        p.add_argument("--seed", type=int, help="master random seed (default 0)")
        p.add_argument("--workers", type=int, help="parallel workers; output is identical for any count")
        p.add_argument("--outdir", help="output directory (default .)")

    p_roles = sub.add_parser("roles", help="write the per-class word-role report")
    add_common(p_roles)
    p_roles.add_argument("--top-n", dest="top_n", type=int, help="words per role in the text report")

    p_aug = sub.add_parser("augment", help="write augmented samples as JSONL")
    add_common(p_aug)
    p_aug.add_argument("-p", "--strength", type=float, help="augmentation strength in (0,1] (default 0.1)")
    p_aug.add_argument("--neighbor-k", dest="neighbor_k", type=int, help="synonym candidates per word (default 5)")
    p_aug.add_argument("--keep-prob", dest="keep_prob", type=float, help="retention probability for filler (default 0.5)")
    p_aug.add_argument("--copies", type=int, help="copies per operation per document (default 1)")
    p_aug.add_argument("--ops", type=_parse_ops, help="comma-separated operation list")
    p_aug.add_argument(
        "--include-originals",
        dest="include_originals",
        action="store_const",
        const=True,
        help="interleave source documents with op=original",
    )

    p_eval = sub.add_parser("eval", help="compare augmented vs non-augmented training")
    add_common(p_eval)
    p_eval.add_argument("--test", help="held-out test corpus file")
    p_eval.add_argument("--beta", type=float, help="classifier smoothing (default 1.0)")
    p_eval.add_argument("--seeds", type=_parse_ints, help="comma-separated seeds (default 1,2,3,4,5)")
    p_eval.add_argument("--strengths", type=_parse_floats, help="strength grid (default 0.05,0.1,0.2)")
    p_eval.add_argument(
        "--configs",
        help="'default' (all selective ops), 'none' (baseline only), or a comma-separated op list",
    )
    p_eval.add_argument("-p", "--strength", type=float, help=argparse.SUPPRESS)
    p_eval.add_argument("--neighbor-k", dest="neighbor_k", type=int, help=argparse.SUPPRESS)
    p_eval.add_argument("--keep-prob", dest="keep_prob", type=float, help=argparse.SUPPRESS)
    p_eval.add_argument("--copies", type=int, help=argparse.SUPPRESS)
    p_eval.add_argument("--ops", type=_parse_ops, help=argparse.SUPPRESS)
    return parser


_COMMANDS = {"roles": cmd_roles, "augment": cmd_augment, "eval": cmd_eval}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        print(f"error: file not found: {name}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
