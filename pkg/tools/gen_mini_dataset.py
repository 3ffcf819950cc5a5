#!/usr/bin/env python3
"""Regenerate the bundled 2-class mini dataset (50 train / 200 test docs).

The corpus is synthetic word salad with a controlled statistical structure:
each class has strongly class-indicating words whose vectors sit near the
class label vector, spuriously co-occurring words whose train-set class
correlation breaks on the test split, rarely-seen semantically related
words, and shared filler. Embeddings are written alongside as a plain-text
vector file. Deterministic; run from the repo root:

    python tools/gen_mini_dataset.py
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

DIM = 16
OUT = Path(__file__).resolve().parent.parent / "src" / "roleaug" / "data"

GOLD = {
    "electronics": [
        "circuit", "voltage", "transistor", "resistor", "capacitor",
        "amplifier", "sensor", "battery", "diode", "signal",
    ],
    "sports": [
        "team", "game", "score", "player", "coach",
        "tournament", "league", "goal", "match", "championship",
    ],
}
BONUS = {
    "electronics": ["oscillator", "semiconductor", "microchip", "inductor", "transformer", "relay"],
    "sports": ["referee", "stadium", "athlete", "trophy", "halftime", "playoff"],
}
VENTURE = {
    "electronics": ["thursday", "borrowed", "kitchen", "umbrella", "grandfather", "curtain", "stapler", "vinegar"],
    "sports": ["tuesday", "ceiling", "envelope", "notebook", "whisper", "ladder", "pigeon", "basement"],
}
TRIVIAL = ["the", "a", "of", "and", "to", "in", "was", "is", "on", "it", "that", "with", "for", "as", "at"]

LABELS = ("electronics", "sports")


def unit(vec):
    norm = math.sqrt(sum(x * x for x in vec))
    return [x / norm for x in vec]


def build_vectors(rng: random.Random) -> dict[str, list[float]]:
    # class directions live in disjoint low dims; filler noise in the rest
    e_dir = unit([1.0, 0.9, 0.8, 0.7] + [0.0] * (DIM - 4))
    s_dir = unit([0.0] * 4 + [1.0, 0.9, 0.8, 0.7] + [0.0] * (DIM - 8))
    dirs = {"electronics": e_dir, "sports": s_dir}
    vectors: dict[str, list[float]] = {lab: list(dirs[lab]) for lab in LABELS}

    def near(direction, spread):
        return unit([d + rng.gauss(0.0, spread) for d in direction])

    def off(direction):
        # mildly anti-aligned with the class direction, noise elsewhere
        vec = [rng.gauss(0.0, 0.35) for _ in range(DIM)]
        vec = [v - 0.3 * d for v, d in zip(vec, direction)]
        return unit(vec)

    for lab in LABELS:
        for w in GOLD[lab]:
            vectors[w] = near(dirs[lab], 0.08)
        for w in BONUS[lab]:
            vectors[w] = near(dirs[lab], 0.10)
        for w in VENTURE[lab]:
            vectors[w] = off(dirs[lab])
    for w in TRIVIAL:
        vectors[w] = unit([rng.gauss(0.0, 0.3) for _ in range(DIM)])
    return vectors


def make_doc(rng, gold, venture, bonus, trivial, n_gold, n_vent, n_bonus, n_triv):
    words = (
        [rng.choice(gold) for _ in range(n_gold)]
        + [rng.choice(venture) for _ in range(n_vent)]
        + [rng.choice(bonus) for _ in range(n_bonus)]
        + [rng.choice(trivial) for _ in range(n_triv)]
    )
    rng.shuffle(words)
    words[0] = words[0].capitalize()
    if len(words) > 6 and rng.random() < 0.6:
        cut = rng.randrange(3, len(words) - 2)
        words[cut] = words[cut] + ","
    return " ".join(words) + "."


def main() -> None:
    rng = random.Random(20240811)
    vectors = build_vectors(rng)

    OUT.mkdir(parents=True, exist_ok=True)
    with (OUT / "mini_vectors.txt").open("w", encoding="utf-8") as fp:
        fp.write(f"{len(vectors)} {DIM}\n")
        for word, vec in vectors.items():
            fp.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")

    train = []
    for lab in LABELS:
        for _ in range(25):
            train.append(
                {
                    "text": make_doc(
                        rng, GOLD[lab], VENTURE[lab], BONUS[lab], TRIVIAL,
                        n_gold=rng.randint(3, 5),
                        n_vent=rng.randint(2, 4),
                        n_bonus=1 if rng.random() < 0.15 else 0,
                        n_triv=rng.randint(5, 8),
                    ),
                    "label": lab,
                }
            )
    rng.shuffle(train)

    venture_union = VENTURE["electronics"] + VENTURE["sports"]
    test = []
    for lab in LABELS:
        for _ in range(100):
            hard = rng.random() < 0.35
            test.append(
                {
                    "text": make_doc(
                        rng, GOLD[lab], venture_union, BONUS[lab], TRIVIAL,
                        n_gold=rng.randint(1, 2) if hard else rng.randint(2, 4),
                        n_vent=rng.randint(3, 5) if hard else rng.randint(2, 4),
                        n_bonus=rng.randint(1, 2),
                        n_triv=rng.randint(5, 8),
                    ),
                    "label": lab,
                }
            )
    rng.shuffle(test)

    for name, rows in (("mini_train.jsonl", train), ("mini_test.jsonl", test)):
        with (OUT / name).open("w", encoding="utf-8") as fp:
            for row in rows:
                fp.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {len(train)} train / {len(test)} test docs and {len(vectors)} vectors to {OUT}")


if __name__ == "__main__":
    main()
