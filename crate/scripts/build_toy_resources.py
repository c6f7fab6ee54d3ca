#!/usr/bin/env python3
"""Builds the toy BPE tables shipped under crates/codemix/resources/toy.

Each table is trained on a lexicon word list: pairs are counted over the
words, the most frequent pair is merged (ties broken by the pair itself),
until the merge budget is spent or no pair occurs twice.
"""

import json
import string
import sys
from collections import Counter
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "crates" / "codemix" / "resources" / "toy"
BASE = string.ascii_letters + string.digits + string.punctuation
TABLES = {
    "en": (["en"], 500),
    "fi": (["fi"], 400),
    "es": (["es"], 400),
    "multi": (["en", "fi", "es"], 900),
}


def lexicon(lang):
    words = []
    for line in (ROOT / f"{lang}.words.txt").read_text(encoding="utf-8").splitlines():
        if not line.startswith("#"):
            words.extend(line.split())
    return words


def train(words, budget):
    seqs = [list(w) for w in words]
    merges = []
    for _ in range(budget):
        pairs = Counter()
        for s in seqs:
            for a, b in zip(s, s[1:]):
                pairs[(a, b)] += 1
        if not pairs:
            break
        best = min(pairs, key=lambda p: (-pairs[p], p))
        if pairs[best] < 2:
            break
        merges.append(best)
        joined = best[0] + best[1]
        for s in seqs:
            i = 0
            while i < len(s) - 1:
                if s[i] == best[0] and s[i + 1] == best[1]:
                    s[i : i + 2] = [joined]
                i += 1
    return merges


def main():
    for name, (langs, budget) in TABLES.items():
        words = [w for lang in langs for w in lexicon(lang)]
        merges = train(words, budget)
        alphabet = sorted(set(BASE) | {c for w in words for c in w})
        vocab = {}
        for tok in alphabet + [a + b for a, b in merges]:
            vocab.setdefault(tok, len(vocab))
        (ROOT / f"{name}.vocab.json").write_text(
            json.dumps(vocab, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
        )
        lines = ["#version: toy"] + [f"{a} {b}" for a, b in merges]
        (ROOT / f"{name}.merges.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"{name}: {len(merges)} merges, {len(vocab)} tokens", file=sys.stderr)


if __name__ == "__main__":
    main()
