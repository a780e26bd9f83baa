"""Lexicon-based awareness scoring.

Each term carries a weight in [-1, 1]; positive terms indicate awareness
(protective vocabulary), negative terms indicate dismissiveness. A text
scores 0.5 + 0.5 * mean(matched weights), so no matches (or empty text)
is neutral 0.5 and the score is monotone in the mean matched weight.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

from ..ingest.locations import tokenize


def load_lexicon(path: str | Path | None = None) -> dict[str, float]:
    if path is None:
        text = resources.files("asat.perception.data").joinpath(
            "awareness_lexicon.csv").read_text()
    else:
        text = Path(path).read_text(encoding="utf-8")
    lexicon: dict[str, float] = {}
    for row in csv.DictReader(text.splitlines()):
        weight = float(row["weight"])
        if not -1.0 <= weight <= 1.0:
            raise ValueError(f"lexicon weight {weight} for {row['term']!r} outside [-1,1]")
        lexicon[row["term"].lower()] = weight
    return lexicon


_default_lexicon: dict[str, float] | None = None


def default_lexicon() -> dict[str, float]:
    global _default_lexicon
    if _default_lexicon is None:
        _default_lexicon = load_lexicon()
    return _default_lexicon


def awareness_score(text: str, lexicon: dict[str, float] | None = None) -> float:
    lexicon = lexicon if lexicon is not None else default_lexicon()
    matched = [lexicon[token] for token in tokenize(text) if token in lexicon]
    if not matched:
        return 0.5
    mean = sum(matched) / len(matched)
    return min(1.0, max(0.0, 0.5 + 0.5 * mean))
