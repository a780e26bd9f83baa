"""Map post text to gazetteer areas.

Token-sequence matching against area names (plus "<name> county" for
counties and the usual two-letter state abbreviations), case-insensitive.
When a name matches areas in several states and the text carries no state
cue, all candidates come back flagged ambiguous. A state-based subreddit
(e.g. r/CoronavirusOH) is used as a fallback only when the text itself
matched nothing.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources

from .records import DemographicRecord, RawPost

_TOKEN = re.compile(r"[a-z0-9]+")

_SUBREDDIT_PREFIXES = ("coronavirus", "covid19", "covid")


@dataclass(frozen=True)
class LocationMatch:
    geo_id: str
    ambiguous: bool = False


def load_state_abbreviations() -> dict[str, str]:
    """Bundled mapping of state name (lowercase) -> 2-letter abbreviation."""
    text = resources.files("asat.ingest.data").joinpath("state_abbreviations.csv").read_text()
    out: dict[str, str] = {}
    for row in csv.DictReader(text.splitlines()):
        out[row["name"].lower()] = row["abbrev"]
    return out


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _contains(tokens: list[str], seq: tuple[str, ...]) -> bool:
    n = len(seq)
    if n == 0 or n > len(tokens):
        return False
    return any(tuple(tokens[i : i + n]) == seq for i in range(len(tokens) - n + 1))


class GazetteerIndex:
    """Matching index over one parsed demographic table."""

    def __init__(self, gazetteer: list[DemographicRecord]):
        self.by_id = {rec.geo_id: rec for rec in gazetteer}
        abbrevs = load_state_abbreviations()
        # state geo_id -> set of token patterns; abbreviation included when known
        self._state_patterns: dict[str, list[tuple[str, ...]]] = {}
        self._abbrev_to_state: dict[str, str] = {}
        for rec in gazetteer:
            if rec.level != "state":
                continue
            patterns = [tuple(tokenize(rec.name))]
            abbrev = abbrevs.get(rec.name.lower())
            if abbrev:
                patterns.append((abbrev.lower(),))
                self._abbrev_to_state[abbrev.lower()] = rec.geo_id
            self._state_patterns[rec.geo_id] = patterns
        self._sub_patterns: dict[str, str] = {}
        for geo_id, patterns in self._state_patterns.items():
            for pattern in patterns:
                self._sub_patterns["".join(pattern)] = geo_id
        self._area_patterns: dict[str, list[tuple[str, ...]]] = {}
        for rec in gazetteer:
            if rec.level not in ("county", "city"):
                continue
            name = tuple(tokenize(rec.name))
            patterns = [name]
            if rec.level == "county" and name[-1:] != ("county",):
                patterns.append(name + ("county",))
            self._area_patterns[rec.geo_id] = patterns

    def state_of(self, geo_id: str) -> str | None:
        rec = self.by_id.get(geo_id)
        while rec is not None and rec.level != "state":
            rec = self.by_id.get(rec.parent_geo_id) if rec.parent_geo_id else None
        return rec.geo_id if rec else None

    def subreddit_state(self, subreddit: str) -> str | None:
        name = subreddit.lower().removeprefix("r/")
        for prefix in _SUBREDDIT_PREFIXES:
            if name.startswith(prefix):
                return self._sub_patterns.get(name[len(prefix):])
        return self._sub_patterns.get(name)

    def extract(self, post: RawPost) -> list[LocationMatch]:
        tokens = tokenize(post.title + " " + post.body)
        state_hits = {
            geo_id
            for geo_id, patterns in self._state_patterns.items()
            if any(_contains(tokens, p) for p in patterns)
        }

        # group same-named areas so state cues can disambiguate them
        hits_by_name: dict[tuple[str, ...], list[str]] = {}
        for geo_id, patterns in self._area_patterns.items():
            if any(_contains(tokens, p) for p in patterns):
                hits_by_name.setdefault(patterns[0], []).append(geo_id)

        matches: list[LocationMatch] = []
        for _, candidates in sorted(hits_by_name.items()):
            if len(candidates) > 1 and state_hits:
                cued = [g for g in candidates if self.state_of(g) in state_hits]
                if cued:
                    candidates = cued
            ambiguous = len(candidates) > 1
            matches.extend(
                LocationMatch(geo_id, ambiguous=ambiguous) for geo_id in sorted(candidates)
            )

        matches.extend(LocationMatch(g) for g in sorted(state_hits))
        if not matches:
            fallback = self.subreddit_state(post.subreddit)
            if fallback:
                matches.append(LocationMatch(fallback))
        seen: set[str] = set()
        unique = []
        for m in matches:
            if m.geo_id not in seen:
                seen.add(m.geo_id)
                unique.append(m)
        return unique
