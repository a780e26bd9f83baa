"""Typed records produced by the ingestion parsers."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

LEVELS = ("nation", "state", "county", "city")

#: parent level required for each level; nation has no parent
LEVEL_PARENT = {"state": "nation", "county": "state", "city": "county"}


class IngestError(ValueError):
    """File-level failure: duplicate ids, broken hierarchy, bad header."""


@dataclass(frozen=True)
class DiseaseRecord:
    date: dt.date
    geo_id: str
    state: str
    confirmed: int
    new_cases: int
    deaths: int
    fatality_rate: float


@dataclass(frozen=True)
class DemographicRecord:
    geo_id: str
    level: str
    name: str
    parent_geo_id: str | None
    population: int
    pop_density: float
    pct_over_65: float
    pct_female: float
    lat: float
    lon: float


@dataclass(frozen=True)
class MobilityRecord:
    geo_id: str
    date: dt.date
    level: int


@dataclass(frozen=True)
class RawPost:
    post_id: str
    subreddit: str
    created: float
    author_hash: str
    title: str
    body: str


@dataclass(frozen=True)
class Rejection:
    line_no: int
    reason: str
    raw: str


@dataclass
class ParseResult:
    """Records plus line-numbered rejections; nothing is silently dropped."""

    records: list
    rejections: list[Rejection]
