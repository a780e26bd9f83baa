"""Parsers for the four input feeds.

Each parser validates per row and returns a :class:`ParseResult`; a bad
row becomes a line-numbered rejection instead of aborting the file, so
``rows == records + rejections`` always holds. Only file-level defects
(bad header, duplicate ids, broken hierarchy) raise :class:`IngestError`.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import re
from pathlib import Path
from typing import Iterable

from .records import (
    LEVEL_PARENT,
    LEVELS,
    DemographicRecord,
    DiseaseRecord,
    IngestError,
    MobilityRecord,
    ParseResult,
    RawPost,
    Rejection,
)

DISEASE_HEADER = ["date", "geo_id", "state", "confirmed", "new_cases", "deaths", "fatality_rate"]
DEMOGRAPHICS_HEADER = [
    "geo_id", "level", "name", "parent_geo_id", "population",
    "pop_density", "pct_over_65", "pct_female", "lat", "lon",
]
MOBILITY_HEADER = ["geo_id", "date", "level"]

FATALITY_TOL = 1e-6

_HEX64 = re.compile(r"^[0-9a-f]{64}$")


def _read_csv(path: str | Path, header: list[str]):
    """Yield (line_no, row) pairs after validating the header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file, expected header {','.join(header)}")
        if [c.strip() for c in first] != header:
            raise IngestError(f"{path}: bad header {first!r}, expected {header!r}")
        for row in reader:
            if not row:
                continue
            yield reader.line_num, row


def _date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"negative count {value}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"fraction {value} outside [0,1]")
    return value


def parse_disease(path: str | Path, known_ids: set[str] | None = None) -> ParseResult:
    """Parse the disease feed; records come back sorted by (geo_id, date)."""
    records: list[DiseaseRecord] = []
    rejections: list[Rejection] = []
    for line_no, row in _read_csv(path, DISEASE_HEADER):
        raw = ",".join(row)
        try:
            if len(row) != len(DISEASE_HEADER):
                raise ValueError(f"expected {len(DISEASE_HEADER)} fields, got {len(row)}")
            rec = DiseaseRecord(
                date=_date(row[0]),
                geo_id=row[1].strip(),
                state=row[2].strip(),
                confirmed=_count(row[3]),
                new_cases=_count(row[4]),
                deaths=_count(row[5]),
                fatality_rate=_fraction(row[6]),
            )
            if not rec.geo_id:
                raise ValueError("empty geo_id")
            if known_ids is not None and rec.geo_id not in known_ids:
                raise ValueError(f"unknown geo_id {rec.geo_id!r}")
            if rec.deaths > rec.confirmed:
                raise ValueError(f"deaths {rec.deaths} exceed confirmed {rec.confirmed}")
            expected = rec.deaths / rec.confirmed if rec.confirmed > 0 else 0.0
            if abs(rec.fatality_rate - expected) > FATALITY_TOL:
                raise ValueError(
                    f"fatality_rate {rec.fatality_rate} inconsistent with "
                    f"deaths/confirmed = {expected:.6f}"
                )
        except ValueError as exc:
            rejections.append(Rejection(line_no, str(exc), raw))
            continue
        records.append(rec)
    records.sort(key=lambda r: (r.geo_id, r.date))
    return ParseResult(records, rejections)


def parse_demographics(path: str | Path) -> ParseResult:
    """Parse the gazetteer feed and validate the administrative tree.

    Raises :class:`IngestError` for duplicates, a nation count other than
    one, or parent cycles; orphan or wrong-level parent references reject
    the offending row only.
    """
    candidates: list[tuple[int, DemographicRecord, str]] = []
    rejections: list[Rejection] = []
    seen_lines: dict[str, int] = {}
    for line_no, row in _read_csv(path, DEMOGRAPHICS_HEADER):
        raw = ",".join(row)
        try:
            if len(row) != len(DEMOGRAPHICS_HEADER):
                raise ValueError(f"expected {len(DEMOGRAPHICS_HEADER)} fields, got {len(row)}")
            level = row[1].strip()
            if level not in LEVELS:
                raise ValueError(f"unknown level {level!r}")
            parent = row[3].strip() or None
            if level == "nation" and parent is not None:
                raise ValueError("nation row must not reference a parent")
            if level != "nation" and parent is None:
                raise ValueError(f"{level} row requires a parent_geo_id")
            lat, lon = float(row[8]), float(row[9])
            if not -90.0 <= lat <= 90.0:
                raise ValueError(f"lat {lat} outside [-90,90]")
            if not -180.0 <= lon <= 180.0:
                raise ValueError(f"lon {lon} outside [-180,180]")
            density = float(row[5])
            if density < 0:
                raise ValueError(f"negative pop_density {density}")
            rec = DemographicRecord(
                geo_id=row[0].strip(),
                level=level,
                name=row[2].strip(),
                parent_geo_id=parent,
                population=_count(row[4]),
                pop_density=density,
                pct_over_65=_fraction(row[6]),
                pct_female=_fraction(row[7]),
                lat=lat,
                lon=lon,
            )
            if not rec.geo_id:
                raise ValueError("empty geo_id")
        except ValueError as exc:
            rejections.append(Rejection(line_no, str(exc), raw))
            continue
        if rec.geo_id in seen_lines:
            raise IngestError(
                f"{path}: duplicate geo_id {rec.geo_id!r} on lines "
                f"{seen_lines[rec.geo_id]} and {line_no}"
            )
        seen_lines[rec.geo_id] = line_no
        candidates.append((line_no, rec, raw))

    nations = [rec for _, rec, _ in candidates if rec.level == "nation"]
    if len(nations) != 1:
        raise IngestError(f"{path}: expected exactly one nation record, found {len(nations)}")

    by_id = {rec.geo_id: rec for _, rec, _ in candidates}
    records: list[DemographicRecord] = []
    for line_no, rec, raw in candidates:
        reason = _hierarchy_problem(rec, by_id, path)
        if reason is None:
            records.append(rec)
        else:
            rejections.append(Rejection(line_no, reason, raw))
    rank = {level: i for i, level in enumerate(LEVELS)}
    records.sort(key=lambda r: (rank[r.level], r.geo_id))
    return ParseResult(records, rejections)


def _hierarchy_problem(rec: DemographicRecord, by_id, path) -> str | None:
    """Walk the parent chain; None when it reaches the nation cleanly."""
    node = rec
    visited = {rec.geo_id}
    while node.level != "nation":
        parent = by_id.get(node.parent_geo_id)
        if parent is None:
            return f"orphan parent reference {node.parent_geo_id!r}"
        if parent.geo_id in visited:
            raise IngestError(f"{path}: parent cycle through {parent.geo_id!r}")
        if parent.level != LEVEL_PARENT[node.level]:
            return (
                f"parent {parent.geo_id!r} has level {parent.level!r}, "
                f"expected {LEVEL_PARENT[node.level]!r}"
            )
        visited.add(parent.geo_id)
        node = parent
    return None


def parse_mobility(path: str | Path, known_ids: set[str] | None = None) -> ParseResult:
    records: list[MobilityRecord] = []
    rejections: list[Rejection] = []
    for line_no, row in _read_csv(path, MOBILITY_HEADER):
        raw = ",".join(row)
        try:
            if len(row) != len(MOBILITY_HEADER):
                raise ValueError(f"expected {len(MOBILITY_HEADER)} fields, got {len(row)}")
            geo_id = row[0].strip()
            if not geo_id:
                raise ValueError("empty geo_id")
            if known_ids is not None and geo_id not in known_ids:
                raise ValueError(f"unknown geo_id {geo_id!r}")
            try:
                level = int(row[2])
            except ValueError:
                raise ValueError(f"non-integer level {row[2]!r}") from None
            if not 1 <= level <= 5:
                raise ValueError(f"level {level} outside [1,5]")
            records.append(MobilityRecord(geo_id=geo_id, date=_date(row[1]), level=level))
        except ValueError as exc:
            rejections.append(Rejection(line_no, str(exc), raw))
    records.sort(key=lambda r: (r.geo_id, r.date))
    return ParseResult(records, rejections)


def hash_author(value: str) -> str:
    """Return the value unchanged when already a sha256 hex digest, else hash it."""
    if _HEX64.match(value):
        return value
    return hashlib.sha256(value.encode("utf-8")).hexdigest()


def parse_posts(path: str | Path) -> ParseResult:
    """Parse the JSONL post feed; authors are (re)hashed on the way in."""
    records: list[RawPost] = []
    rejections: list[Rejection] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("line is not a JSON object")
                post_id = str(obj.get("id", "")).strip()
                if not post_id:
                    raise ValueError("missing id")
                author = str(obj.get("author_hash", obj.get("author", "")))
                records.append(
                    RawPost(
                        post_id=post_id,
                        subreddit=str(obj.get("subreddit", "")),
                        created=float(obj.get("created_utc", 0.0)),
                        author_hash=hash_author(author),
                        title=str(obj.get("title", "")),
                        body=str(obj.get("body", "")),
                    )
                )
            except (ValueError, TypeError) as exc:
                rejections.append(Rejection(line_no, str(exc), line[:200]))
    return ParseResult(records, rejections)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def disease_rows(records: Iterable[DiseaseRecord]) -> list[list[str]]:
    return [
        [r.date.isoformat(), r.geo_id, r.state, str(r.confirmed), str(r.new_cases),
         str(r.deaths), _fmt(r.fatality_rate)]
        for r in records
    ]


def demographics_rows(records: Iterable[DemographicRecord]) -> list[list[str]]:
    return [
        [r.geo_id, r.level, r.name, r.parent_geo_id or "", str(r.population),
         _fmt(r.pop_density), _fmt(r.pct_over_65), _fmt(r.pct_female), _fmt(r.lat), _fmt(r.lon)]
        for r in records
    ]


def mobility_rows(records: Iterable[MobilityRecord]) -> list[list[str]]:
    return [[r.geo_id, r.date.isoformat(), str(r.level)] for r in records]


def post_lines(records: Iterable[RawPost]) -> list[str]:
    return [
        json.dumps(
            {
                "id": r.post_id,
                "subreddit": r.subreddit,
                "created_utc": r.created,
                "author_hash": r.author_hash,
                "title": r.title,
                "body": r.body,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        for r in records
    ]


def write_csv(path: str | Path, header: list[str], rows: Iterable[Iterable[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
