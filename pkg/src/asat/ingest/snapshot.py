"""On-disk snapshot written by the ingest stage and read by later stages.

Layout (all deterministic for identical inputs):
    disease.csv, demographics.csv, mobility.csv  -- normalized feeds
    posts.jsonl                                  -- one post per line
    post_locations.csv                           -- post_id,geo_id,ambiguous
    rejections.csv                               -- source,line_no,reason
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import parsers
from .locations import GazetteerIndex, LocationMatch
from .records import (
    DemographicRecord,
    DiseaseRecord,
    IngestError,
    MobilityRecord,
    RawPost,
    Rejection,
)


@dataclass
class Snapshot:
    demographics: list[DemographicRecord]
    disease: list[DiseaseRecord]
    mobility: list[MobilityRecord]
    posts: list[RawPost]
    post_locations: list[tuple[str, str, bool]] = field(default_factory=list)
    rejections: dict[str, list[Rejection]] = field(default_factory=dict)

    def locations_of(self, post_id: str) -> list[str]:
        return [geo for pid, geo, _ in self.post_locations if pid == post_id]


def build_snapshot(
    disease_path, demo_path, mobility_path, posts_path
) -> Snapshot:
    """Parse all four feeds and resolve post locations against the gazetteer."""
    demo = parsers.parse_demographics(demo_path)
    known = {rec.geo_id for rec in demo.records}
    disease = parsers.parse_disease(disease_path, known_ids=known)
    mobility = parsers.parse_mobility(mobility_path, known_ids=known)
    posts = parsers.parse_posts(posts_path)

    index = GazetteerIndex(demo.records)
    post_locations: list[tuple[str, str, bool]] = []
    for post in posts.records:
        for match in index.extract(post):
            post_locations.append((post.post_id, match.geo_id, match.ambiguous))
    post_locations.sort()

    return Snapshot(
        demographics=demo.records,
        disease=disease.records,
        mobility=mobility.records,
        posts=posts.records,
        post_locations=post_locations,
        rejections={
            "disease": disease.rejections,
            "demographics": demo.rejections,
            "mobility": mobility.rejections,
            "posts": posts.rejections,
        },
    )


def write_snapshot(snapshot: Snapshot, outdir: str | Path) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    parsers.write_csv(out / "disease.csv", parsers.DISEASE_HEADER,
                      parsers.disease_rows(snapshot.disease))
    parsers.write_csv(out / "demographics.csv", parsers.DEMOGRAPHICS_HEADER,
                      parsers.demographics_rows(snapshot.demographics))
    parsers.write_csv(out / "mobility.csv", parsers.MOBILITY_HEADER,
                      parsers.mobility_rows(snapshot.mobility))
    with open(out / "posts.jsonl", "w", encoding="utf-8") as fh:
        for line in parsers.post_lines(snapshot.posts):
            fh.write(line + "\n")
    parsers.write_csv(
        out / "post_locations.csv",
        ["post_id", "geo_id", "ambiguous"],
        [[pid, geo, "1" if amb else "0"] for pid, geo, amb in snapshot.post_locations],
    )
    rej_rows = []
    for source in sorted(snapshot.rejections):
        rej_rows.extend(
            [source, str(r.line_no), r.reason] for r in snapshot.rejections[source]
        )
    parsers.write_csv(out / "rejections.csv", ["source", "line_no", "reason"], rej_rows)


def read_snapshot(directory: str | Path) -> Snapshot:
    src = Path(directory)
    if not src.is_dir():
        raise IngestError(f"snapshot directory {src} does not exist")
    demo = parsers.parse_demographics(src / "demographics.csv")
    disease = parsers.parse_disease(src / "disease.csv")
    mobility = parsers.parse_mobility(src / "mobility.csv")
    posts = parsers.parse_posts(src / "posts.jsonl")
    post_locations: list[tuple[str, str, bool]] = []
    loc_path = src / "post_locations.csv"
    if loc_path.exists():
        import csv

        with open(loc_path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                post_locations.append((row["post_id"], row["geo_id"], row["ambiguous"] == "1"))
    return Snapshot(
        demographics=demo.records,
        disease=disease.records,
        mobility=mobility.records,
        posts=posts.records,
        post_locations=post_locations,
    )
