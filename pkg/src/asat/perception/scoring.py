"""Per-(area, date) awareness values, real or synthesized."""

from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass

import numpy as np

from ..graph.ahin import Ahin
from ..graph.features import DEMOGRAPHIC_SLICE, DISEASE_SLICE
from ..ingest.records import RawPost
from ..ingest.snapshot import Snapshot
from .cgan import CganPair
from .lexicon import awareness_score
from .model import PerceptionModel

REAL_POST_THRESHOLD = 5


@dataclass(frozen=True)
class PerceptionResult:
    value: float
    source: str  # "real" | "synthetic" | "padded"

    @property
    def padded(self) -> bool:
        return self.source == "padded"


def area_condition(ahin: Ahin, geo_id: str, date: dt.date) -> np.ndarray:
    """Disease + demographic sub-vectors (normalized) plus the coordinate
    scaled to the gazetteer bounding box: a 10-dim condition vector."""
    fv = ahin.feature_vector(geo_id, date)
    node = ahin.nodes[geo_id]
    min_lat, min_lon, max_lat, max_lon = ahin.bbox
    lat_span = max_lat - min_lat
    lon_span = max_lon - min_lon
    o = np.array([
        (node.lat - min_lat) / lat_span if lat_span > 0 else 0.0,
        (node.lon - min_lon) / lon_span if lon_span > 0 else 0.0,
    ])
    return np.concatenate([fv.normalized[DISEASE_SLICE], fv.normalized[DEMOGRAPHIC_SLICE], o])


def _synthesis_rng(seed: int, geo_id: str, date: dt.date) -> np.random.Generator:
    # per-(area,date) stream so results do not depend on evaluation order
    key = f"{seed}|{geo_id}|{date.isoformat()}".encode()
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


def area_perception(
    ahin: Ahin,
    geo_id: str,
    date: dt.date,
    posts: list[RawPost],
    cgan: CganPair | None,
    model: PerceptionModel | None,
    m: int = 16,
    threshold: int = REAL_POST_THRESHOLD,
    lexicon: dict[str, float] | None = None,
    seed: int = 0,
) -> PerceptionResult:
    """Awareness for one area on one date.

    With at least ``threshold`` real posts the value is their mean lexicon
    score; otherwise ``m`` embeddings are synthesized under the area's
    condition and scored by the trained model. With neither, the value is
    0 and flagged padded.
    """
    if len(posts) >= threshold:
        scores = np.sort([awareness_score(p.title + " " + p.body, lexicon) for p in posts])
        return PerceptionResult(float(scores.sum() / len(scores)), "real")
    if cgan is not None and model is not None and m > 0:
        condition = area_condition(ahin, geo_id, date)
        rng = _synthesis_rng(seed, geo_id, date)
        embeddings = cgan.generate(condition, m, rng)
        scores = np.sort(model.predict(embeddings))
        return PerceptionResult(float(scores.sum() / len(scores)), "synthetic")
    return PerceptionResult(0.0, "padded")


def write_perceptions(path, table: dict[tuple[str, dt.date], PerceptionResult]) -> None:
    lines = ["geo_id,date,value,source"]
    for (geo_id, date), result in sorted(table.items()):
        lines.append(f"{geo_id},{date.isoformat()},{result.value!r},{result.source}")
    from pathlib import Path

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_perceptions(path) -> dict[tuple[str, dt.date], PerceptionResult]:
    from pathlib import Path

    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "geo_id,date,value,source":
        raise ValueError(f"{path}: not a perceptions table")
    out: dict[tuple[str, dt.date], PerceptionResult] = {}
    for line in lines[1:]:
        geo_id, date, value, source = line.split(",")
        out[(geo_id, dt.date.fromisoformat(date))] = PerceptionResult(float(value), source)
    return out


def posts_by_area_date(snapshot: Snapshot) -> dict[tuple[str, dt.date], list[RawPost]]:
    """Group posts by (extracted area, UTC date of creation)."""
    by_id = {p.post_id: p for p in snapshot.posts}
    grouped: dict[tuple[str, dt.date], list[RawPost]] = {}
    for post_id, geo_id, _ambiguous in snapshot.post_locations:
        post = by_id.get(post_id)
        if post is None:
            continue
        date = dt.datetime.fromtimestamp(post.created, tz=dt.timezone.utc).date()
        grouped.setdefault((geo_id, date), []).append(post)
    return grouped


def compute_perceptions(
    ahin: Ahin,
    snapshot: Snapshot,
    cgan: CganPair | None,
    model: PerceptionModel | None,
    m: int = 16,
    threshold: int = REAL_POST_THRESHOLD,
    seed: int = 0,
) -> dict[tuple[str, dt.date], PerceptionResult]:
    """Awareness for every (node, date) the snapshot knows about."""
    grouped = posts_by_area_date(snapshot)
    out: dict[tuple[str, dt.date], PerceptionResult] = {}
    for geo_id in sorted(ahin.nodes):
        for date in ahin.dates:
            result = area_perception(
                ahin, geo_id, date, grouped.get((geo_id, date), []),
                cgan, model, m=m, threshold=threshold, seed=seed)
            if not result.padded:
                out[(geo_id, date)] = result
    return out
