"""Runtime state loaded once and shared read-only by all request handlers.

Reload builds a fresh state and swaps the reference atomically; in-flight
requests keep the snapshot they started with.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

from ..gae.model import GaeModel
from ..graph.ahin import Ahin, build_ahin
from ..graph.io import read_graph_edges
from ..ingest.records import RawPost
from ..ingest.snapshot import Snapshot, read_snapshot
from ..perception.lexicon import default_lexicon
from ..perception.scoring import PerceptionResult, posts_by_area_date, read_perceptions
from ..risk.assess import Assessor
from ..risk.pois import Poi, load_pois
from ..risk.weights import GammaProfile, load_gamma


class ConfigError(ValueError):
    pass


@dataclass
class RuntimeState:
    snapshot: Snapshot
    ahin: Ahin
    assessor: Assessor
    pois: list[Poi] = field(default_factory=list)
    posts_index: dict[tuple[str, dt.date], list[RawPost]] = field(default_factory=dict)
    perception_sources: dict[tuple[str, dt.date], str] = field(default_factory=dict)
    lexicon: dict[str, float] = field(default_factory=dict)


def load_runtime(
    snapshot_dir: str | Path,
    graph_dir: str | Path,
    models_dir: str | Path,
    gamma_path: str | Path | None = None,
    pois_path: str | Path | None = None,
) -> RuntimeState:
    for label, path in (("snapshot", snapshot_dir), ("graph", graph_dir),
                        ("models", models_dir)):
        if not Path(path).exists():
            raise ConfigError(f"{label} directory {path} does not exist")

    snapshot = read_snapshot(snapshot_dir)
    near_edges, meta = read_graph_edges(graph_dir)

    perceptions_path = Path(models_dir) / "perceptions.csv"
    perception_table: dict[tuple[str, dt.date], PerceptionResult] = {}
    if perceptions_path.exists():
        perception_table = read_perceptions(perceptions_path)

    ahin = build_ahin(
        snapshot.demographics,
        snapshot.disease,
        snapshot.mobility,
        {key: res.value for key, res in perception_table.items()},
        k=int(meta.get("k", 2)),
        metric=str(meta.get("metric", "euclidean")),
        near_edges=near_edges,
    )
    model = GaeModel.load(models_dir)
    profile = load_gamma(gamma_path) if gamma_path else GammaProfile()
    assessor = Assessor(
        ahin, model, profile=profile,
        perceptions={key: res.value for key, res in perception_table.items()})
    return RuntimeState(
        snapshot=snapshot,
        ahin=ahin,
        assessor=assessor,
        pois=load_pois(pois_path) if pois_path else [],
        posts_index=posts_by_area_date(snapshot),
        perception_sources={key: res.source for key, res in perception_table.items()},
        lexicon=default_lexicon(),
    )
