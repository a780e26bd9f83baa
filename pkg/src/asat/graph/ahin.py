"""The attributed typed geo graph: hierarchy tree plus nearness edges."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..ingest.records import (
    LEVELS,
    DemographicRecord,
    DiseaseRecord,
    MobilityRecord,
)
from .features import FeatureStore, FeatureVector
from .knn import knn_edges
from .metapath import GUIDING_PATHS, INCLUDE, NEAR, MetaPath


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GeoNode:
    geo_id: str
    level: str
    name: str
    lat: float
    lon: float
    parent: str | None


class Ahin:
    """Immutable after construction; safe for concurrent readers."""

    def __init__(
        self,
        nodes: dict[str, GeoNode],
        near_edges: list[tuple[str, str]],
        features: FeatureStore,
        k: int,
        metric: str,
    ):
        self.nodes = nodes
        self.k = k
        self.metric = metric
        self.features = features
        self.levels: dict[str, list[str]] = {level: [] for level in LEVELS}
        for geo_id in sorted(nodes):
            self.levels[nodes[geo_id].level].append(geo_id)
        self.children: dict[str, list[str]] = {g: [] for g in nodes}
        for geo_id in sorted(nodes):
            parent = nodes[geo_id].parent
            if parent is not None:
                self.children[parent].append(geo_id)
        self.near_edges = sorted(set(near_edges))
        self.near: dict[str, list[str]] = {g: [] for g in nodes}
        for a, b in self.near_edges:
            self.near[a].append(b)
            self.near[b].append(a)
        for adj in self.near.values():
            adj.sort()
        roots = [g for g, n in nodes.items() if n.parent is None]
        if len(roots) != 1:
            raise GraphError(f"expected a single root, found {len(roots)}")
        self.root = roots[0]
        lats = [n.lat for n in nodes.values()]
        lons = [n.lon for n in nodes.values()]
        self.bbox = (min(lats), min(lons), max(lats), max(lons))

    # -- structure ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def include_edge_count(self) -> int:
        return sum(len(c) for c in self.children.values())

    @property
    def near_edge_count(self) -> int:
        return len(self.near_edges)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return self.features.dates

    def level_of(self, geo_id: str) -> str:
        return self.nodes[geo_id].level

    def ancestors(self, geo_id: str) -> list[str]:
        """Chain from the node up to the root, excluding the node."""
        out = []
        parent = self.nodes[geo_id].parent
        while parent is not None:
            out.append(parent)
            parent = self.nodes[parent].parent
        return out

    # -- attributes --------------------------------------------------------

    def feature_vector(self, geo_id: str, date: dt.date) -> FeatureVector:
        if geo_id not in self.nodes:
            raise GraphError(f"unknown node {geo_id!r}")
        return self.features.vector(geo_id, date)

    # -- meta-path machinery -------------------------------------------------

    def _hop(self, frontier: set[str], relation: str, dst_type: str) -> set[str]:
        out: set[str] = set()
        if relation == INCLUDE:
            for g in frontier:
                out.update(self.children[g])
        elif relation == NEAR:
            for g in frontier:
                out.update(self.near[g])
        else:
            raise GraphError(f"unknown relation {relation!r}")
        return {g for g in out if self.nodes[g].level == dst_type}

    def meta_path_neighbors(self, geo_id: str, path: MetaPath) -> tuple[frozenset[str], str]:
        """Terminal nodes of all instances of ``path`` anchored at ``geo_id``.

        The node itself is excluded; the second item is the relation of the
        final hop (which relation space scores these neighbors).
        """
        if geo_id not in self.nodes:
            raise GraphError(f"unknown node {geo_id!r}")
        if self.nodes[geo_id].level != path.node_types[0]:
            raise GraphError(
                f"node {geo_id!r} has type {self.nodes[geo_id].level!r}, "
                f"path starts at {path.node_types[0]!r}"
            )
        frontier = {geo_id}
        for relation, dst_type in zip(path.relations, path.node_types[1:]):
            frontier = self._hop(frontier, relation, dst_type)
            if not frontier:
                break
        return frozenset(frontier - {geo_id}), path.final_relation

    def guided_neighbors(self, geo_id: str) -> tuple[tuple[str, ...], str | None]:
        """Neighbors used to encode ``geo_id``: its level's template anchored
        at the node's own type (sorted for determinism)."""
        level = self.nodes[geo_id].level
        path = GUIDING_PATHS.get(level)
        if path is None:
            return (), None
        suffix = path.suffix_from(level)
        neighbors, relation = self.meta_path_neighbors(geo_id, suffix)
        return tuple(sorted(neighbors)), relation


def build_ahin(
    demographics: list[DemographicRecord],
    disease: list[DiseaseRecord] | None = None,
    mobility: list[MobilityRecord] | None = None,
    perceptions: Mapping[tuple[str, dt.date], float] | None = None,
    k: int = 2,
    metric: str = "euclidean",
    near_edges: list[tuple[str, str]] | None = None,
) -> Ahin:
    """Construct the graph from parsed records.

    ``perceptions`` maps (geo_id, date) to an awareness score in [0,1];
    pass ``near_edges`` to reuse edges from an exported graph instead of
    recomputing the k-NN.
    """
    if not demographics:
        raise GraphError("empty demographics: nothing to build")
    seen: set[str] = set()
    for rec in demographics:
        if rec.geo_id in seen:
            raise GraphError(f"duplicate geo_id {rec.geo_id!r}")
        seen.add(rec.geo_id)

    nodes = {
        rec.geo_id: GeoNode(
            geo_id=rec.geo_id,
            level=rec.level,
            name=rec.name,
            lat=rec.lat,
            lon=rec.lon,
            parent=rec.parent_geo_id,
        )
        for rec in demographics
    }

    if near_edges is None:
        near_edges = []
        by_level: dict[str, list[DemographicRecord]] = {}
        for rec in demographics:
            by_level.setdefault(rec.level, []).append(rec)
        for level in ("state", "county", "city"):
            cohort = by_level.get(level, [])
            if len(cohort) < 2:
                continue
            near_edges.extend(
                knn_edges(
                    [r.geo_id for r in cohort],
                    [r.lat for r in cohort],
                    [r.lon for r in cohort],
                    k,
                    metric=metric,
                )
            )

    level_ids: dict[str, list[str]] = {level: [] for level in LEVELS}
    for geo_id in sorted(nodes):
        level_ids[nodes[geo_id].level].append(geo_id)

    a1 = {
        (r.geo_id, r.date): np.array(
            [r.confirmed, r.new_cases, r.deaths, r.fatality_rate], dtype=float
        )
        for r in disease or []
    }
    a2 = {
        r.geo_id: np.array(
            [r.population, r.pop_density, r.pct_over_65, r.pct_female], dtype=float
        )
        for r in demographics
    }
    a3 = {(r.geo_id, r.date): float(r.level) for r in mobility or []}
    a4 = {key: float(val) for key, val in (perceptions or {}).items()}

    features = FeatureStore(level_ids, a1, a2, a3, a4)
    return Ahin(nodes, near_edges, features, k=k, metric=metric)
