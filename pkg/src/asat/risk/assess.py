"""Hierarchical risk assessment over an encoded snapshot."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from ..gae.model import GaeModel
from ..graph.ahin import Ahin
from ..graph.features import AWARENESS_DIM, MOBILITY_DIM
from ..graph.knn import haversine_km
from .weights import GammaProfile, RiskError, contribution_breakdown, index_of

COVERAGE_MARGIN_DEG = 0.5


class UnknownArea(RiskError):
    pass


class UnknownDate(RiskError):
    pass


class OutsideCoverage(RiskError):
    pass


@dataclass
class LevelAssessment:
    level: str
    geo_id: str
    name: str
    index: float
    perception: float
    density: float
    mobility: float
    breakdown: dict[str, float] = field(default_factory=dict)


@dataclass
class LocationDetail:
    lat: float
    lon: float
    nearest_city: str
    distance_km: float
    index: float
    mobility: float
    density: float  # people per square mile in the containing county


@dataclass
class RiskAssessment:
    date: dt.date
    levels: list[LevelAssessment]  # ordered nation -> state -> county -> city
    location: LocationDetail | None = None
    stale: bool = False


class Assessor:
    """Read-only queries over an immutable graph + trained encoder."""

    def __init__(self, ahin: Ahin, model: GaeModel,
                 profile: GammaProfile | None = None,
                 perceptions: dict[tuple[str, dt.date], float] | None = None):
        self.ahin = ahin
        self.model = model
        self.profile = profile or GammaProfile()
        self.perceptions = perceptions or {}
        self._encodings: dict[dt.date, dict[str, np.ndarray]] = {}
        self._entries: dict[dt.date, dict[str, LevelAssessment]] = {}
        cities = ahin.levels["city"]
        self._city_ids = cities
        if cities:
            lat = np.radians([ahin.nodes[g].lat for g in cities])
            lon = np.radians([ahin.nodes[g].lon for g in cities])
            # unit sphere vectors: nearest city == largest dot product
            self._city_xyz = np.column_stack(
                [np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)])
        else:
            self._city_xyz = None

    # -- per-date caches -----------------------------------------------------

    def encodings(self, date: dt.date) -> dict[str, np.ndarray]:
        if date not in self._encodings:
            self._encodings[date] = self.model.encode_all(self.ahin, date)
        return self._encodings[date]

    def _entry_cache(self, date: dt.date) -> dict[str, LevelAssessment]:
        if date not in self._entries:
            reps = self.encodings(date)
            self._entries[date] = {
                geo_id: self._level_entry(geo_id, date, reps) for geo_id in self.ahin.nodes
            }
        return self._entries[date]

    def default_date(self) -> dt.date:
        if not self.ahin.dates:
            raise UnknownDate("snapshot has no dated observations")
        return self.ahin.dates[-1]

    def resolve_date(self, date: dt.date | None, stale_ok: bool = False) -> tuple[dt.date, bool]:
        if date is None:
            return self.default_date(), False
        if date in self.ahin.dates:
            return date, False
        if not stale_ok:
            raise UnknownDate(f"no data ingested for {date.isoformat()}")
        return date, True

    # -- queries -------------------------------------------------------------

    def nearest_city(self, lat: float, lon: float) -> tuple[str, float]:
        if self._city_xyz is None:
            raise OutsideCoverage("snapshot has no city nodes")
        min_lat, min_lon, max_lat, max_lon = self.ahin.bbox
        m = COVERAGE_MARGIN_DEG
        if not (min_lat - m <= lat <= max_lat + m and min_lon - m <= lon <= max_lon + m):
            raise OutsideCoverage(
                f"({lat}, {lon}) is outside the covered region")
        rlat, rlon = np.radians(lat), np.radians(lon)
        query = np.array([np.cos(rlat) * np.cos(rlon),
                          np.cos(rlat) * np.sin(rlon), np.sin(rlat)])
        # argmax takes the first (lowest geo_id) on exact ties
        best = int(np.argmax(self._city_xyz @ query))
        geo_id = self._city_ids[best]
        node = self.ahin.nodes[geo_id]
        return geo_id, float(haversine_km(lat, lon, node.lat, node.lon))

    def _level_entry(self, geo_id: str, date: dt.date,
                     reps: dict[str, np.ndarray]) -> LevelAssessment:
        node = self.ahin.nodes[geo_id]
        rep = reps[geo_id]
        fv = self.ahin.feature_vector(geo_id, date)
        return LevelAssessment(
            level=node.level,
            geo_id=geo_id,
            name=node.name,
            index=index_of(rep, self.profile),
            perception=float(self.perceptions.get((geo_id, date), 0.0)),
            density=float(fv.raw[5]),
            mobility=float(fv.raw[MOBILITY_DIM]),
            breakdown=contribution_breakdown(rep, self.profile),
        )

    def assess_geo(self, geo_id: str, date: dt.date | None = None,
                   stale_ok: bool = False) -> RiskAssessment:
        if geo_id not in self.ahin.nodes:
            raise UnknownArea(f"unknown area {geo_id!r}")
        date, stale = self.resolve_date(date, stale_ok)
        entries = self._entry_cache(date)
        chain = [geo_id]
        for ancestor in self.ahin.ancestors(geo_id):
            if self.ahin.nodes[ancestor].level != "nation":
                chain.append(ancestor)
        chain.reverse()
        levels = [entries[g] for g in chain]
        return RiskAssessment(date=date, levels=levels, stale=stale)

    def assess_point(self, lat: float, lon: float, date: dt.date | None = None,
                     stale_ok: bool = False) -> RiskAssessment:
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            raise RiskError(f"malformed coordinates ({lat}, {lon})")
        city, distance = self.nearest_city(lat, lon)
        assessment = self.assess_geo(city, date, stale_ok)
        city_entry = assessment.levels[-1]
        county = self.ahin.nodes[city].parent
        county_density = (self._entry_cache(assessment.date)[county].density
                          if county else city_entry.density)
        assessment.location = LocationDetail(
            lat=lat,
            lon=lon,
            nearest_city=city,
            distance_km=distance,
            index=city_entry.index,
            mobility=city_entry.mobility,
            density=county_density,
        )
        return assessment

    def index_for(self, geo_id: str, date: dt.date, stale_ok: bool = True) -> float:
        date, _ = self.resolve_date(date, stale_ok)
        return index_of(self.encodings(date)[geo_id], self.profile)

    def compare_dates(self, geo_id: str, dates: list[dt.date]) -> list[tuple[dt.date, float]]:
        if geo_id not in self.ahin.nodes:
            raise UnknownArea(f"unknown area {geo_id!r}")
        if not dates:
            raise RiskError("empty date list")
        return [(d, self.index_for(geo_id, d)) for d in dates]

    def indexed_with_mobility(self, geo_id: str, date: dt.date,
                              mobility_level: float) -> float:
        """Index of an area with its mobility dimension overridden (used for
        points of interest that carry their own traffic level)."""
        date, _ = self.resolve_date(date, stale_ok=True)
        rep = self.encodings(date)[geo_id].copy()
        level = self.ahin.nodes[geo_id].level
        lo, hi = self.ahin.features.bounds(level, date)
        span = hi[MOBILITY_DIM] - lo[MOBILITY_DIM]
        if span > 0:
            rep[MOBILITY_DIM] = min(1.0, max(
                0.0, (mobility_level - lo[MOBILITY_DIM]) / span))
        else:
            rep[MOBILITY_DIM] = 0.0
        return index_of(rep, self.profile)
