"""Point-of-interest scoring: nearby places ranked by distance, each
scored through its containing city with its own traffic level."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

from ..graph.knn import haversine_km
from .assess import Assessor
from .weights import RiskError

POI_HEADER = ["name", "tag", "lat", "lon", "mobility"]


@dataclass(frozen=True)
class Poi:
    name: str
    tag: str
    lat: float
    lon: float
    mobility: int


@dataclass(frozen=True)
class ScoredPoi:
    poi: Poi
    distance_km: float
    city_geo_id: str
    index: float


def load_pois(path: str | Path) -> list[Poi]:
    pois: list[Poi] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        if [c.strip() for c in header] != POI_HEADER:
            raise RiskError(f"{path}: bad POI header {header!r}")
        for row in reader:
            if not row:
                continue
            level = int(row[4])
            if not 1 <= level <= 5:
                raise RiskError(f"{path}: POI mobility {level} outside [1,5]")
            pois.append(Poi(name=row[0], tag=row[1], lat=float(row[2]),
                            lon=float(row[3]), mobility=level))
    return pois


def nearby_pois(assessor: Assessor, pois: list[Poi], lat: float, lon: float,
                tag: str, radius_km: float, date: dt.date | None = None) -> list[ScoredPoi]:
    """POIs with the given tag inside the radius, nearest first."""
    date, _ = assessor.resolve_date(date, stale_ok=True)
    tag = tag.strip().lower()
    scored: list[ScoredPoi] = []
    for poi in pois:
        if poi.tag.lower() != tag:
            continue
        distance = float(haversine_km(lat, lon, poi.lat, poi.lon))
        if distance > radius_km:
            continue
        city, _ = assessor.nearest_city(poi.lat, poi.lon)
        scored.append(ScoredPoi(
            poi=poi,
            distance_km=distance,
            city_geo_id=city,
            index=assessor.indexed_with_mobility(city, date, poi.mobility),
        ))
    scored.sort(key=lambda s: (s.distance_km, s.poi.name))
    return scored
