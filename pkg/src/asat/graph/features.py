"""Per-node per-date feature vectors.

Each area carries a 10-dim vector: four disease values, four demographic
values, the mobility level, and the awareness score. Sub-vectors with no
source data are zero-padded. The normalized copy rescales each dimension
min-max over the nodes at the same hierarchy level on the same date;
dimensions constant across that cohort map to 0.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping

import numpy as np

DIM_NAMES = (
    "confirmed",
    "new_cases",
    "deaths",
    "fatality_rate",
    "population",
    "pop_density",
    "pct_over_65",
    "pct_female",
    "mobility",
    "awareness",
)
FEATURE_DIM = len(DIM_NAMES)
DISEASE_SLICE = slice(0, 4)
DEMOGRAPHIC_SLICE = slice(4, 8)
MOBILITY_DIM = 8
AWARENESS_DIM = 9


@dataclass(frozen=True)
class FeatureVector:
    raw: np.ndarray
    normalized: np.ndarray
    missing: frozenset[str]  # subset of {"disease", "mobility", "awareness"}


class FeatureStore:
    """Assembles and normalizes feature vectors for all nodes."""

    def __init__(
        self,
        level_ids: Mapping[str, list[str]],
        disease: Mapping[tuple[str, dt.date], np.ndarray],
        demographic: Mapping[str, np.ndarray],
        mobility: Mapping[tuple[str, dt.date], float],
        awareness: Mapping[tuple[str, dt.date], float],
    ):
        self._level_ids = {level: list(ids) for level, ids in level_ids.items()}
        self._index: dict[str, tuple[str, int]] = {}
        for level, ids in self._level_ids.items():
            for i, geo_id in enumerate(ids):
                self._index[geo_id] = (level, i)
        self._disease = disease
        self._demographic = demographic
        self._mobility = mobility
        self._awareness = awareness
        dates = {d for _, d in disease} | {d for _, d in mobility} | {d for _, d in awareness}
        self.dates: tuple[dt.date, ...] = tuple(sorted(dates))
        self._matrices: dict[tuple[str, dt.date], np.ndarray] = {}
        self._bounds: dict[tuple[str, dt.date], tuple[np.ndarray, np.ndarray]] = {}

    def raw(self, geo_id: str, date: dt.date) -> tuple[np.ndarray, frozenset[str]]:
        if geo_id not in self._index:
            raise KeyError(f"unknown node {geo_id!r}")
        vec = np.zeros(FEATURE_DIM)
        missing = set()
        a1 = self._disease.get((geo_id, date))
        if a1 is None:
            missing.add("disease")
        else:
            vec[DISEASE_SLICE] = a1
        vec[DEMOGRAPHIC_SLICE] = self._demographic[geo_id]
        a3 = self._mobility.get((geo_id, date))
        if a3 is None:
            missing.add("mobility")
        else:
            vec[MOBILITY_DIM] = a3
        a4 = self._awareness.get((geo_id, date))
        if a4 is None:
            missing.add("awareness")
        else:
            vec[AWARENESS_DIM] = a4
        return vec, frozenset(missing)

    def matrix(self, level: str, date: dt.date) -> np.ndarray:
        """Raw (n_level x 10) matrix for one cohort, cached."""
        key = (level, date)
        if key not in self._matrices:
            rows = [self.raw(g, date)[0] for g in self._level_ids[level]]
            self._matrices[key] = np.array(rows) if rows else np.zeros((0, FEATURE_DIM))
        return self._matrices[key]

    def bounds(self, level: str, date: dt.date) -> tuple[np.ndarray, np.ndarray]:
        key = (level, date)
        if key not in self._bounds:
            m = self.matrix(level, date)
            if m.shape[0] == 0:
                self._bounds[key] = (np.zeros(FEATURE_DIM), np.zeros(FEATURE_DIM))
            else:
                self._bounds[key] = (m.min(axis=0), m.max(axis=0))
        return self._bounds[key]

    def normalized_matrix(self, level: str, date: dt.date) -> np.ndarray:
        m = self.matrix(level, date)
        lo, hi = self.bounds(level, date)
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        out = (m - lo) / safe
        out[:, span == 0] = 0.0
        return out

    def vector(self, geo_id: str, date: dt.date) -> FeatureVector:
        raw, missing = self.raw(geo_id, date)
        level, i = self._index[geo_id]
        lo, hi = self.bounds(level, date)
        span = hi - lo
        normalized = np.where(span > 0, (raw - lo) / np.where(span > 0, span, 1.0), 0.0)
        return FeatureVector(raw=raw, normalized=normalized, missing=missing)

    def level_of(self, geo_id: str) -> str:
        return self._index[geo_id][0]

    def cohort_ids(self, level: str) -> list[str]:
        return self._level_ids[level]
