"""Same-level nearest-neighbor edges from GPS coordinates."""

from __future__ import annotations

import numpy as np

from .. import kernels

EARTH_RADIUS_KM = 6371.0088


def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance in km; accepts scalars or arrays (degrees)."""
    lat1, lon1, lat2, lon2 = (np.radians(np.asarray(x, dtype=float)) for x in (lat1, lon1, lat2, lon2))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def _distance_block(lats, lons, lo, hi, metric):
    if metric == "euclidean":
        d2 = (lats[lo:hi, None] - lats[None, :]) ** 2 + (lons[lo:hi, None] - lons[None, :]) ** 2
        return d2
    if metric == "haversine":
        return haversine_km(lats[lo:hi, None], lons[lo:hi, None], lats[None, :], lons[None, :])
    raise ValueError(f"unknown metric {metric!r}")


def knn_edges(
    ids: list[str], lats, lons, k: int, metric: str = "euclidean"
) -> list[tuple[str, str]]:
    """Undirected k-nearest edges among one cohort of points.

    Each point links to its k nearest peers (ties by ascending geo_id);
    mutual pairs are stored once. A single point yields no edges.
    """
    n = len(ids)
    if n < 2 or k < 1:
        return []
    order = np.argsort(np.asarray(ids, dtype=object), kind="stable")
    ids_sorted = [ids[i] for i in order]
    lats = np.asarray(lats, dtype=float)[order]
    lons = np.asarray(lons, dtype=float)[order]

    block = max(1, int(4e6 // max(n, 1)))
    pairs: set[tuple[int, int]] = set()
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        dists = _distance_block(lats, lons, lo, hi, metric)
        neighbors = kernels.knn_rows(dists, lo, min(k, n - 1))
        for row in range(hi - lo):
            i = lo + row
            for j in neighbors[row]:
                if j < 0:
                    continue
                pairs.add((i, int(j)) if i < j else (int(j), i))
    edges = [(ids_sorted[a], ids_sorted[b]) for a, b in pairs]
    edges.sort()
    return edges
