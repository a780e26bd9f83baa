from .ahin import Ahin, GeoNode, GraphError, build_ahin
from .features import (
    AWARENESS_DIM,
    DIM_NAMES,
    FEATURE_DIM,
    MOBILITY_DIM,
    FeatureStore,
    FeatureVector,
)
from .io import read_graph_edges, write_graph
from .knn import haversine_km, knn_edges
from .metapath import GUIDING_PATHS, P1, P2, P3, MetaPath

__all__ = [
    "AWARENESS_DIM",
    "Ahin",
    "DIM_NAMES",
    "FEATURE_DIM",
    "FeatureStore",
    "FeatureVector",
    "GUIDING_PATHS",
    "GeoNode",
    "GraphError",
    "MOBILITY_DIM",
    "MetaPath",
    "P1",
    "P2",
    "P3",
    "build_ahin",
    "haversine_km",
    "knn_edges",
    "read_graph_edges",
    "write_graph",
]
