"""Graph export: node table + edge list CSV pair."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..ingest.parsers import write_csv
from .ahin import Ahin, GraphError

NODES_HEADER = ["geo_id", "level", "name", "parent_geo_id", "lat", "lon"]
EDGES_HEADER = ["relation", "src", "dst"]


def write_graph(ahin: Ahin, outdir: str | Path) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    node_rows = [
        [n.geo_id, n.level, n.name, n.parent or "", repr(n.lat), repr(n.lon)]
        for n in (ahin.nodes[g] for g in sorted(ahin.nodes))
    ]
    write_csv(out / "nodes.csv", NODES_HEADER, node_rows)
    edge_rows = []
    for parent in sorted(ahin.children):
        edge_rows.extend(["include", parent, child] for child in ahin.children[parent])
    edge_rows.extend(["near", a, b] for a, b in ahin.near_edges)
    write_csv(out / "edges.csv", EDGES_HEADER, edge_rows)
    meta = {
        "k": ahin.k,
        "metric": ahin.metric,
        "nodes": ahin.node_count,
        "include_edges": ahin.include_edge_count,
        "near_edges": ahin.near_edge_count,
    }
    (out / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def read_graph_edges(directory: str | Path) -> tuple[list[tuple[str, str]], dict]:
    """Near edges and metadata of an exported graph."""
    src = Path(directory)
    edges_path = src / "edges.csv"
    if not edges_path.exists():
        raise GraphError(f"graph directory {src} has no edges.csv")
    near: list[tuple[str, str]] = []
    with open(edges_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["relation"] == "near":
                near.append((row["src"], row["dst"]))
    meta_path = src / "meta.json"
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return near, meta
