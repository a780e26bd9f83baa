"""Command-line entry point: ingest | build-graph | train | assess | serve
| export-datasets.

Exit codes: 0 success, 1 runtime failure, 2 usage error (including a
missing upstream artifact, which is named in the message).
"""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import click

from .gae.model import GaeModel
from .graph.ahin import build_ahin
from .graph.io import write_graph
from .ingest.parsers import (
    DEMOGRAPHICS_HEADER,
    DISEASE_HEADER,
    MOBILITY_HEADER,
    demographics_rows,
    disease_rows,
    mobility_rows,
    post_lines,
    write_csv,
)
from .ingest.records import IngestError
from .ingest.snapshot import build_snapshot, read_snapshot, write_snapshot
from .manifest import read_manifest, record_stage
from .pipeline import TrainingOptions, run_training
from .risk.weights import RiskError


def _require(path: str | Path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise click.UsageError(f"missing artifact: {what} at {p}")
    return p


def _date_option(value: str | None) -> dt.date | None:
    if value is None:
        return None
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise click.UsageError(f"--date must be ISO formatted, got {value!r}")


@click.group()
def cli():
    """Hierarchical community risk indexes from multi-source data."""


@cli.command()
@click.option("--disease", required=True, help="disease CSV feed")
@click.option("--demo", required=True, help="demographics CSV feed")
@click.option("--mobility", required=True, help="mobility CSV feed")
@click.option("--posts", required=True, help="posts JSONL feed")
@click.option("--out", required=True, help="snapshot output directory")
@click.option("--manifest", default=None, help="manifest file to update")
def ingest(disease, demo, mobility, posts, out, manifest):
    """Parse and validate the four feeds into a snapshot directory."""
    for label, path in (("disease feed", disease), ("demographics feed", demo),
                        ("mobility feed", mobility), ("posts feed", posts)):
        _require(path, label)
    try:
        snapshot = build_snapshot(disease, demo, mobility, posts)
    except IngestError as exc:
        raise click.ClickException(str(exc))
    write_snapshot(snapshot, out)
    rejected = sum(len(r) for r in snapshot.rejections.values())
    click.echo(f"snapshot written to {out}: "
               f"{len(snapshot.disease)} disease rows, "
               f"{len(snapshot.demographics)} areas, "
               f"{len(snapshot.mobility)} mobility rows, "
               f"{len(snapshot.posts)} posts, {rejected} rejections")
    record_stage(manifest, "ingest", {
        "disease": str(disease), "demo": str(demo), "mobility": str(mobility),
        "posts": str(posts), "out": str(out)}, out)


@cli.command("build-graph")
@click.option("--snapshot", required=True, help="snapshot directory from ingest")
@click.option("--k", default=2, show_default=True, help="near neighbors per node")
@click.option("--metric", default="euclidean", show_default=True,
              type=click.Choice(["euclidean", "haversine"]))
@click.option("--out", default=None, help="graph output directory [default: SNAPSHOT/graph]")
@click.option("--manifest", default=None)
def build_graph(snapshot, k, metric, out, manifest):
    """Build the typed area graph and export the node/edge tables."""
    snap_dir = _require(snapshot, "snapshot directory")
    out = Path(out) if out else snap_dir / "graph"
    try:
        snap = read_snapshot(snap_dir)
        ahin = build_ahin(snap.demographics, snap.disease, snap.mobility,
                          k=k, metric=metric)
    except (IngestError, ValueError) as exc:
        raise click.ClickException(str(exc))
    write_graph(ahin, out)
    click.echo(f"graph written to {out}: {ahin.node_count} nodes, "
               f"{ahin.include_edge_count} include edges, "
               f"{ahin.near_edge_count} near edges")
    record_stage(manifest, "build-graph", {"k": str(k), "metric": metric,
                                           "out": str(out)}, out)


@cli.command()
@click.option("--snapshot", required=True)
@click.option("--graph", default=None, help="graph directory [default: SNAPSHOT/graph]")
@click.option("--out", default=None, help="models output directory [default: SNAPSHOT/models]")
@click.option("--component", "components", multiple=True,
              type=click.Choice(["all", "cgan", "perception", "gae"]),
              default=("all",), show_default=True)
@click.option("--seed", default=None, type=int,
              help="randomness seed [default: manifest seed, else 0]")
@click.option("--manifest", default=None)
def train(snapshot, graph, out, components, seed, manifest):
    """Train the perception scorer, the conditional generator and the
    graph auto-encoder; write model checkpoints."""
    snap_dir = _require(snapshot, "snapshot directory")
    graph_dir = _require(graph or snap_dir / "graph", "graph directory (run build-graph)")
    out = Path(out) if out else snap_dir / "models"
    if seed is None:
        entries = read_manifest(manifest) if manifest else {}
        seed = int(entries.get("seed", "0"))
    wanted = ("perception", "cgan", "gae") if "all" in components else tuple(components)
    try:
        snap = read_snapshot(snap_dir)
        result = run_training(snap, graph_dir, out,
                              TrainingOptions(seed=seed, components=wanted))
    except (IngestError, ValueError) as exc:
        raise click.ClickException(str(exc))
    for stage, reason in result.skipped.items():
        click.echo(f"skipped {stage}: {reason}", err=True)
    click.echo(f"models written to {out} (seed {seed})")
    record_stage(manifest, "train", {"seed": str(seed),
                                     "components": "+".join(wanted),
                                     "out": str(out)}, out)


@cli.command()
@click.option("--snapshot", required=True, envvar="ASAT_SNAPSHOT")
@click.option("--graph", default=None, envvar="ASAT_GRAPH")
@click.option("--models", default=None, envvar="ASAT_MODELS",
              help="models directory [default: SNAPSHOT/models]")
@click.option("--gamma", default=None, envvar="ASAT_GAMMA", help="weight profile CSV")
@click.option("--lat", type=float, default=None)
@click.option("--lon", type=float, default=None)
@click.option("--geo", default=None, help="area id (alternative to --lat/--lon)")
@click.option("--date", default=None, help="ISO date [default: latest ingested]")
@click.option("--stale-ok", is_flag=True, default=False)
def assess(snapshot, graph, models, gamma, lat, lon, geo, date, stale_ok):
    """Print the hierarchical risk assessment for a point or an area."""
    from .service.state import load_runtime

    snap_dir = _require(snapshot, "snapshot directory")
    graph_dir = _require(graph or snap_dir / "graph", "graph directory (run build-graph)")
    models_dir = _require(models or snap_dir / "models", "models directory (run train)")
    if gamma:
        _require(gamma, "gamma profile")
    if geo is None and (lat is None or lon is None):
        raise click.UsageError("provide either --geo or both --lat and --lon")
    try:
        runtime = load_runtime(snap_dir, graph_dir, models_dir, gamma_path=gamma)
        when = _date_option(date)
        if geo is not None:
            assessment = runtime.assessor.assess_geo(geo, when, stale_ok=stale_ok)
        else:
            assessment = runtime.assessor.assess_point(lat, lon, when, stale_ok=stale_ok)
    except RiskError as exc:
        raise click.ClickException(str(exc))

    header = f"{'level':<8} {'area':<24} {'index':>7} {'aware':>7} {'density':>9} {'traffic':>7}"
    click.echo(f"assessment for {assessment.date.isoformat()}"
               + (" (stale: no data for this date)" if assessment.stale else ""))
    click.echo(header)
    click.echo("-" * len(header))
    for lv in assessment.levels:
        click.echo(f"{lv.level:<8} {lv.name:<24} {lv.index:>7.3f} "
                   f"{lv.perception:>7.3f} {lv.density:>9.1f} {lv.mobility:>7.1f}")
    body = {
        "date": assessment.date.isoformat(),
        "stale": assessment.stale,
        "levels": [
            {"level": lv.level, "geo_id": lv.geo_id, "name": lv.name,
             "index": lv.index, "perception": lv.perception,
             "density": lv.density, "mobility": lv.mobility}
            for lv in assessment.levels
        ],
    }
    if assessment.location:
        body["location"] = {
            "nearest_city": assessment.location.nearest_city,
            "distance_km": assessment.location.distance_km,
            "index": assessment.location.index,
            "density": assessment.location.density,
        }
    click.echo(json.dumps(body, sort_keys=True))


@cli.command()
@click.option("--bind", default="127.0.0.1:8000", show_default=True, envvar="ASAT_BIND")
@click.option("--snapshot", required=True, envvar="ASAT_SNAPSHOT")
@click.option("--graph", default=None, envvar="ASAT_GRAPH")
@click.option("--models", default=None, envvar="ASAT_MODELS")
@click.option("--gamma", default=None, envvar="ASAT_GAMMA")
@click.option("--pois", default=None, envvar="ASAT_POIS", help="POI CSV file")
@click.option("--workers", default=1, show_default=True,
              help="worker processes; each loads its own copy of the snapshot")
def serve(bind, snapshot, graph, models, gamma, pois, workers):
    """Serve the HTTP API over a loaded snapshot."""
    import os

    import uvicorn

    from .service.app import create_app
    from .service.state import load_runtime

    snap_dir = _require(snapshot, "snapshot directory")
    graph_dir = _require(graph or snap_dir / "graph", "graph directory (run build-graph)")
    models_dir = _require(models or snap_dir / "models", "models directory (run train)")
    if gamma:
        _require(gamma, "gamma profile")
    if pois:
        _require(pois, "POI file")
    host, _, port = bind.partition(":")
    host = host or "127.0.0.1"
    port = int(port or 8000)
    if workers > 1:
        os.environ["ASAT_SNAPSHOT"] = str(snap_dir)
        os.environ["ASAT_GRAPH"] = str(graph_dir)
        os.environ["ASAT_MODELS"] = str(models_dir)
        os.environ["ASAT_GAMMA"] = str(gamma or "")
        os.environ["ASAT_POIS"] = str(pois or "")
        uvicorn.run("asat.service.app:app_from_env", factory=True,
                    host=host, port=port, workers=workers, log_level="warning")
        return
    try:
        state = load_runtime(snap_dir, graph_dir, models_dir,
                             gamma_path=gamma, pois_path=pois)
    except (IngestError, ValueError) as exc:
        raise click.ClickException(str(exc))
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")


@cli.command("export-datasets")
@click.option("--snapshot", required=True)
@click.option("--graph", default=None)
@click.option("--out", required=True)
@click.option("--manifest", default=None)
def export_datasets(snapshot, graph, out, manifest):
    """Write the four public dataset files and print their shapes."""
    snap_dir = _require(snapshot, "snapshot directory")
    graph_dir = _require(graph or snap_dir / "graph", "graph directory (run build-graph)")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    snap = read_snapshot(snap_dir)
    from .graph.io import read_graph_edges

    near_edges, meta = read_graph_edges(graph_dir)
    ahin = build_ahin(snap.demographics, snap.disease, snap.mobility,
                      k=int(meta.get("k", 2)), near_edges=near_edges)

    write_csv(out / "db1_disease.csv", DISEASE_HEADER, disease_rows(snap.disease))
    write_csv(out / "db2_demographics.csv", DEMOGRAPHICS_HEADER,
              demographics_rows(snap.demographics))
    write_csv(out / "db2_mobility.csv", MOBILITY_HEADER, mobility_rows(snap.mobility))
    with open(out / "db3_posts.jsonl", "w", encoding="utf-8") as fh:
        for line in post_lines(snap.posts):
            fh.write(line + "\n")
    write_csv(out / "db3_post_locations.csv", ["post_id", "geo_id", "ambiguous"],
              [[pid, geo, "1" if amb else "0"] for pid, geo, amb in snap.post_locations])
    import shutil

    shutil.copyfile(graph_dir / "nodes.csv", out / "db4_nodes.csv")
    shutil.copyfile(graph_dir / "edges.csv", out / "db4_edges.csv")

    counts = {lv: len(ids) for lv, ids in ahin.levels.items()}
    click.echo(f"db1: {len(snap.disease)} disease rows")
    click.echo(f"db2: {len(snap.demographics)} areas, {len(snap.mobility)} mobility rows")
    click.echo(f"db3: {len(snap.posts)} posts by "
               f"{len({p.author_hash for p in snap.posts})} users, "
               f"{len(snap.post_locations)} extracted locations")
    click.echo(f"db4: {ahin.node_count} nodes ({counts['nation']} nation, "
               f"{counts['state']} states, {counts['county']} counties, "
               f"{counts['city']} cities) and "
               f"{ahin.include_edge_count + ahin.near_edge_count} edges "
               f"({ahin.include_edge_count} include, {ahin.near_edge_count} near)")
    record_stage(manifest, "export-datasets", {"out": str(out)}, out)


def main():
    cli(auto_envvar_prefix="ASAT")


if __name__ == "__main__":
    main()
