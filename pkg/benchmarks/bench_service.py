"""Service latency at desk scale: ~10^4 nodes, 32 concurrent clients.

Builds a synthetic snapshot, starts the API via uvicorn, fires concurrent
/v1/risk queries from separate client processes (so client CPU does not
masquerade as server latency) and reports p50/p90/p99.

    python benchmarks/bench_service.py [--nodes 10000] [--clients 32] [--requests 3200]
"""

from __future__ import annotations

import argparse
import datetime as dt
import multiprocessing as mp
import threading
import time

import httpx
import numpy as np
import uvicorn

from asat.gae.model import GaeConfig, train_gae
from asat.graph.ahin import build_ahin
from asat.ingest.records import DemographicRecord, DiseaseRecord, MobilityRecord
from asat.ingest.snapshot import Snapshot
from asat.perception.scoring import PerceptionResult
from asat.risk.assess import Assessor
from asat.service.app import create_app
from asat.service.state import RuntimeState


def synthetic_records(n_nodes: int, rng):
    n_states = 50
    n_counties = max(1, n_nodes // 10)
    n_cities = n_nodes - 1 - n_states - n_counties
    records = [DemographicRecord("N0", "nation", "Nation", None, 300000000, 90.0,
                                 0.16, 0.5, 39.0, -98.0)]

    def rec(geo, level, name, parent, lat, lon):
        return DemographicRecord(geo, level, name, parent,
                                 int(rng.integers(1000, 1000000)),
                                 float(rng.uniform(10, 9000)),
                                 float(rng.uniform(0.05, 0.3)),
                                 float(rng.uniform(0.45, 0.55)), lat, lon)

    lat = rng.uniform(26, 48, n_nodes)
    lon = rng.uniform(-123, -68, n_nodes)
    i = 0
    for s in range(n_states):
        records.append(rec(f"S{s:03d}", "state", f"State{s}", "N0", lat[i], lon[i]))
        i += 1
    for c in range(n_counties):
        records.append(rec(f"C{c:05d}", "county", f"County{c}",
                           f"S{c % n_states:03d}", lat[i], lon[i]))
        i += 1
    for t in range(n_cities):
        records.append(rec(f"T{t:06d}", "city", f"City{t}",
                           f"C{t % n_counties:05d}", lat[i], lon[i]))
        i += 1
    return records


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--nodes", type=int, default=10000)
    parser.add_argument("--clients", type=int, default=32)
    parser.add_argument("--requests", type=int, default=3200)
    parser.add_argument("--port", type=int, default=8731)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    date = dt.date(2020, 3, 22)
    print(f"building snapshot with {args.nodes} nodes ...")
    records = synthetic_records(args.nodes, rng)
    disease = []
    mobility = []
    perceptions = {}
    for r in records:
        if r.level == "nation":
            continue
        confirmed = int(rng.integers(0, 400))
        deaths = int(rng.integers(0, confirmed // 10 + 1))
        disease.append(DiseaseRecord(date, r.geo_id, "", confirmed,
                                     int(rng.integers(0, 60)), deaths,
                                     deaths / confirmed if confirmed else 0.0))
        mobility.append(MobilityRecord(r.geo_id, date, int(rng.integers(1, 6))))
        perceptions[(r.geo_id, date)] = float(rng.uniform(0, 1))

    t0 = time.perf_counter()
    ahin = build_ahin(records, disease, mobility, perceptions, k=2)
    print(f"graph built in {time.perf_counter()-t0:.1f}s "
          f"({ahin.near_edge_count} near edges)")
    t0 = time.perf_counter()
    trained = train_gae(ahin, GaeConfig(epochs=20, seed=0, train_date=date))
    print(f"encoder trained in {time.perf_counter()-t0:.1f}s")

    state = RuntimeState(
        snapshot=Snapshot(records, disease, mobility, []),
        ahin=ahin,
        assessor=Assessor(ahin, trained.model, perceptions=perceptions),
        perception_sources={},
    )
    app = create_app(state)
    config = uvicorn.Config(app, host="127.0.0.1", port=args.port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)

    base = f"http://127.0.0.1:{args.port}"
    min_lat, min_lon, max_lat, max_lon = ahin.bbox
    queries = [(float(rng.uniform(min_lat, max_lat)),
                float(rng.uniform(min_lon, max_lon)),)
               for _ in range(args.requests)]
    # warm the per-date encoding cache
    httpx.get(f"{base}/v1/risk", params={"lat": queries[0][0], "lon": queries[0][1],
                                         "date": date.isoformat()})

    n_procs = min(args.clients, 8)
    threads_per_proc = max(1, args.clients // n_procs)
    chunks = [queries[i :: args.clients] for i in range(args.clients)]
    groups = [chunks[p * threads_per_proc : (p + 1) * threads_per_proc]
              for p in range(n_procs)]
    ctx = mp.get_context("fork")
    with ctx.Pool(processes=n_procs) as pool:
        t0 = time.perf_counter()
        results = pool.starmap(
            _client_worker, [(base, group, date.isoformat()) for group in groups])
        wall = time.perf_counter() - t0
    latencies = [v for chunk in results for v in chunk]

    lat_ms = np.array(latencies) * 1000
    print(f"{len(latencies)} requests, {args.clients} clients, "
          f"{len(latencies)/wall:.0f} req/s")
    print(f"latency p50 {np.percentile(lat_ms, 50):.1f} ms, "
          f"p90 {np.percentile(lat_ms, 90):.1f} ms, "
          f"p99 {np.percentile(lat_ms, 99):.1f} ms")
    server.should_exit = True
    thread.join(timeout=5)


def _client_worker(base: str, chunks, date_iso: str):
    """One process driving several closed-loop clients (one thread each)."""
    local: list[float] = []
    lock = threading.Lock()

    def drive(chunk):
        samples = []
        with httpx.Client(base_url=base, timeout=30.0) as client:
            for lat, lon in chunk:
                t0 = time.perf_counter()
                r = client.get("/v1/risk",
                               params={"lat": lat, "lon": lon, "date": date_iso})
                samples.append(time.perf_counter() - t0)
                assert r.status_code == 200, r.text
        with lock:
            local.extend(samples)

    threads = [threading.Thread(target=drive, args=(chunk,)) for chunk in chunks]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return local


if __name__ == "__main__":
    main()
