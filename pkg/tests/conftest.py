import datetime as dt
from pathlib import Path

import numpy as np
import pytest

from asat.ingest.records import DemographicRecord, DiseaseRecord, MobilityRecord

FIXTURES = Path(__file__).parent / "fixtures" / "cli"


def demo(geo_id, level, name, parent, lat, lon, population=10000, density=100.0,
         over65=0.15, female=0.5):
    return DemographicRecord(
        geo_id=geo_id, level=level, name=name, parent_geo_id=parent,
        population=population, pop_density=density, pct_over_65=over65,
        pct_female=female, lat=lat, lon=lon,
    )


def mini_us_demographics():
    """Small gazetteer with real-ish names/coords used across tests."""
    return [
        demo("US", "nation", "United States", None, 39.0, -98.0, 328000000, 93.0),
        demo("39", "state", "Ohio", "US", 40.4173, -82.9071, 11689100, 287.0),
        demo("42", "state", "Pennsylvania", "US", 40.5908, -77.2098, 12801989, 286.0),
        demo("30", "state", "Montana", "US", 46.8797, -110.3626, 1068778, 7.4),
        demo("39035", "county", "Cuyahoga", "39", 41.4339, -81.6758, 1235072, 2724.0,
             over65=0.18, female=0.52),
        demo("39049", "county", "Franklin", "39", 39.9694, -83.0082, 1316756, 2471.0),
        demo("39113", "county", "Montgomery", "39", 39.7549, -84.2906, 531687, 1152.0),
        demo("42091", "county", "Montgomery", "42", 40.2115, -75.3679, 830915, 1722.0),
        demo("42101", "county", "Philadelphia", "42", 40.0094, -75.1333, 1584064, 11797.0),
        demo("30111", "county", "Yellowstone", "30", 45.9398, -108.2691, 161300, 61.0),
        demo("3916000", "city", "Cleveland", "39035", 41.4993, -81.6944, 383793, 5107.0,
             over65=0.135, female=0.518),
        demo("3925704", "city", "Euclid", "39035", 41.5931, -81.5268, 47698, 4486.0),
        demo("3918000", "city", "Columbus", "39049", 39.9612, -82.9988, 898553, 4116.0),
        demo("3957916", "city", "Dayton", "39113", 39.7589, -84.1916, 140407, 2534.0),
        demo("4254656", "city", "Norristown", "42091", 40.1215, -75.3399, 34324, 9869.0),
        demo("4260000", "city", "Philadelphia", "42101", 39.9526, -75.1652, 1584064, 11797.0),
        demo("3006550", "city", "Billings", "30111", 45.7833, -108.5007, 109577, 2483.0),
    ]


def mini_us_disease():
    d = dt.date
    rows = [
        # geo_id, date, confirmed, new, deaths
        ("39035", d(2020, 3, 8), 0, 0, 0),
        ("39035", d(2020, 3, 22), 125, 33, 1),
        ("39035", d(2020, 3, 24), 167, 20, 2),
        ("39049", d(2020, 3, 22), 75, 10, 0),
        ("39049", d(2020, 3, 24), 88, 13, 1),
        ("39113", d(2020, 3, 22), 20, 4, 0),
        ("42091", d(2020, 3, 22), 144, 25, 2),
        ("42101", d(2020, 3, 22), 177, 31, 1),
        ("30111", d(2020, 3, 22), 6, 1, 0),
        ("39", d(2020, 3, 22), 564, 100, 8),
        ("42", d(2020, 3, 22), 644, 120, 6),
        ("30", d(2020, 3, 22), 34, 5, 0),
    ]
    return [
        DiseaseRecord(
            date=date, geo_id=geo, state="", confirmed=c, new_cases=n, deaths=x,
            fatality_rate=(x / c if c else 0.0),
        )
        for geo, date, c, n, x in rows
    ]


def mini_us_mobility():
    d = dt.date
    rows = [
        ("3916000", d(2020, 3, 22), 3),
        ("3916000", d(2020, 3, 24), 3),
        ("3925704", d(2020, 3, 22), 2),
        ("3918000", d(2020, 3, 22), 4),
        ("4254656", d(2020, 3, 22), 2),
        ("4260000", d(2020, 3, 22), 5),
        ("3006550", d(2020, 3, 22), 1),
        ("39035", d(2020, 3, 22), 3),
        ("39049", d(2020, 3, 22), 4),
    ]
    return [MobilityRecord(geo_id=g, date=date, level=lv) for g, date, lv in rows]


def random_gazetteer(rng, n_states, counties_per_state, cities_per_county,
                     lat_range=(30.0, 48.0), lon_range=(-120.0, -75.0)):
    """Synthetic hierarchy with uniform random coordinates."""
    records = [demo("N0", "nation", "Testland", None, 39.0, -98.0)]
    for s in range(n_states):
        sid = f"S{s:02d}"
        records.append(demo(sid, "state", f"State {s}", "N0",
                            rng.uniform(*lat_range), rng.uniform(*lon_range)))
        for c in range(counties_per_state):
            cid = f"{sid}C{c:02d}"
            records.append(demo(cid, "county", f"County {s}-{c}", sid,
                                rng.uniform(*lat_range), rng.uniform(*lon_range),
                                population=int(rng.integers(1000, 1000000)),
                                density=float(rng.uniform(10, 5000))))
            for t in range(cities_per_county):
                tid = f"{cid}T{t:02d}"
                records.append(demo(tid, "city", f"City {s}-{c}-{t}", cid,
                                    rng.uniform(*lat_range), rng.uniform(*lon_range),
                                    population=int(rng.integers(500, 500000)),
                                    density=float(rng.uniform(10, 9000))))
    return records


def planted_cluster_inputs(rng_seed=11, cities_per_county=30, sigma=0.55, spread=0.6):
    """Three geographic city clusters whose features localize position.

    Each of nine anchor points drives exactly one feature dimension (as an
    RBF of distance), so nearby cities share feature support and far-apart
    cities are near-orthogonal after normalization.
    """
    rng = np.random.default_rng(rng_seed)
    date = dt.date(2020, 3, 22)
    centers = [(35.0, -100.0), (42.0, -90.0), (37.0, -80.0)]
    offsets = [(0.7, 0.0), (-0.6, 0.6), (-0.2, -0.7)]
    anchors = [(clat + dy, clon + dx) for clat, clon in centers for dy, dx in offsets]

    def rbf(lat, lon, anchor):
        return float(np.exp(-((lat - anchor[0]) ** 2 + (lon - anchor[1]) ** 2)
                            / (2 * sigma**2)))

    records = [
        demo("N", "nation", "Nation", None, 38.0, -90.0),
        demo("S0", "state", "State", "N", 38.0, -90.0, population=5000000, density=150.0),
    ]
    disease, mobility, perceptions = [], [], {}
    for c, (clat, clon) in enumerate(centers):
        cid = f"C{c}"
        records.append(demo(cid, "county", f"County{c}", "S0", clat, clon,
                            population=100000 + 9000 * c, density=500.0 + 120 * c))
        for t in range(cities_per_county):
            lat = clat + rng.normal(0, spread)
            lon = clon + rng.normal(0, spread)
            tid = f"{cid}T{t:02d}"
            p = [rbf(lat, lon, a) for a in anchors]
            confirmed = int(round(500 * p[0])) + 1
            rate = 0.1 * p[2] + 0.01 * p[1]
            deaths = min(int(round(confirmed * rate)), confirmed)
            disease.append(DiseaseRecord(
                date=date, geo_id=tid, state="S0", confirmed=confirmed,
                new_cases=int(round(400 * p[1])), deaths=deaths,
                fatality_rate=deaths / confirmed))
            records.append(demo(
                tid, "city", f"City{c}{t}", cid, lat, lon,
                population=int(round(20000 + 500000 * p[3])),
                density=100.0 + 6000.0 * p[4],
                over65=float(np.clip(0.05 + 0.6 * p[5], 0, 1)),
                female=float(np.clip(0.2 + 0.6 * p[6], 0, 1))))
            mobility.append(MobilityRecord(
                geo_id=tid, date=date, level=int(np.clip(1 + round(4 * p[7]), 1, 5))))
            perceptions[(tid, date)] = float(np.clip(1.1 * p[8], 0, 1))
    return records, disease, mobility, perceptions, date


@pytest.fixture
def mini_demo():
    return mini_us_demographics()


@pytest.fixture
def mini_ahin():
    from asat.graph import build_ahin

    return build_ahin(
        mini_us_demographics(), mini_us_disease(), mini_us_mobility(),
        perceptions=None, k=2,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20200322)


@pytest.fixture(scope="session")
def pipeline_dirs(tmp_path_factory):
    """Bundled fixture run once through ingest -> graph -> train."""
    from asat.graph import build_ahin as _build
    from asat.graph.io import write_graph
    from asat.ingest.snapshot import build_snapshot, read_snapshot, write_snapshot
    from asat.pipeline import TrainingOptions, run_training

    base = tmp_path_factory.mktemp("pipeline")
    snap_dir = base / "snap"
    snapshot = build_snapshot(
        FIXTURES / "disease.csv", FIXTURES / "demographics.csv",
        FIXTURES / "mobility.csv", FIXTURES / "posts.jsonl")
    write_snapshot(snapshot, snap_dir)
    snap = read_snapshot(snap_dir)
    ahin = _build(snap.demographics, snap.disease, snap.mobility, k=2)
    write_graph(ahin, snap_dir / "graph")
    run_training(snap, snap_dir / "graph", snap_dir / "models",
                 TrainingOptions(seed=42))
    return {
        "snapshot": snap_dir,
        "graph": snap_dir / "graph",
        "models": snap_dir / "models",
        "fixtures": FIXTURES,
    }
