"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line
per criterion with the measured values.
"""

import datetime as dt
import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from asat.gae import (
    GaeConfig,
    GaeModel,
    attention_score,
    attention_weights,
    decode_link,
    gae_loss_and_grads,
    train_gae,
)
from asat.graph import build_ahin
from asat.graph.features import DIM_NAMES
from asat.perception.cgan import (
    CganConfig,
    _init_pair,
    discriminator_loss_grads,
    generator_loss_grads,
    train_cgan,
)
from asat.risk import Assessor, GammaProfile, index_of
from asat.service import create_app, load_runtime

from conftest import (
    demo,
    mini_us_demographics,
    mini_us_disease,
    mini_us_mobility,
    planted_cluster_inputs,
    random_gazetteer,
)
from test_cli import run_pipeline
from test_graph import brute_force_knn
from test_perception import TOY_CONFIG, central_diff, max_rel_error, toy_conditional_gaussian
from test_risk import scenario_inputs

MAR22 = dt.date(2020, 3, 22)


def report(name: str, detail: str):
    print(f"\nACCEPTANCE {name}: PASS ({detail})")


def test_feature_fidelity():
    """Worked feature examples reproduced exactly from fixture CSVs, < 1 s."""
    t0 = time.perf_counter()
    ahin = build_ahin(mini_us_demographics(), mini_us_disease(), mini_us_mobility())
    a1 = ahin.feature_vector("39035", MAR22).raw[:4]
    a2 = ahin.feature_vector("3916000", MAR22).raw[4:8]
    elapsed = time.perf_counter() - t0
    assert a1.tolist() == [125.0, 33.0, 1.0, 0.008]
    assert a2.tolist() == [383793.0, 5107.0, 0.135, 0.518]
    assert elapsed < 1.0
    report("feature-fidelity",
           f"a1={a1.tolist()}, a2={a2.tolist()}, {elapsed*1000:.0f} ms")


def test_graph_structure():
    """Node count 1+S+C+K, tree edge count, k-NN equals the brute-force
    oracle on instances up to 200 nodes, all inside 5 s."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    checked = 0
    for states, counties, cities, k in [(3, 2, 3, 2), (5, 3, 2, 3), (8, 4, 1, 2)]:
        records = random_gazetteer(rng, states, counties, cities)
        n_expected = 1 + states + states * counties + states * counties * cities
        assert n_expected <= 200
        ahin = build_ahin(records, k=k)
        assert ahin.node_count == n_expected
        assert ahin.include_edge_count == ahin.node_count - 1
        for level in ("state", "county", "city"):
            cohort = [r for r in records if r.level == level]
            expected = brute_force_knn([r.geo_id for r in cohort],
                                       [r.lat for r in cohort],
                                       [r.lon for r in cohort], k)
            got = [e for e in ahin.near_edges if ahin.level_of(e[0]) == level]
            assert got == expected
            checked += len(expected)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    report("graph-structure",
           f"3 gazetteers, {checked} oracle edges matched, {elapsed:.2f} s")


def test_attention_correctness():
    """Softmax weights sum to 1 within 1e-9 over 1000 random nodes; the
    bilinear form matches an explicit double loop within 1e-12."""
    rng = np.random.default_rng(7)
    R = rng.normal(size=(10, 10))
    worst_sum = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        w = attention_weights(rng.normal(size=10), rng.normal(size=(n, 10)), R)
        worst_sum = max(worst_sum, abs(float(w.sum()) - 1.0))
    assert worst_sum < 1e-9

    worst_bilinear = 0.0
    for _ in range(200):
        a, b = rng.normal(size=10), rng.normal(size=10)
        M = rng.normal(size=(10, 10))
        oracle = sum(a[i] * M[i, j] * b[j] for i in range(10) for j in range(10))
        worst_bilinear = max(worst_bilinear, abs(attention_score(a, M, b) - oracle))
    assert worst_bilinear < 1e-12
    report("attention-correctness",
           f"max |sum-1| = {worst_sum:.2e}, max bilinear err = {worst_bilinear:.2e}")


def test_gradient_checks():
    """Adversarial and encoder gradients match central finite differences
    with max relative error < 1e-4 on networks of at most 10 units."""
    rng = np.random.default_rng(3)
    cfg = CganConfig(embed_dim=3, cond_dim=2, noise_dim=2, hidden=4, seed=0)
    pair = _init_pair(cfg, np.random.default_rng(0))
    real = rng.normal(size=(6, 3))
    fake = rng.normal(size=(6, 3))
    conds = rng.normal(size=(6, 2))
    _, d_analytic = discriminator_loss_grads(pair, real, fake, conds)
    d_numeric = central_diff(
        lambda: discriminator_loss_grads(pair, real, fake, conds)[0],
        pair.discriminator.params())
    d_err = max_rel_error(d_analytic, d_numeric)
    z = rng.normal(size=(6, 2))
    _, g_analytic = generator_loss_grads(pair, z, conds)
    g_numeric = central_diff(
        lambda: generator_loss_grads(pair, z, conds)[0],
        pair.generator.params())
    g_err = max_rel_error(g_analytic, g_numeric)

    records = random_gazetteer(np.random.default_rng(1), 2, 1, 2)  # 9 nodes
    perceptions = {(r.geo_id, MAR22): float(np.random.default_rng(2).uniform())
                   for r in records}
    ahin = build_ahin(records, None, None, perceptions, k=2)
    model = GaeModel(seed=2, init_scale=0.3)
    positives = list(ahin.near_edges)
    cities = ahin.levels["city"]
    negatives = [(cities[0], cities[-1])]
    _, grads = gae_loss_and_grads(ahin, model, MAR22, positives, negatives, ahin.near)
    assert np.abs(grads["near"]).max() > 1e-6  # non-vacuous check
    R = model.relations["near"]
    numeric = np.zeros_like(R)
    eps = 1e-6
    for i in range(R.shape[0]):
        for j in range(R.shape[1]):
            orig = R[i, j]
            R[i, j] = orig + eps
            hi = gae_loss_and_grads(ahin, model, MAR22, positives, negatives, ahin.near)[0]
            R[i, j] = orig - eps
            lo = gae_loss_and_grads(ahin, model, MAR22, positives, negatives, ahin.near)[0]
            R[i, j] = orig
            numeric[i, j] = (hi - lo) / (2 * eps)
    denom = np.maximum(np.abs(grads["near"]) + np.abs(numeric), 1e-8)
    gae_err = float(np.max(np.abs(grads["near"] - numeric) / denom))

    assert d_err < 1e-4 and g_err < 1e-4 and gae_err < 1e-4
    report("gradient-checks",
           f"D err {d_err:.2e}, G err {g_err:.2e}, encoder err {gae_err:.2e}")


def test_gae_quality():
    """Held-out link AUC >= 0.85 on the planted-cluster graph; training
    stays under 60 s single-threaded."""
    from sklearn.metrics import roc_auc_score

    records, disease, mobility, perceptions, date = planted_cluster_inputs()
    ahin = build_ahin(records, disease, mobility, perceptions, k=3)
    t0 = time.perf_counter()
    trained = train_gae(ahin, GaeConfig(
        epochs=200, lr=1e-2, seed=0, holdout_fraction=0.1, train_date=date))
    train_time = time.perf_counter() - t0
    reps = trained.representations
    adjacent = {frozenset(e) for e in ahin.near_edges}
    cities = ahin.levels["city"]
    pos = [decode_link(reps[a], reps[b]) for a, b in trained.holdout_edges]
    neg = []
    neg_rng = np.random.default_rng(99)
    while len(neg) < len(pos):
        i, j = neg_rng.choice(len(cities), size=2, replace=False)
        if frozenset((cities[i], cities[j])) in adjacent:
            continue
        neg.append(decode_link(reps[cities[i]], reps[cities[j]]))
    auc = float(roc_auc_score([1] * len(pos) + [0] * len(neg), pos + neg))
    assert auc >= 0.85
    assert train_time < 60.0
    report("gae-quality", f"AUC {auc:.3f} on {len(pos)} held-out edges, "
                          f"trained in {train_time:.1f} s")


def test_cgan_equilibrium():
    """Conditional 1-D toy: generated means within 0.2 of targets and the
    trained discriminator averages in [0.35, 0.65] on a balanced batch."""
    cond_values, _, _ = toy_conditional_gaussian()
    _, conds, emb = toy_conditional_gaussian()
    pair = train_cgan(emb, conds, TOY_CONFIG)
    gen_rng = np.random.default_rng(123)
    worst = 0.0
    for c in cond_values:
        samples = pair.generate(np.array([c]), 500, gen_rng)
        worst = max(worst, abs(float(samples.mean()) - c))
    assert worst < 0.2

    hold_c = np.repeat(cond_values, 40)[:, None]
    hold_real = (hold_c[:, 0]
                 + 0.1 * np.random.default_rng(5).standard_normal(len(hold_c)))[:, None]
    fake = np.vstack([pair.generate(np.array([c]), 40, gen_rng) for c in cond_values])
    outputs = np.concatenate([pair.discriminate(hold_real, hold_c),
                              pair.discriminate(fake, hold_c)])
    mean_out = float(outputs.mean())
    assert 0.35 <= mean_out <= 0.65
    report("cgan-equilibrium",
           f"worst conditional mean err {worst:.3f}, D mean output {mean_out:.3f}")


def test_risk_semantics():
    """Sign contract under perturbation, ranking invariance under gamma
    scaling, and the scripted first-case scenario jumping strictly."""
    rng = np.random.default_rng(11)
    checks = 0
    for _ in range(50):
        profile = GammaProfile(weights=rng.uniform(0, 1, 10))
        rep = rng.uniform(0.05, 0.95, 10)
        base = index_of(rep, profile)
        for dim, name in enumerate(DIM_NAMES):
            bumped = rep.copy()
            bumped[dim] += 0.05
            delta = index_of(bumped, profile) - base
            assert delta <= 1e-12 if name == "awareness" else delta >= -1e-12
            checks += 1

    records, disease, mobility, days = scenario_inputs()
    ahin = build_ahin(records, disease, mobility, k=2)
    trained = train_gae(ahin, GaeConfig(epochs=20, seed=0, train_date=days[-1]))
    assessor = Assessor(ahin, trained.model)
    series = dict(assessor.compare_dates("T0", days))
    jump = series[days[1]] - series[days[0]]
    assert jump > 0.0
    assert series[days[3]] >= series[days[1]] - 1e-12

    areas = ahin.levels["city"]
    base_idx = [assessor.index_for(g, days[1]) for g in areas]
    scaled = Assessor(ahin, trained.model, profile=assessor.profile.scaled(4.2))
    scaled_idx = [scaled.index_for(g, days[1]) for g in areas]
    assert np.argsort(base_idx).tolist() == np.argsort(scaled_idx).tolist()
    for b, s in zip(base_idx, scaled_idx):
        assert s == pytest.approx(4.2 * b, rel=1e-9)
    report("risk-semantics",
           f"{checks} sign perturbations, first-case jump +{jump:.3f}, "
           f"rankings preserved under gamma scaling")


def test_end_to_end(tmp_path):
    """Full CLI pipeline on the bundled fixture in under 2 minutes, a
    3-level risk chain over HTTP, and a byte-identical rerun."""
    from asat.manifest import sha256_file

    t0 = time.perf_counter()
    snap = run_pipeline(tmp_path / "a")
    pipeline_time = time.perf_counter() - t0
    assert pipeline_time < 120.0

    state = load_runtime(snap, snap / "graph", snap / "models")
    client = TestClient(create_app(state))
    r = client.get("/v1/risk", params={"lat": 41.5045, "lon": -81.6089,
                                       "date": "2020-03-22"})
    assert r.status_code == 200
    body = r.json()
    assert [lv["level"] for lv in body["levels"]] == ["state", "county", "city"]
    assert all(0.0 <= lv["index"] <= 1.0 for lv in body["levels"])

    snap_b = run_pipeline(tmp_path / "b")
    files_a = sorted(p.relative_to(snap) for p in snap.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(snap_b) for p in snap_b.rglob("*") if p.is_file())
    assert files_a == files_b
    mismatches = [str(rel) for rel in files_a
                  if sha256_file(snap / rel) != sha256_file(snap_b / rel)]
    assert mismatches == []
    report("end-to-end",
           f"pipeline {pipeline_time:.1f} s, 3-level chain over HTTP, "
           f"{len(files_a)} artifacts byte-identical on rerun")
