"""Training-stage orchestration shared by the CLI and the test suite."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gae.model import GaeConfig, GaeModel, TrainedGae, train_gae
from .graph.ahin import Ahin, build_ahin
from .graph.io import read_graph_edges
from .ingest.snapshot import Snapshot
from .perception.cgan import CganConfig, CganPair, train_cgan
from .perception.embedding import HashedEmbedder
from .perception.lexicon import awareness_score, default_lexicon
from .perception.model import (
    MIN_TRAINING_POSTS,
    PerceptionConfig,
    PerceptionModel,
    train_perception,
)
from .perception.scoring import (
    REAL_POST_THRESHOLD,
    area_condition,
    compute_perceptions,
    posts_by_area_date,
    write_perceptions,
)

MIN_CGAN_PAIRS = 200


@dataclass
class TrainingOptions:
    seed: int = 0
    embed_dim: int = 32
    synth_count: int = 16
    real_threshold: int = REAL_POST_THRESHOLD
    components: tuple[str, ...] = ("perception", "cgan", "gae")
    cgan_epochs: int = 200
    gae_epochs: int = 200
    gae_lr: float = 1e-2


@dataclass
class TrainingResult:
    perception_model: PerceptionModel | None
    cgan: CganPair | None
    gae: TrainedGae | None
    ahin: Ahin
    skipped: dict[str, str] = field(default_factory=dict)
    log: list[tuple[str, int, str, float]] = field(default_factory=list)


def run_training(snapshot: Snapshot, graph_dir: str | Path, out_dir: str | Path,
                 options: TrainingOptions | None = None) -> TrainingResult:
    options = options or TrainingOptions()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    near_edges, meta = read_graph_edges(graph_dir)
    base_ahin = build_ahin(
        snapshot.demographics, snapshot.disease, snapshot.mobility,
        perceptions=None, k=int(meta.get("k", 2)),
        metric=str(meta.get("metric", "euclidean")), near_edges=near_edges)

    embedder = HashedEmbedder(dim=options.embed_dim, seed=options.seed)
    lexicon = default_lexicon()
    result = TrainingResult(None, None, None, base_ahin)

    texts = [p.title + " " + p.body for p in snapshot.posts]
    embeddings = embedder.embed_many(texts)
    labels = np.array([awareness_score(t, lexicon) for t in texts])

    if "perception" in options.components:
        if len(texts) >= MIN_TRAINING_POSTS:
            model = train_perception(embeddings, labels, PerceptionConfig(
                embed_dim=options.embed_dim, seed=options.seed))
            model.save(out / "perception.csv")
            result.perception_model = model
            for i, loss in enumerate(model.losses):
                result.log.append(("perception", i, "mse", loss))
            result.log.append(("perception", len(model.losses), "holdout_mae",
                               model.holdout_mae))
        else:
            result.skipped["perception"] = (
                f"{len(texts)} posts < {MIN_TRAINING_POSTS}; lexicon scoring only")

    if "cgan" in options.components:
        by_post = {p.post_id: i for i, p in enumerate(snapshot.posts)}
        pair_embs, pair_conds = [], []
        for post_id, geo_id, _amb in snapshot.post_locations:
            idx = by_post.get(post_id)
            if idx is None:
                continue
            post = snapshot.posts[idx]
            date = dt.datetime.fromtimestamp(post.created, tz=dt.timezone.utc).date()
            pair_embs.append(embeddings[idx])
            pair_conds.append(area_condition(base_ahin, geo_id, date))
        if len(pair_embs) >= MIN_CGAN_PAIRS:
            cgan = train_cgan(np.array(pair_embs), np.array(pair_conds), CganConfig(
                embed_dim=options.embed_dim, cond_dim=10, seed=options.seed,
                epochs=options.cgan_epochs))
            cgan.save(out / "cgan.csv")
            result.cgan = cgan
            for i, (dl, gl) in enumerate(zip(cgan.d_losses, cgan.g_losses)):
                result.log.append(("cgan", i, "d_loss", dl))
                result.log.append(("cgan", i, "g_loss", gl))
        else:
            result.skipped["cgan"] = (
                f"{len(pair_embs)} (embedding, condition) pairs < {MIN_CGAN_PAIRS}")

    perceptions = compute_perceptions(
        base_ahin, snapshot, result.cgan, result.perception_model,
        m=options.synth_count, threshold=options.real_threshold, seed=options.seed)
    write_perceptions(out / "perceptions.csv", perceptions)

    enriched = build_ahin(
        snapshot.demographics, snapshot.disease, snapshot.mobility,
        {key: res.value for key, res in perceptions.items()},
        k=int(meta.get("k", 2)), metric=str(meta.get("metric", "euclidean")),
        near_edges=near_edges)
    result.ahin = enriched

    if "gae" in options.components:
        trained = train_gae(enriched, GaeConfig(
            epochs=options.gae_epochs, lr=options.gae_lr, seed=options.seed))
        trained.model.save(out)
        result.gae = trained
        for i, loss in enumerate(trained.losses):
            result.log.append(("gae", i, "bce", loss))
    else:
        # keep load_runtime working even when only perception parts retrain
        GaeModel(seed=options.seed).save(out)

    log_lines = ["stage,epoch,metric,value"]
    log_lines += [f"{s},{e},{m_},{v!r}" for s, e, m_, v in result.log]
    (out / "training_log.csv").write_text("\n".join(log_lines) + "\n", encoding="utf-8")
    return result
