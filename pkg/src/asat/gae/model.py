"""Graph auto-encoder over the area graph.

One trainable d x d matrix per relation type shapes the attention; the
decoder reconstructs nearness edges from encoded representations. Training
minimizes binary cross-entropy over the near edges against an equal count
of sampled same-level non-edges, with analytic gradients through the
attention softmax.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import kernels
from ..graph.ahin import Ahin
from ..graph.features import FEATURE_DIM
from ..graph.metapath import GUIDING_PATHS
from ..nn import sigmoid, softplus

RELATIONS = ("include", "near")


class GaeError(ValueError):
    pass


@dataclass
class GaeConfig:
    epochs: int = 200
    lr: float = 1e-2
    seed: int = 0
    holdout_fraction: float = 0.0
    train_date: dt.date | None = None
    init_scale: float = 0.1


@dataclass
class LevelBatch:
    """CSR neighbor layout for one hierarchy level on one date."""

    ids: list[str]
    feats: np.ndarray          # (n, d) normalized input features
    indptr: np.ndarray         # (n+1,)
    nbr_idx: np.ndarray        # flat within-level neighbor indices
    row_idx: np.ndarray        # flat source row per entry
    relation: str | None


def _level_batch(ahin: Ahin, level: str, date: dt.date,
                 adjacency: dict[str, list[str]]) -> LevelBatch:
    ids = ahin.levels[level]
    feats = ahin.features.normalized_matrix(level, date)
    pos = {g: i for i, g in enumerate(ids)}
    indptr = np.zeros(len(ids) + 1, dtype=np.int64)
    nbr_idx: list[int] = []
    row_idx: list[int] = []
    path = GUIDING_PATHS.get(level)
    relation = path.final_relation if path is not None else None
    for i, geo in enumerate(ids):
        if relation is not None:
            usable = adjacency[geo]
            nbr_idx.extend(pos[n] for n in usable)
            row_idx.extend([i] * len(usable))
        indptr[i + 1] = len(nbr_idx)
    return LevelBatch(
        ids=ids,
        feats=feats,
        indptr=indptr,
        nbr_idx=np.array(nbr_idx, dtype=np.int64),
        row_idx=np.array(row_idx, dtype=np.int64),
        relation=relation,
    )


def _encode_level(batch: LevelBatch, R: np.ndarray):
    """Encoded matrix plus the attention weights (kept for backprop)."""
    if batch.nbr_idx.size == 0:
        return batch.feats.copy(), np.zeros(0)
    scores = kernels.edge_bilinear(
        batch.feats[batch.row_idx], R, batch.feats[batch.nbr_idx])
    weights = kernels.segment_softmax(scores, batch.indptr)
    agg = kernels.segment_weighted_sum(weights, batch.feats[batch.nbr_idx], batch.indptr)
    has_nbrs = np.diff(batch.indptr) > 0
    encoded = batch.feats.copy()
    encoded[has_nbrs] = (batch.feats[has_nbrs] + agg[has_nbrs]) / 2.0
    return encoded, weights


class GaeModel:
    """Relation matrices plus encode/decode over a built graph."""

    def __init__(self, relations: dict[str, np.ndarray] | None = None,
                 dim: int = FEATURE_DIM, seed: int = 0, init_scale: float = 0.1,
                 trained: bool = True):
        if relations is None:
            rng = np.random.default_rng(seed)
            relations = {
                name: init_scale * rng.standard_normal((dim, dim)) for name in RELATIONS
            }
        self.relations = relations
        self.dim = dim
        self.trained = trained

    def encode_all(self, ahin: Ahin, date: dt.date,
                   adjacency: dict[str, list[str]] | None = None) -> dict[str, np.ndarray]:
        """Encoded representation per node; an untrained model is a passthrough."""
        out: dict[str, np.ndarray] = {}
        adjacency = adjacency if adjacency is not None else ahin.near
        for level in ("nation", "state", "county", "city"):
            ids = ahin.levels[level]
            if not ids:
                continue
            batch = _level_batch(ahin, level, date, adjacency)
            if not self.trained or batch.relation is None:
                encoded = batch.feats
            else:
                encoded, _ = _encode_level(batch, self.relations[batch.relation])
            for i, geo in enumerate(ids):
                out[geo] = encoded[i]
        return out

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, matrix in sorted(self.relations.items()):
            lines = [f"relation,{name}", f"d_a,{matrix.shape[0]}"]
            lines += [",".join(repr(float(v)) for v in row) for row in matrix]
            (directory / f"relation_{name}.csv").write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "GaeModel":
        directory = Path(directory)
        relations: dict[str, np.ndarray] = {}
        for name in RELATIONS:
            path = directory / f"relation_{name}.csv"
            if not path.exists():
                raise GaeError(f"missing relation checkpoint {path}")
            lines = path.read_text().splitlines()
            if not lines[0].startswith("relation,") or not lines[1].startswith("d_a,"):
                raise GaeError(f"{path}: malformed relation checkpoint header")
            d = int(lines[1].split(",")[1])
            matrix = np.array([[float(v) for v in line.split(",")] for line in lines[2 : 2 + d]])
            if matrix.shape != (d, d):
                raise GaeError(f"{path}: expected a {d}x{d} matrix")
            relations[name] = matrix
        model = cls(relations=relations, dim=next(iter(relations.values())).shape[0])
        return model


@dataclass
class TrainedGae:
    model: GaeModel
    representations: dict[str, np.ndarray]
    losses: list[float]
    holdout_edges: list[tuple[str, str]] = field(default_factory=list)
    train_date: dt.date | None = None


def _pair_levels(ahin: Ahin) -> list[str]:
    return [lv for lv in ("state", "county", "city") if len(ahin.levels[lv]) >= 2]


def _sample_negatives(ahin: Ahin, count: int, forbidden: set[frozenset[str]],
                      rng: np.random.Generator) -> list[tuple[str, str]]:
    """Uniform same-level non-adjacent pairs, excluding ``forbidden``."""
    levels = _pair_levels(ahin)
    weights = np.array([len(ahin.levels[lv]) * (len(ahin.levels[lv]) - 1) / 2
                        for lv in levels], dtype=float)
    weights /= weights.sum()
    out: list[tuple[str, str]] = []
    attempts = 0
    while len(out) < count and attempts < count * 200:
        attempts += 1
        level = levels[rng.choice(len(levels), p=weights)]
        ids = ahin.levels[level]
        i, j = rng.choice(len(ids), size=2, replace=False)
        pair = frozenset((ids[i], ids[j]))
        if pair in forbidden:
            continue
        a, b = sorted(pair)
        out.append((a, b))
    return out


def gae_loss_and_grads(ahin: Ahin, model: GaeModel, date: dt.date,
                       positives: list[tuple[str, str]],
                       negatives: list[tuple[str, str]],
                       adjacency: dict[str, list[str]]):
    """Mean BCE over labeled pairs and its gradient w.r.t. each relation matrix."""
    levels = ("state", "county", "city")
    batches = {lv: _level_batch(ahin, lv, date, adjacency) for lv in levels if ahin.levels[lv]}
    encoded: dict[str, tuple[str, int, np.ndarray]] = {}
    enc_cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for lv, batch in batches.items():
        R = model.relations[batch.relation] if batch.relation else None
        enc, weights = _encode_level(batch, R)
        enc_cache[lv] = (enc, weights)
        for i, geo in enumerate(batch.ids):
            encoded[geo] = (lv, i, enc[i])

    pairs = [(a, b, 1.0) for a, b in positives] + [(a, b, 0.0) for a, b in negatives]
    m = len(pairs)
    loss = 0.0
    denc: dict[str, np.ndarray] = {lv: np.zeros_like(enc_cache[lv][0]) for lv in batches}
    for a, b, y in pairs:
        lv_a, ia, ea = encoded[a]
        lv_b, ib, eb = encoded[b]
        s = float(ea @ eb)
        loss += softplus(np.array([-s]))[0] if y == 1.0 else softplus(np.array([s]))[0]
        ds = (float(sigmoid(np.array([s]))[0]) - y) / m
        denc[lv_a][ia] += ds * eb
        denc[lv_b][ib] += ds * ea
    loss /= m

    grads = {name: np.zeros_like(mat) for name, mat in model.relations.items()}
    for lv, batch in batches.items():
        if batch.nbr_idx.size == 0 or batch.relation is None:
            continue
        _, weights = enc_cache[lv]
        dagg = denc[lv] / 2.0  # d loss / d aggregate, rows without neighbors unused
        # d loss / d weight_e = dagg[row_e] . feats[nbr_e]
        dw = np.einsum("ed,ed->e", dagg[batch.row_idx], batch.feats[batch.nbr_idx])
        # softmax backward within each segment
        wdw = weights * dw
        sums_per_entry = np.zeros(len(weights))
        for i in range(len(batch.ids)):
            lo, hi = batch.indptr[i], batch.indptr[i + 1]
            if lo < hi:
                sums_per_entry[lo:hi] = wdw[lo:hi].sum()
        dscores = weights * (dw - sums_per_entry)
        # dR += sum_e dscore_e * outer(feats[row_e], feats[nbr_e])
        grads[batch.relation] += batch.feats[batch.row_idx].T @ (
            dscores[:, None] * batch.feats[batch.nbr_idx])
    return loss, grads


def train_gae(ahin: Ahin, config: GaeConfig | None = None) -> TrainedGae:
    """Fit the relation matrices by link reconstruction.

    With epochs=0 the model is left untrained and the representations are
    the raw input features.
    """
    config = config or GaeConfig()
    if not ahin.near_edges:
        raise GaeError("graph has no near edges: nothing to reconstruct")
    if len([lv for lv in ("state", "county", "city") if ahin.levels[lv]]) < 1 \
            or len([lv for lv in ahin.levels.values() if lv]) < 2:
        raise GaeError("graph needs at least two populated levels")
    date = config.train_date or (ahin.dates[-1] if ahin.dates else dt.date(1970, 1, 1))
    rng = np.random.default_rng(config.seed)

    edges = list(ahin.near_edges)
    holdout: list[tuple[str, str]] = []
    if config.holdout_fraction > 0:
        n_hold = int(len(edges) * config.holdout_fraction)
        hold_idx = set(rng.choice(len(edges), size=n_hold, replace=False).tolist())
        holdout = [e for i, e in enumerate(edges) if i in hold_idx]
        edges = [e for i, e in enumerate(edges) if i not in hold_idx]
        if not edges:
            raise GaeError("holdout removed every training edge")

    adjacency: dict[str, list[str]] = {g: [] for g in ahin.nodes}
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    for lst in adjacency.values():
        lst.sort()

    model = GaeModel(dim=FEATURE_DIM, seed=config.seed, init_scale=config.init_scale,
                     trained=config.epochs > 0)
    if config.epochs == 0:
        representations = model.encode_all(ahin, date, adjacency)
        return TrainedGae(model, representations, [], holdout, date)

    forbidden = {frozenset(e) for e in ahin.near_edges}
    losses: list[float] = []
    for _ in range(config.epochs):
        negatives = _sample_negatives(ahin, len(edges), forbidden, rng)
        loss, grads = gae_loss_and_grads(ahin, model, date, edges, negatives, adjacency)
        if not np.isfinite(loss):
            raise GaeError(f"training diverged: loss {loss}")
        for name in model.relations:
            model.relations[name] -= config.lr * grads[name]
        losses.append(loss)

    representations = model.encode_all(ahin, date, adjacency)
    return TrainedGae(model, representations, losses, holdout, date)
