"""Feed-forward scorer mapping post embeddings to awareness in [0,1]."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..nn import Adam, Mlp, load_weights, save_weights

MIN_TRAINING_POSTS = 100


@dataclass
class PerceptionConfig:
    embed_dim: int = 32
    hidden: int = 32
    lr: float = 1e-3
    epochs: int = 150
    batch_size: int = 32
    seed: int = 0
    holdout_fraction: float = 0.2


@dataclass
class PerceptionModel:
    net: Mlp
    config: PerceptionConfig
    holdout_mae: float = float("nan")
    losses: list[float] = field(default_factory=list)

    def predict(self, embeddings: np.ndarray) -> np.ndarray:
        out, _ = self.net.forward(np.atleast_2d(embeddings))
        return out[:, 0]

    def save(self, path: str | Path) -> None:
        arrays = {}
        for i, (w, b) in enumerate(zip(self.net.W, self.net.b)):
            arrays[f"W{i}"] = w
            arrays[f"b{i}"] = b
        save_weights(path, "perception", arrays, {
            "embed_dim": str(self.config.embed_dim),
            "hidden": str(self.config.hidden),
            "holdout_mae": repr(self.holdout_mae),
        })

    @classmethod
    def load(cls, path: str | Path) -> "PerceptionModel":
        model, arrays, meta = load_weights(path)
        if model != "perception":
            raise ValueError(f"{path}: expected a perception checkpoint, got {model!r}")
        config = PerceptionConfig(embed_dim=int(meta["embed_dim"]), hidden=int(meta["hidden"]))
        net = Mlp([config.embed_dim, config.hidden, 1], ["tanh", "sigmoid"],
                  np.random.default_rng(0))
        net.set_params([arrays[f"{n}{i}"] for i in range(2) for n in ("W", "b")])
        return cls(net=net, config=config, holdout_mae=float(meta.get("holdout_mae", "nan")))


def train_perception(embeddings: np.ndarray, labels: np.ndarray,
                     config: PerceptionConfig | None = None) -> PerceptionModel:
    """Fit the scorer to lexicon-derived labels; returns held-out MAE.

    Raises ValueError below 100 labeled posts: callers should fall back
    to direct lexicon scoring instead of training.
    """
    embeddings = np.asarray(embeddings, dtype=float)
    labels = np.asarray(labels, dtype=float).ravel()
    if embeddings.shape[0] < MIN_TRAINING_POSTS:
        raise ValueError(
            f"need at least {MIN_TRAINING_POSTS} labeled embeddings, got "
            f"{embeddings.shape[0]}; fall back to direct lexicon scoring")
    if config is None:
        config = PerceptionConfig(embed_dim=embeddings.shape[1])

    rng = np.random.default_rng(config.seed)
    n = embeddings.shape[0]
    order = rng.permutation(n)
    n_holdout = max(1, int(n * config.holdout_fraction))
    hold_idx, train_idx = order[:n_holdout], order[n_holdout:]

    net = Mlp([config.embed_dim, config.hidden, 1], ["tanh", "sigmoid"], rng)
    adam = Adam(net.params(), lr=config.lr)
    model = PerceptionModel(net=net, config=config)

    for _ in range(config.epochs):
        epoch_order = rng.permutation(train_idx)
        epoch_loss, batches = 0.0, 0
        for lo in range(0, len(epoch_order), config.batch_size):
            idx = epoch_order[lo : lo + config.batch_size]
            out, cache = net.forward(embeddings[idx])
            err = out[:, 0] - labels[idx]
            epoch_loss += float(np.mean(err**2))
            grads, _ = net.backward((2.0 * err / len(idx))[:, None], cache)
            adam.step(net.params(), grads)
            batches += 1
        model.losses.append(epoch_loss / max(batches, 1))

    holdout_pred = model.predict(embeddings[hold_idx])
    model.holdout_mae = float(np.mean(np.abs(holdout_pred - labels[hold_idx])))
    return model
