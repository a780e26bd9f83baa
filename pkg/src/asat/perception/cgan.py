"""Conditional adversarial pair for synthesizing post embeddings.

Generator maps noise + condition to an embedding; discriminator maps
embedding + condition to a realness probability. They are trained in the
usual alternating minimax: the discriminator ascends
log D(real|c) + log(1 - D(G(z|c))), the generator descends either the
saturating log(1 - D(G(z|c))) or (default) the non-saturating
-log D(G(z|c)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..nn import Adam, Mlp, load_weights, save_weights, sigmoid, softplus


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; carries the last stable weights."""

    def __init__(self, message: str, checkpoint: dict):
        super().__init__(message)
        self.checkpoint = checkpoint


@dataclass
class CganConfig:
    embed_dim: int = 32
    cond_dim: int = 10
    noise_dim: int = 8
    hidden: int = 64
    lr: float = 1e-3
    epochs: int = 60
    batch_size: int = 64
    seed: int = 0
    generator_loss: str = "non_saturating"  # or "saturating"
    update_ratio: int = 1  # D updates per G update


@dataclass
class CganPair:
    generator: Mlp
    discriminator: Mlp
    config: CganConfig
    d_losses: list[float] = field(default_factory=list)
    g_losses: list[float] = field(default_factory=list)

    def generate(self, condition: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
        """m synthetic embeddings under one condition vector."""
        condition = np.asarray(condition, dtype=float).reshape(1, -1)
        z = rng.standard_normal((m, self.config.noise_dim))
        cond = np.repeat(condition, m, axis=0)
        out, _ = self.generator.forward(np.hstack([z, cond]))
        return out

    def discriminate(self, embeddings: np.ndarray, conditions: np.ndarray) -> np.ndarray:
        logits, _ = self.discriminator.forward(
            np.hstack([np.atleast_2d(embeddings), np.atleast_2d(conditions)]))
        return sigmoid(logits[:, 0])

    def save(self, path: str | Path) -> None:
        arrays = {}
        for i, (w, b) in enumerate(zip(self.generator.W, self.generator.b)):
            arrays[f"g_W{i}"] = w
            arrays[f"g_b{i}"] = b
        for i, (w, b) in enumerate(zip(self.discriminator.W, self.discriminator.b)):
            arrays[f"d_W{i}"] = w
            arrays[f"d_b{i}"] = b
        meta = {
            "embed_dim": str(self.config.embed_dim),
            "cond_dim": str(self.config.cond_dim),
            "noise_dim": str(self.config.noise_dim),
            "hidden": str(self.config.hidden),
        }
        save_weights(path, "cgan", arrays, meta)

    @classmethod
    def load(cls, path: str | Path) -> "CganPair":
        model, arrays, meta = load_weights(path)
        if model != "cgan":
            raise ValueError(f"{path}: expected a cgan checkpoint, got {model!r}")
        config = CganConfig(
            embed_dim=int(meta["embed_dim"]),
            cond_dim=int(meta["cond_dim"]),
            noise_dim=int(meta["noise_dim"]),
            hidden=int(meta["hidden"]),
        )
        pair = _init_pair(config, np.random.default_rng(0))
        pair.generator.set_params(
            [arrays[f"g_{n}{i}"] for i in range(2) for n in ("W", "b")])
        pair.discriminator.set_params(
            [arrays[f"d_{n}{i}"] for i in range(2) for n in ("W", "b")])
        return pair


def _init_pair(config: CganConfig, rng: np.random.Generator) -> CganPair:
    generator = Mlp(
        [config.noise_dim + config.cond_dim, config.hidden, config.embed_dim],
        ["tanh", "linear"], rng)
    discriminator = Mlp(
        [config.embed_dim + config.cond_dim, config.hidden, 1],
        ["tanh", "linear"], rng)
    return CganPair(generator, discriminator, config)


def discriminator_loss_grads(pair: CganPair, real: np.ndarray, fake: np.ndarray,
                             conds: np.ndarray):
    """Mean minimax loss for D and its parameter gradients."""
    n = real.shape[0]
    logits_r, cache_r = pair.discriminator.forward(np.hstack([real, conds]))
    logits_f, cache_f = pair.discriminator.forward(np.hstack([fake, conds]))
    loss = float(np.mean(softplus(-logits_r)) + np.mean(softplus(logits_f)))
    grads_r, _ = pair.discriminator.backward((sigmoid(logits_r) - 1.0) / n, cache_r)
    grads_f, _ = pair.discriminator.backward(sigmoid(logits_f) / n, cache_f)
    return loss, [a + b for a, b in zip(grads_r, grads_f)]


def generator_loss_grads(pair: CganPair, z: np.ndarray, conds: np.ndarray):
    """Generator loss and gradients, backpropagated through a frozen D."""
    n = z.shape[0]
    fake, g_cache = pair.generator.forward(np.hstack([z, conds]))
    logits, d_cache = pair.discriminator.forward(np.hstack([fake, conds]))
    if pair.config.generator_loss == "non_saturating":
        loss = float(np.mean(softplus(-logits)))
        dlogits = (sigmoid(logits) - 1.0) / n
    elif pair.config.generator_loss == "saturating":
        loss = float(np.mean(-softplus(logits)))
        dlogits = -sigmoid(logits) / n
    else:
        raise ValueError(f"unknown generator_loss {pair.config.generator_loss!r}")
    _, dinput = pair.discriminator.backward(dlogits, d_cache)
    g_grads, _ = pair.generator.backward(dinput[:, : pair.config.embed_dim], g_cache)
    return loss, g_grads


def train_cgan(embeddings: np.ndarray, conditions: np.ndarray,
               config: CganConfig | None = None) -> CganPair:
    """Alternating D/G training over (embedding, condition) pairs."""
    embeddings = np.asarray(embeddings, dtype=float)
    conditions = np.asarray(conditions, dtype=float)
    if embeddings.shape[0] < 200:
        raise ValueError(
            f"need at least 200 (embedding, condition) pairs, got {embeddings.shape[0]}")
    if config is None:
        config = CganConfig(embed_dim=embeddings.shape[1], cond_dim=conditions.shape[1])
    if (config.embed_dim, config.cond_dim) != (embeddings.shape[1], conditions.shape[1]):
        raise ValueError("config dimensions disagree with the data")

    rng = np.random.default_rng(config.seed)
    pair = _init_pair(config, rng)
    adam_d = Adam(pair.discriminator.params(), lr=config.lr)
    adam_g = Adam(pair.generator.params(), lr=config.lr)
    n = embeddings.shape[0]
    stable: dict = {}

    for epoch in range(config.epochs):
        stable = {
            "generator": pair.generator.copy_params(),
            "discriminator": pair.discriminator.copy_params(),
            "epoch": epoch,
        }
        order = rng.permutation(n)
        d_epoch, g_epoch, batches = 0.0, 0.0, 0
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            real, conds = embeddings[idx], conditions[idx]
            bs = len(idx)
            for _ in range(config.update_ratio):
                z = rng.standard_normal((bs, config.noise_dim))
                fake, _ = pair.generator.forward(np.hstack([z, conds]))
                d_loss, d_grads = discriminator_loss_grads(pair, real, fake, conds)
                adam_d.step(pair.discriminator.params(), d_grads)
            z = rng.standard_normal((bs, config.noise_dim))
            g_loss, g_grads = generator_loss_grads(pair, z, conds)
            adam_g.step(pair.generator.params(), g_grads)
            d_epoch += d_loss
            g_epoch += g_loss
            batches += 1
        d_epoch /= batches
        g_epoch /= batches
        if not (np.isfinite(d_epoch) and np.isfinite(g_epoch)):
            raise TrainingDiverged(
                f"non-finite loss at epoch {epoch} (D={d_epoch}, G={g_epoch})", stable)
        pair.d_losses.append(d_epoch)
        pair.g_losses.append(g_epoch)
    return pair
