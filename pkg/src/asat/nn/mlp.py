"""Minimal feed-forward networks with explicit backprop.

Everything is float64 numpy and fully deterministic given a seeded
generator, so trained weights can be checked against central finite
differences and reruns are bit-identical.
"""

from __future__ import annotations

import numpy as np

LOGIT_CLAMP = 37.0  # past +/-37 float64 rounds sigmoid to exactly 0 or 1


def sigmoid(x):
    x = np.clip(x, -LOGIT_CLAMP, LOGIT_CLAMP)
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    # complementary form keeps the result strictly below 1.0
    t = np.exp(-x[pos])
    out[pos] = 1.0 - t / (1.0 + t)
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


_ACT = {
    "linear": (lambda z: z, lambda z, a: np.ones_like(z)),
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
    "sigmoid": (sigmoid, lambda z, a: a * (1.0 - a)),
    "relu": (lambda z: np.maximum(z, 0.0), lambda z, a: (z > 0).astype(float)),
}


class Mlp:
    """Dense layers; ``forward`` returns a cache that ``backward`` consumes."""

    def __init__(self, sizes: list[int], activations: list[str], rng: np.random.Generator):
        if len(activations) != len(sizes) - 1:
            raise ValueError("need one activation per layer")
        for name in activations:
            if name not in _ACT:
                raise ValueError(f"unknown activation {name!r}")
        self.activations = list(activations)
        self.W = []
        self.b = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            scale = np.sqrt(1.0 / fan_in)
            self.W.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.b.append(np.zeros(fan_out))

    def forward(self, x: np.ndarray):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        caches = []
        a = x
        for W, b, name in zip(self.W, self.b, self.activations):
            z = a @ W + b
            out = _ACT[name][0](z)
            caches.append((a, z, out, name))
            a = out
        return a, caches

    def backward(self, dout: np.ndarray, caches):
        """Returns (param grads matching ``params()``, gradient w.r.t. input)."""
        dW = [None] * len(self.W)
        db = [None] * len(self.b)
        grad = np.asarray(dout, dtype=float)
        for i in range(len(self.W) - 1, -1, -1):
            a_in, z, a_out, name = caches[i]
            dz = grad * _ACT[name][1](z, a_out)
            dW[i] = a_in.T @ dz
            db[i] = dz.sum(axis=0)
            grad = dz @ self.W[i].T
        flat = []
        for w, b in zip(dW, db):
            flat.extend([w, b])
        return flat, grad

    def params(self) -> list[np.ndarray]:
        flat = []
        for w, b in zip(self.W, self.b):
            flat.extend([w, b])
        return flat

    def set_params(self, values: list[np.ndarray]) -> None:
        it = iter(values)
        for i in range(len(self.W)):
            self.W[i] = np.array(next(it), dtype=float)
            self.b[i] = np.array(next(it), dtype=float)

    def copy_params(self) -> list[np.ndarray]:
        return [p.copy() for p in self.params()]


class Adam:
    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = b1 * self.m[i] + (1 - b1) * g
            self.v[i] = b2 * self.v[i] + (1 - b2) * g * g
            mhat = self.m[i] / (1 - b1 ** self.t)
            vhat = self.v[i] / (1 - b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)
