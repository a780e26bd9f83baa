"""Deterministic text embeddings: hashed bag-of-tokens through fixed
random directions, L2-normalized."""

from __future__ import annotations

import hashlib
from collections import Counter

import numpy as np

from ..ingest.locations import tokenize

DEFAULT_DIM = 32


class HashedEmbedder:
    """Same text -> same unit vector, for any process or platform.

    Each token hashes (keyed by the embedder seed) to a fixed Gaussian
    direction; a document is the count-weighted sum of its token
    directions, normalized. Empty text embeds to the zero vector.
    """

    def __init__(self, dim: int = DEFAULT_DIM, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self._key = int(seed).to_bytes(8, "little", signed=True)
        self._directions: dict[str, np.ndarray] = {}

    def _direction(self, token: str) -> np.ndarray:
        cached = self._directions.get(token)
        if cached is None:
            digest = hashlib.blake2b(token.encode("utf-8"), key=self._key,
                                     digest_size=8).digest()
            token_seed = int.from_bytes(digest, "little")
            cached = np.random.Generator(np.random.PCG64(token_seed)).standard_normal(self.dim)
            self._directions[token] = cached
        return cached

    def embed(self, text: str) -> np.ndarray:
        counts = Counter(tokenize(text))
        if not counts:
            return np.zeros(self.dim)
        vec = np.zeros(self.dim)
        for token in sorted(counts):
            vec += counts[token] * self._direction(token)
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def embed_many(self, texts: list[str]) -> np.ndarray:
        return np.array([self.embed(t) for t in texts]) if texts else np.zeros((0, self.dim))
