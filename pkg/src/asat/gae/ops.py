"""Single-node encoder operations.

The encoder scores each neighbor u of a node v with the bilinear form
a_v^T R a_u in the relation's matrix space, softmax-normalizes the scores
across v's neighbors, aggregates the neighbors as that convex combination,
and averages the result with v's own vector. The decoder turns two encoded
vectors into a link probability via the sigmoid of their dot product.
"""

from __future__ import annotations

import numpy as np

from ..nn import sigmoid


def attention_score(a_v: np.ndarray, R: np.ndarray, a_u: np.ndarray) -> float:
    a_v = np.asarray(a_v, dtype=float)
    a_u = np.asarray(a_u, dtype=float)
    R = np.asarray(R, dtype=float)
    if R.shape != (a_v.shape[0], a_u.shape[0]):
        raise ValueError(
            f"dimension mismatch: R is {R.shape}, vectors are "
            f"{a_v.shape[0]} and {a_u.shape[0]}")
    return float(a_v @ R @ a_u)


def attention_weights(a_v: np.ndarray, neighbor_feats: np.ndarray,
                      R: np.ndarray) -> np.ndarray:
    """Softmax over the raw bilinear scores of all neighbors."""
    neighbor_feats = np.atleast_2d(np.asarray(neighbor_feats, dtype=float))
    if neighbor_feats.shape[0] == 0:
        raise ValueError("no neighbors to attend over")
    scores = np.array([attention_score(a_v, R, u) for u in neighbor_feats])
    shifted = np.exp(scores - scores.max())
    return shifted / shifted.sum()


def aggregate_neighbors(weights: np.ndarray, neighbor_feats: np.ndarray) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    neighbor_feats = np.atleast_2d(np.asarray(neighbor_feats, dtype=float))
    if weights.shape[0] != neighbor_feats.shape[0]:
        raise ValueError("one weight per neighbor required")
    return weights @ neighbor_feats


def encode_node(a_v: np.ndarray, neighbor_feats: np.ndarray | None,
                R: np.ndarray) -> np.ndarray:
    """One encoding pass; a node without neighbors is returned unchanged."""
    a_v = np.asarray(a_v, dtype=float)
    if neighbor_feats is None or len(neighbor_feats) == 0:
        return a_v.copy()
    weights = attention_weights(a_v, neighbor_feats, R)
    return (a_v + aggregate_neighbors(weights, neighbor_feats)) / 2.0


def decode_link(a_v: np.ndarray, a_u: np.ndarray) -> float:
    """Probability that an edge joins the two encoded nodes."""
    score = float(np.dot(np.asarray(a_v, dtype=float), np.asarray(a_u, dtype=float)))
    return float(sigmoid(np.array([score]))[0])
