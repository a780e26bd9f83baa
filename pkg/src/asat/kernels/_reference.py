"""Pure-numpy kernel implementations.

These are the fallback for the compiled extension in ``_fast.pyx``; both
backends implement the same four operations with identical semantics:

* ``knn_rows``        -- per-row k-nearest selection with deterministic ties
* ``segment_softmax`` -- softmax within CSR-style segments
* ``segment_weighted_sum`` -- weighted row aggregation per segment
* ``edge_bilinear``   -- s_e = src_e . R . dst_e for edge lists
"""

import numpy as np

BACKEND = "reference"


def knn_rows(dists, row_offset, k):
    """Select the k nearest columns per row of a distance block.

    ``dists`` is a (rows x n) float64 block of distances against all n
    points; row i of the block corresponds to point ``row_offset + i``,
    which is excluded from its own candidates. Ties are broken by
    ascending column index. Rows with fewer than k candidates are padded
    with -1.
    """
    dists = np.asarray(dists, dtype=np.float64)
    rows, n = dists.shape
    out = np.full((rows, k), -1, dtype=np.int64)
    for i in range(rows):
        d = dists[i]
        self_j = row_offset + i
        if n - 1 <= k:
            cand = np.delete(np.arange(n), self_j) if 0 <= self_j < n else np.arange(n)
        else:
            kth_val = np.partition(d, k)[k]
            cand = np.flatnonzero(d <= kth_val)
            cand = cand[cand != self_j]
        if cand.size == 0:
            continue
        # stable sort on distance keeps ascending-index order for ties
        order = np.argsort(d[cand], kind="stable")
        take = cand[order][:k]
        out[i, : take.size] = take
    return out


def segment_softmax(scores, indptr):
    """Softmax over each segment [indptr[i], indptr[i+1]) of ``scores``."""
    scores = np.asarray(scores, dtype=np.float64)
    out = np.empty_like(scores)
    for i in range(len(indptr) - 1):
        lo, hi = indptr[i], indptr[i + 1]
        if lo == hi:
            continue
        seg = scores[lo:hi]
        e = np.exp(seg - seg.max())
        out[lo:hi] = e / e.sum()
    return out


def segment_weighted_sum(weights, feats, indptr):
    """Per-segment sum of ``weights[e] * feats[e]`` rows.

    Returns an (n_segments x d) array; empty segments yield zero rows.
    """
    weights = np.asarray(weights, dtype=np.float64)
    feats = np.asarray(feats, dtype=np.float64)
    n = len(indptr) - 1
    out = np.zeros((n, feats.shape[1]), dtype=np.float64)
    contrib = weights[:, None] * feats
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        if lo == hi:
            continue
        out[i] = contrib[lo:hi].sum(axis=0)
    return out


def edge_bilinear(src, R, dst):
    """Bilinear score per edge: out[e] = src[e] @ R @ dst[e]."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    return np.einsum("ed,df,ef->e", src, R, dst)
