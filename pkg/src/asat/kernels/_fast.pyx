# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics match ``_reference`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

BACKEND = "compiled"


def knn_rows(object dists_in, long row_offset, long k):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dists = np.ascontiguousarray(dists_in, dtype=np.float64)
    cdef long rows = dists.shape[0]
    cdef long n = dists.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.full(rows * k, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] best = np.empty(k, dtype=np.int64)
    cdef long i, j, m, pos, self_j, filled
    cdef double dj

    for i in range(rows):
        self_j = row_offset + i
        filled = 0
        for j in range(n):
            if j == self_j:
                continue
            dj = dists[i, j]
            if filled < k:
                # insertion sort keyed on (distance, index)
                pos = filled
                while pos > 0 and (dists[i, best[pos - 1]] > dj):
                    best[pos] = best[pos - 1]
                    pos -= 1
                best[pos] = j
                filled += 1
            elif dj < dists[i, best[k - 1]]:
                pos = k - 1
                while pos > 0 and (dists[i, best[pos - 1]] > dj):
                    best[pos] = best[pos - 1]
                    pos -= 1
                best[pos] = j
        # equal distances never displace an earlier (lower) index above,
        # so ties already resolve to ascending column index
        for m in range(filled):
            out[i * k + m] = best[m]
    return out.reshape(rows, k)


def segment_softmax(object scores_in, object indptr_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] scores = np.ascontiguousarray(scores_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(scores)
    cdef long n = indptr.shape[0] - 1
    cdef long i, e, lo, hi
    cdef double mx, total

    for i in range(n):
        lo = indptr[i]
        hi = indptr[i + 1]
        if lo == hi:
            continue
        mx = scores[lo]
        for e in range(lo + 1, hi):
            if scores[e] > mx:
                mx = scores[e]
        total = 0.0
        for e in range(lo, hi):
            out[e] = exp(scores[e] - mx)
            total += out[e]
        for e in range(lo, hi):
            out[e] /= total
    return out


def segment_weighted_sum(object weights_in, object feats_in, object indptr_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] feats = np.ascontiguousarray(feats_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef long n = indptr.shape[0] - 1
    cdef long d = feats.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, d), dtype=np.float64)
    cdef long i, e, c, lo, hi
    cdef double w

    for i in range(n):
        lo = indptr[i]
        hi = indptr[i + 1]
        for e in range(lo, hi):
            w = weights[e]
            for c in range(d):
                out[i, c] += w * feats[e, c]
    return out


def edge_bilinear(object src_in, object R_in, object dst_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] src = np.ascontiguousarray(src_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dst = np.ascontiguousarray(dst_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] R = np.ascontiguousarray(R_in, dtype=np.float64)
    cdef long m = src.shape[0]
    cdef long d = src.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m, dtype=np.float64)
    cdef long e, a, b
    cdef double acc, row

    for e in range(m):
        acc = 0.0
        for a in range(d):
            row = 0.0
            for b in range(d):
                row += R[a, b] * dst[e, b]
            acc += src[e, a] * row
        out[e] = acc
    return out
