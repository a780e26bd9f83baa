"""Compare the compiled kernels against the pure-numpy reference.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from asat.kernels import _reference

try:
    from asat.kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(repeat: int):
    rng = np.random.default_rng(0)

    n_points = 20000
    block = 256
    dists = rng.uniform(0, 100, (block, n_points))
    cases = [("knn_rows", f"{block}x{n_points} block, k=8",
              lambda impl: impl.knn_rows(dists, 1000, 8))]

    n_nodes, max_deg = 200000, 6
    sizes = rng.integers(1, max_deg, n_nodes)
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.cumsum(sizes, out=indptr[1:])
    m = int(indptr[-1])
    scores = rng.normal(size=m)
    weights = rng.uniform(0, 1, m)
    feats = rng.normal(size=(m, 10))
    cases.append(("segment_softmax", f"{n_nodes} segments, {m} entries",
                  lambda impl: impl.segment_softmax(scores, indptr)))
    cases.append(("segment_weighted_sum", f"{n_nodes} segments, {m}x10 rows",
                  lambda impl: impl.segment_weighted_sum(weights, feats, indptr)))

    src = rng.normal(size=(m, 10))
    dst = rng.normal(size=(m, 10))
    R = rng.normal(size=(10, 10))
    cases.append(("edge_bilinear", f"{m} edges, d=10",
                  lambda impl: impl.edge_bilinear(src, R, dst)))

    print(f"{'kernel':<22} {'workload':<28} {'reference':>11} {'compiled':>11} {'speedup':>8}")
    print("-" * 84)
    for name, workload, fn in cases:
        ref = timeit(lambda: fn(_reference), repeat)
        if _fast is not None:
            fast = timeit(lambda: fn(_fast), repeat)
            print(f"{name:<22} {workload:<28} {ref*1000:>9.1f}ms {fast*1000:>9.1f}ms "
                  f"{ref/fast:>7.1f}x")
        else:
            print(f"{name:<22} {workload:<28} {ref*1000:>9.1f}ms {'n/a':>11} {'n/a':>8}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _fast is None:
        print("compiled backend not built; showing reference only\n")
    bench(args.repeat)
