"""Numeric kernels with a compiled fast path.

The compiled extension (``asat.kernels._fast``, built from Cython) is
preferred when it imported cleanly; otherwise the pure-numpy reference
backend is used. Set ``ASAT_PURE_PYTHON=1`` to force the reference
backend regardless.
"""

import os

from . import _reference

if os.environ.get("ASAT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _reference
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _reference

BACKEND = _impl.BACKEND
knn_rows = _impl.knn_rows
segment_softmax = _impl.segment_softmax
segment_weighted_sum = _impl.segment_weighted_sum
edge_bilinear = _impl.edge_bilinear

__all__ = [
    "BACKEND",
    "knn_rows",
    "segment_softmax",
    "segment_weighted_sum",
    "edge_bilinear",
]
