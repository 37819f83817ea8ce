"""Hot numeric kernels: compiled extension if built, numpy fallback otherwise.

Set SYMPLAN_PURE_PYTHON=1 to force the numpy implementation (used by the
benchmark and the cross-implementation tests).
"""

import os

from . import _npkernels

if os.environ.get("SYMPLAN_PURE_PYTHON") == "1":
    _impl = _npkernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _npkernels

IMPL = _impl.IMPL
pairwise_sqdist = _impl.pairwise_sqdist
radius_neighbor_lists = _impl.radius_neighbor_lists
gauss_kde_logpdf = _impl.gauss_kde_logpdf
kth_neighbor_dist = _impl.kth_neighbor_dist

__all__ = [
    "IMPL",
    "pairwise_sqdist",
    "radius_neighbor_lists",
    "gauss_kde_logpdf",
    "kth_neighbor_dist",
]
