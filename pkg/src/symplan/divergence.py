"""Nonparametric divergence between sample sets (k-NN density-ratio KL)."""

from __future__ import annotations

import numpy as np

from .kernels import kth_neighbor_dist

_FLOOR = 1e-12


def knn_kl(p: np.ndarray, q: np.ndarray, k: int = 5) -> float:
    """k-NN estimate of KL(P || Q) from samples; Wang-Kulkarni-Verdu form."""
    p = np.atleast_2d(np.asarray(p, dtype=np.float64))
    q = np.atleast_2d(np.asarray(q, dtype=np.float64))
    n, dim = p.shape
    m = q.shape[0]
    k = max(1, min(k, n - 1, m))
    rho = np.maximum(kth_neighbor_dist(p, p, k, exclude_self=True), _FLOOR)
    nu = np.maximum(kth_neighbor_dist(p, q, k), _FLOOR)
    return float(dim * np.mean(np.log(nu / rho)) + np.log(m / (n - 1)))


def symmetric_knn_kl(a: np.ndarray, b: np.ndarray, k: int = 5) -> float:
    """Symmetrized (Jeffreys) sample KL; exactly 0 for identical point masses."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    both = np.vstack([a, b])
    if np.allclose(both, both[0], atol=0.0):
        return 0.0
    return max(0.0, 0.5 * (knn_kl(a, b, k) + knn_kl(b, a, k)))
