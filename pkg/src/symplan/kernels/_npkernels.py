"""Pure-numpy implementations of the hot numeric kernels.

Used when the compiled extension is unavailable (or explicitly disabled via
SYMPLAN_PURE_PYTHON=1). Must stay numerically interchangeable with
``_ckernels``; the benchmark and test suite compare both.
"""

import numpy as np

IMPL = "numpy"

_LOG_2PI = float(np.log(2.0 * np.pi))


def pairwise_sqdist(X, Y):
    """Squared Euclidean distances, shape (len(X), len(Y))."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    d = X[:, None, :] - Y[None, :, :]
    return np.einsum("ijk,ijk->ij", d, d)


def radius_neighbor_lists(X, eps):
    """Indices within Euclidean distance eps of each row (self included)."""
    sq = pairwise_sqdist(X, X)
    thr = float(eps) * float(eps)
    return [np.flatnonzero(row <= thr) for row in sq]


def gauss_kde_logpdf(query, support, bandwidth):
    """Log density of a product-Gaussian KDE at each query row.

    bandwidth is a per-dimension vector of kernel standard deviations.
    """
    query = np.atleast_2d(np.asarray(query, dtype=np.float64))
    support = np.atleast_2d(np.asarray(support, dtype=np.float64))
    bw = np.asarray(bandwidth, dtype=np.float64)
    n, dim = support.shape
    # (nq, n) summed squared z-scores
    z = (query[:, None, :] - support[None, :, :]) / bw
    expo = -0.5 * np.einsum("ijk,ijk->ij", z, z)
    log_norm = -0.5 * dim * _LOG_2PI - np.sum(np.log(bw))
    m = np.max(expo, axis=1)
    out = m + np.log(np.sum(np.exp(expo - m[:, None]), axis=1)) - np.log(n) + log_norm
    # all-support-at-infinity guard: exp underflow leaves log(0) = -inf, fine
    return out


def kth_neighbor_dist(X, Y, k, exclude_self=False):
    """Distance to the k-th nearest row of Y for each row of X.

    With exclude_self=True the single closest point is skipped, for the
    leave-one-out case X is Y.
    """
    sq = pairwise_sqdist(X, Y)
    kk = k + 1 if exclude_self else k
    if kk > sq.shape[1]:
        raise ValueError(f"k={k} too large for {sq.shape[1]} reference points")
    part = np.partition(sq, kk - 1, axis=1)[:, kk - 1]
    return np.sqrt(part)
