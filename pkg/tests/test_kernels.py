"""Numeric kernels: oracle agreement and compiled/numpy interchangeability."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from symplan.kernels import (
    IMPL,
    _npkernels,
    gauss_kde_logpdf,
    kth_neighbor_dist,
    pairwise_sqdist,
    radius_neighbor_lists,
)

try:
    from symplan.kernels import _ckernels
except ImportError:  # pure-python environment
    _ckernels = None


def test_pairwise_sqdist_oracle():
    # [DERIVED] oracle: scipy cdist
    from scipy.spatial.distance import cdist

    rng = np.random.default_rng(0)
    X = rng.normal(size=(17, 4))
    Y = rng.normal(size=(9, 4))
    np.testing.assert_allclose(pairwise_sqdist(X, Y), cdist(X, Y) ** 2, atol=1e-10)


def test_kth_neighbor_dist_hand_case():
    # [TRIVIAL] 1-d points 0, 1, 3; distances from query 0: 1st=0, 2nd=1
    Y = np.array([[0.0], [1.0], [3.0]])
    q = np.array([[0.0]])
    assert kth_neighbor_dist(q, Y, 1)[0] == 0.0
    assert kth_neighbor_dist(q, Y, 2)[0] == 1.0
    assert kth_neighbor_dist(q, Y, 3)[0] == 3.0
    # exclude_self skips the zero-distance match
    assert kth_neighbor_dist(q, Y, 1, exclude_self=True)[0] == 1.0


def test_kth_neighbor_k_too_large():
    with pytest.raises(ValueError):
        kth_neighbor_dist(np.zeros((1, 1)), np.zeros((2, 1)), 3)


def test_radius_neighbor_lists_hand_case():
    X = np.array([[0.0], [0.5], [2.0]])
    nb = radius_neighbor_lists(X, 0.6)
    assert sorted(nb[0]) == [0, 1]
    assert sorted(nb[1]) == [0, 1]
    assert sorted(nb[2]) == [2]


def test_gauss_kde_logpdf_oracle_1d():
    # [DERIVED] oracle: direct mixture-of-normals via scipy.stats.norm
    from scipy.stats import norm

    support = np.array([[0.0], [1.0], [2.5]])
    bw = np.array([0.7])
    q = np.array([[0.3], [-1.0], [2.0]])
    expected = np.log(np.mean(norm.pdf(q, loc=support.T, scale=bw[0]), axis=1))
    np.testing.assert_allclose(gauss_kde_logpdf(q, support, bw), expected, atol=1e-10)


def test_gauss_kde_logpdf_oracle_product():
    # [DERIVED] per-dimension product kernel equals the sum of 1-d log terms
    from scipy.stats import norm

    rng = np.random.default_rng(1)
    support = rng.normal(size=(6, 3))
    bw = np.array([0.5, 1.0, 2.0])
    q = rng.normal(size=(4, 3))
    per = norm.pdf(q[:, None, :], loc=support[None, :, :], scale=bw)
    expected = np.log(per.prod(axis=2).mean(axis=1))
    np.testing.assert_allclose(gauss_kde_logpdf(q, support, bw), expected, atol=1e-10)


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
class TestImplementationsAgree:
    """The compiled and numpy kernels must be numerically interchangeable."""

    mats = arrays(
        np.float64,
        st.tuples(st.integers(2, 12), st.just(3)),
        elements=st.floats(-50, 50, allow_nan=False),
    )

    @settings(max_examples=50, deadline=None)
    @given(X=mats, Y=mats)
    def test_pairwise(self, X, Y):
        np.testing.assert_allclose(
            _ckernels.pairwise_sqdist(X, Y), _npkernels.pairwise_sqdist(X, Y),
            rtol=1e-9, atol=1e-7,
        )

    @settings(max_examples=50, deadline=None)
    @given(X=mats, Y=mats, k=st.integers(1, 2))
    def test_kth_neighbor(self, X, Y, k):
        np.testing.assert_allclose(
            _ckernels.kth_neighbor_dist(X, Y, k), _npkernels.kth_neighbor_dist(X, Y, k),
            rtol=1e-9, atol=1e-7,
        )

    @settings(max_examples=50, deadline=None)
    @given(X=mats, Y=mats)
    def test_kde(self, X, Y):
        bw = np.array([0.5, 1.0, 1.5])
        np.testing.assert_allclose(
            _ckernels.gauss_kde_logpdf(X, Y, bw), _npkernels.gauss_kde_logpdf(X, Y, bw),
            rtol=1e-8, atol=1e-7,
        )

    @settings(max_examples=30, deadline=None)
    @given(X=mats, eps=st.floats(0.1, 20.0))
    def test_radius(self, X, eps):
        a = _ckernels.radius_neighbor_lists(X, eps)
        b = _npkernels.radius_neighbor_lists(X, eps)
        assert len(a) == len(b)
        for ra, rb in zip(a, b):
            assert sorted(ra) == sorted(rb)


def test_impl_marker():
    assert IMPL in ("cython", "numpy")
