"""Subgoal partitioning: mode recovery, outcome probabilities, invariances."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplan.errors import AllOutliers, InsufficientData
from symplan.partition import (
    ClusterParams,
    cluster_effects,
    cluster_effects_detailed,
    partition_option_vectors,
    partition_report,
    subgoal_divergence,
)


def synthetic_option(seed, k, n=300, sep=10.0, eps=0.5, probs=None):
    """Starts form k well-separated regions; executions from region i end in
    mode i (or a random mode per `probs` for stochastic outcomes)."""
    rng = np.random.default_rng(seed)
    starts, ends = [], []
    for i in range(k):
        c = np.array([i * sep, 0.0])
        s = c + rng.normal(scale=eps / 3, size=(n // k, 2))
        if probs is None:
            e = c + np.array([0.0, sep]) + rng.normal(scale=eps / 3, size=(n // k, 2))
        else:
            modes = rng.choice(len(probs), size=n // k, p=probs)
            e = (
                np.array([0.0, sep])
                + np.array([[m * sep, 0.0] for m in modes])
                + rng.normal(scale=eps / 3, size=(n // k, 2))
            )
        starts.append(s)
        ends.append(e)
    return np.vstack(starts), np.vstack(ends)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_mode_recovery(k):
    # [DERIVED] by construction: k separated modes => exactly k partitions
    starts, ends = synthetic_option(0, k)
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=1.0))
    assert len(parts) == k
    for p in parts:
        assert len(p.outcomes) == 1
        assert p.outcomes[0][1] == 1.0


def test_stochastic_outcome_probabilities():
    # [DERIVED] 70/30 generator probabilities, binomial tolerance at n=1000
    starts, ends = synthetic_option(1, 1, n=1000, probs=[0.7, 0.3])
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=1.0))
    assert len(parts) == 1
    ps = sorted(pr for _, pr in parts[0].outcomes)
    assert len(ps) == 2
    assert abs(ps[1] - 0.7) < 0.05 and abs(ps[0] - 0.3) < 0.05


def test_cluster_permutation_invariance():
    starts, ends = synthetic_option(2, 3)
    params = ClusterParams(epsilon=1.0)
    a = cluster_effects(ends, params)
    rng = np.random.default_rng(3)
    perm = rng.permutation(len(ends))
    b = cluster_effects(ends[perm], params)
    # same clusters up to index relabeling: compare sorted centroid lists
    ca = sorted(tuple(np.round(c.centroid, 9)) for c in a)
    cb = sorted(tuple(np.round(c.centroid, 9)) for c in b)
    assert ca == cb


def test_outlier_attachment_and_drop():
    pts = np.vstack([np.zeros((5, 2)), [[0.4, 0.0]], [[50.0, 50.0]]])
    clusters, dropped = cluster_effects_detailed(pts, ClusterParams(epsilon=0.5, min_pts=5))
    assert len(clusters) == 1
    assert 5 in clusters[0].members  # near point attached
    assert dropped == [6]  # far point dropped


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        cluster_effects(np.zeros((2, 2)), ClusterParams(epsilon=0.5, min_pts=5))


def test_all_outliers():
    pts = np.arange(10, dtype=float).reshape(-1, 1) * 100.0
    with pytest.raises(AllOutliers):
        cluster_effects(pts, ClusterParams(epsilon=0.5, min_pts=3))


def test_cluster_params_validation():
    with pytest.raises(ValueError):
        ClusterParams(epsilon=0.0)
    with pytest.raises(ValueError):
        ClusterParams(epsilon=1.0, min_pts=0)


def test_default_params_scale_free():
    pts = np.array([[0.0, 0.0], [100.0, 0.0]])
    p = ClusterParams.default_for(pts)
    assert p.epsilon == pytest.approx(5.0)


def test_subgoal_divergence_low_for_true_subgoal():
    # same end distribution regardless of start => low divergence
    rng = np.random.default_rng(4)
    starts = rng.uniform(-1, 1, size=(200, 2))
    ends = np.array([5.0, 5.0]) + rng.normal(scale=0.1, size=(200, 2))
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=1.0))
    d = subgoal_divergence(parts[0], starts, ends)
    assert d < 0.5


def test_subgoal_divergence_high_for_violation():
    # end state depends on start position => the split detects it
    rng = np.random.default_rng(5)
    starts = np.vstack([rng.normal(0, 0.1, (100, 2)), rng.normal(8, 0.1, (100, 2))])
    ends = starts + np.array([0.0, 100.0])
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=150.0))
    assert len(parts) == 1
    d = subgoal_divergence(parts[0], starts, ends)
    assert d > 1.0


def test_partition_sizes_cover_all_samples():
    starts, ends = synthetic_option(6, 2)
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=1.0))
    covered = sorted(i for p in parts for i in p.start_indices)
    assert covered == list(range(len(starts)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 3))
def test_mode_recovery_property(seed, k):
    starts, ends = synthetic_option(seed, k, n=120)
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=1.0))
    assert len(parts) == k


def test_report_format():
    starts, ends = synthetic_option(7, 2)
    parts = partition_option_vectors("opt", starts, ends, ClusterParams(epsilon=1.0))
    text = partition_report({"opt": parts})
    assert text.startswith("# symplan-partition-report v1")
    assert "option=opt partitions=2" in text
