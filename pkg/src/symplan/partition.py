"""Subgoal partitioning of option-execution data.

Successful executions are clustered by end state (density-based clustering,
written here rather than borrowed so that outlier attachment and tie-breaks
are exactly as documented). Start states are then grouped by the effect
cluster they led to, and groups whose start regions overlap are merged into
one partition with several probabilistic outcomes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .divergence import symmetric_knn_kl
from .errors import AllOutliers, InsufficientData
from .kernels import pairwise_sqdist, radius_neighbor_lists
from .smdp import Dataset


@dataclass(frozen=True)
class ClusterParams:
    epsilon: float
    min_pts: int = 5

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")

    @staticmethod
    def default_for(points: np.ndarray, min_pts: int = 5) -> "ClusterParams":
        """Scale-free default: epsilon = 5% of the data diameter."""
        pts = np.atleast_2d(points)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        diameter = float(np.linalg.norm(hi - lo))
        return ClusterParams(epsilon=max(0.05 * diameter, 1e-6), min_pts=min_pts)


@dataclass(frozen=True)
class EffectCluster:
    members: tuple[int, ...]
    centroid: np.ndarray

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Partition:
    option_id: str
    partition_id: int
    start_indices: tuple[int, ...]
    outcomes: tuple[tuple[EffectCluster, float], ...]
    n_dropped: int = 0


def cluster_effects(points: np.ndarray, params: ClusterParams) -> list[EffectCluster]:
    clusters, _ = cluster_effects_detailed(points, params)
    return clusters


def cluster_effects_detailed(
    points: np.ndarray, params: ClusterParams
) -> tuple[list[EffectCluster], list[int]]:
    """Density-based clustering; returns (clusters, dropped outlier indices).

    Core points have >= min_pts neighbors within epsilon (self included);
    clusters are maximal density-connected sets of cores. Non-core points are
    attached to the nearest cluster within epsilon, otherwise dropped.
    Cluster order is by lexicographically sorted centroid, so the result is
    invariant to input permutation up to index relabeling.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = len(pts)
    if n < params.min_pts:
        raise InsufficientData(f"{n} points < min_pts={params.min_pts}")
    neigh = radius_neighbor_lists(pts, params.epsilon)
    core = np.array([len(nb) >= params.min_pts for nb in neigh])
    if not core.any():
        raise AllOutliers("no core points; epsilon too small or min_pts too large")

    label = np.full(n, -1, dtype=int)
    cid = 0
    for i in range(n):
        if not core[i] or label[i] != -1:
            continue
        stack = [i]
        label[i] = cid
        while stack:
            j = stack.pop()
            if not core[j]:
                continue
            for nb in neigh[j]:
                if label[nb] == -1:
                    label[nb] = cid
                    if core[nb]:
                        stack.append(nb)
        cid += 1

    # attach remaining non-core points to the nearest cluster within epsilon
    dropped: list[int] = []
    loose = np.flatnonzero(label == -1)
    if len(loose):
        centro = np.stack(
            [pts[label == c].mean(axis=0) for c in range(cid)]
        )
        for i in loose:
            d2 = pairwise_sqdist(pts[i : i + 1], pts[label != -1])[0]
            owners = label[label != -1]
            j = int(np.argmin(d2))
            if d2[j] <= params.epsilon**2:
                label[i] = owners[j]
            else:
                dropped.append(int(i))
        del centro

    clusters = []
    for c in range(cid):
        mem = np.flatnonzero(label == c)
        clusters.append(EffectCluster(tuple(int(m) for m in mem), pts[mem].mean(axis=0)))
    clusters.sort(key=lambda cl: tuple(cl.centroid))
    return clusters, dropped


def partition_option(
    dataset: Dataset, option_id: str, params: ClusterParams | None = None
) -> list[Partition]:
    """Partition an option's successful executions into subgoal partitions."""
    samples = dataset.for_option(option_id, successful_only=True)
    ends = np.array([s.x_end for s in samples]) if samples else np.zeros((0, 0))
    starts = np.array([s.x_start for s in samples]) if samples else np.zeros((0, 0))
    return _partition_vectors(option_id, starts, ends, params)


def partition_option_vectors(
    option_id: str, starts: np.ndarray, ends: np.ndarray, params: ClusterParams | None = None
) -> list[Partition]:
    """Same as partition_option but on raw (start, end) vector arrays; used by
    the agent-space and object-space pipelines."""
    return _partition_vectors(option_id, np.asarray(starts), np.asarray(ends), params)


def _partition_vectors(option_id, starts, ends, params) -> list[Partition]:
    if params is None:
        if len(ends) == 0:
            raise InsufficientData(option_id)
        params = ClusterParams.default_for(ends)
    if len(ends) < params.min_pts:
        raise InsufficientData(
            f"{option_id}: {len(ends)} successful samples < min_pts={params.min_pts}"
        )
    clusters, dropped = cluster_effects_detailed(ends, params)

    # group start states by produced effect cluster
    groups = [set(c.members) for c in clusters]

    # merge groups whose start-point sets overlap (any pair within epsilon)
    parent = list(range(len(groups)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    eps2 = params.epsilon**2
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            ia = sorted(groups[a])
            ib = sorted(groups[b])
            d2 = pairwise_sqdist(starts[ia], starts[ib])
            if (d2 <= eps2).any():
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb

    merged: dict[int, list[int]] = {}
    for g in range(len(groups)):
        merged.setdefault(find(g), []).append(g)

    partitions = []
    for root, gids in merged.items():
        idx = sorted(set().union(*(groups[g] for g in gids)))
        total = len(idx)
        outcomes = tuple(
            (clusters[g], len(groups[g]) / total) for g in sorted(gids, key=lambda g: tuple(clusters[g].centroid))
        )
        partitions.append((idx, outcomes))

    partitions.sort(key=lambda p: tuple(p[1][0][0].centroid))
    return [
        Partition(
            option_id=option_id,
            partition_id=pid,
            start_indices=tuple(idx),
            outcomes=outcomes,
            n_dropped=len(dropped),
        )
        for pid, (idx, outcomes) in enumerate(partitions)
    ]


def subgoal_divergence(partition: Partition, starts: np.ndarray, ends: np.ndarray, k: int = 5) -> float:
    """Certifies the subgoal property: split the partition's start samples in
    half along the first principal start direction and measure the divergence
    between the two halves' end-state distributions."""
    idx = np.array(partition.start_indices)
    if len(idx) < 20:
        raise InsufficientData("need >= 20 start samples")
    s = np.asarray(starts)[idx]
    e = np.asarray(ends)[idx]
    centered = s - s.mean(axis=0)
    if np.allclose(centered, 0.0):
        # all starts identical: fall back to an arbitrary even split
        proj = np.arange(len(idx), dtype=float)
    else:
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        proj = centered @ vt[0]
    med = np.median(proj)
    lo = proj <= med
    if lo.all() or (~lo).all():
        lo = np.arange(len(idx)) < len(idx) // 2
    return symmetric_knn_kl(e[lo], e[~lo], k=k)


def subgoal_divergence_dataset(partition: Partition, dataset: Dataset, k: int = 5) -> float:
    samples = dataset.for_option(partition.option_id, successful_only=True)
    starts = np.array([s.x_start for s in samples])
    ends = np.array([s.x_end for s in samples])
    return subgoal_divergence(partition, starts, ends, k=k)


def partition_report(partitions_by_option: dict[str, list[Partition]], divergences=None) -> str:
    """Structured text report: per option, partition count/sizes/outcome
    probabilities and (optionally) divergence scores."""
    buf = io.StringIO()
    buf.write("# symplan-partition-report v1\n")
    for oid in sorted(partitions_by_option):
        parts = partitions_by_option[oid]
        buf.write(f"option={oid} partitions={len(parts)}\n")
        for p in parts:
            probs = ",".join("%.6f" % pr for _, pr in p.outcomes)
            line = (
                f"  partition={p.partition_id} size={len(p.start_indices)}"
                f" outcomes={len(p.outcomes)} probs={probs} dropped={p.n_dropped}"
            )
            if divergences and (oid, p.partition_id) in divergences:
                line += f" divergence={divergences[(oid, p.partition_id)]:.6f}"
            buf.write(line + "\n")
    return buf.getvalue()
