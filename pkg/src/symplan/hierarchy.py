"""Abstraction hierarchy: transition graph, VoteRank subgoals, composed
higher-order options, and level stacking.

Each graph node is an abstract state reached by particle propagation through
grounded operators (so a node is a distribution over lower-level states,
summarized by its particle signature and centroid). Levels are stacked by
selecting subgoal nodes, composing shortest-path options between them, and
rebuilding a smaller graph over the subgoals.
"""

from __future__ import annotations

import heapq
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLevel, EmptyGraph, StateExplosion

NODE_CAP = 100_000
EDGE_THRESHOLD = 0.5


@dataclass(frozen=True)
class GraphNode:
    node_id: int
    signature: tuple       # rounded unique particle rows (a distribution summary)
    centroid: np.ndarray   # mean low-level state vector


@dataclass(frozen=True)
class GraphEdge:
    src: int
    dst: int
    operator: str
    probability: float


@dataclass(frozen=True)
class TransitionGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]

    def n_nodes(self) -> int:
        return len(self.nodes)

    def out_edges(self) -> dict[int, list[GraphEdge]]:
        out: dict[int, list[GraphEdge]] = {n.node_id: [] for n in self.nodes}
        for e in self.edges:
            out[e.src].append(e)
        return out

    def in_edges(self) -> dict[int, list[GraphEdge]]:
        inc: dict[int, list[GraphEdge]] = {n.node_id: [] for n in self.nodes}
        for e in self.edges:
            inc[e.dst].append(e)
        return inc


@dataclass(frozen=True)
class HigherOrderOption:
    option_id: str
    node_path: tuple[int, ...]       # source ... subgoal
    operators: tuple[str, ...]       # composed lower-level operator sequence
    termination: tuple[int, ...]     # always a single node
    probability: float               # product of edge probabilities along the path


@dataclass(frozen=True)
class LevelModel:
    level: int
    graph: TransitionGraph
    options: tuple[HigherOrderOption, ...]  # options that produced this level (empty at level 0)


def _signature(X: np.ndarray, decimals: int = 6) -> tuple:
    uniq = np.unique(np.round(np.atleast_2d(X), decimals), axis=0)
    return tuple(map(tuple, uniq))


def build_graph(
    model,
    n_particles: int = 256,
    seed: int = 0,
    edge_threshold: float = EDGE_THRESHOLD,
    node_cap: int = NODE_CAP,
) -> TransitionGraph:
    """Breadth-first enumeration of abstract states reachable from the model's
    initial state via operators whose success probability is at least
    edge_threshold."""
    rng = np.random.default_rng(seed)
    D0 = np.atleast_2d(model.initial_d)
    X0 = np.atleast_2d(model.initial_x)
    if len(D0) == 1:
        D0 = np.repeat(D0, n_particles, axis=0)
        X0 = np.repeat(X0, n_particles, axis=0)
    sig0 = _signature(X0)
    nodes = [GraphNode(0, sig0, X0.mean(axis=0))]
    by_sig = {sig0: 0}
    particles = {0: (D0, X0)}
    edges: list[GraphEdge] = []
    ops = sorted(model.operators, key=lambda o: o.name)
    frontier = [0]
    while frontier:
        nid = frontier.pop(0)
        D, X = particles[nid]
        for op in ops:
            w = np.asarray(op.precondition_prob(D, X), dtype=np.float64)
            p = float(w.mean())
            if p < edge_threshold:
                continue
            keep = w > 0.5
            if not keep.any():
                continue
            idx = np.flatnonzero(keep)
            pick = idx[rng.integers(len(idx), size=len(D))]
            D2, X2 = op.apply(D[pick], X[pick], rng)
            sig = _signature(X2)
            dst = by_sig.get(sig)
            if dst is None:
                dst = len(nodes)
                if dst >= node_cap:
                    raise StateExplosion(f"> {node_cap} abstract states")
                by_sig[sig] = dst
                nodes.append(GraphNode(dst, sig, X2.mean(axis=0)))
                particles[dst] = (D2, X2)
                frontier.append(dst)
            if dst != nid:
                edges.append(GraphEdge(nid, dst, op.name, min(1.0, p)))
    return TransitionGraph(tuple(nodes), tuple(edges))


def voterank(graph: TransitionGraph, k: int) -> list[int]:
    """Iterative voting: each node's score is the sum of its in-neighbors'
    voting abilities; the highest-score node wins the round (ties to the
    smallest id), its ability drops to zero permanently, and its neighbors'
    abilities drop by 1/(mean total degree), floored at zero."""
    if graph.n_nodes() == 0:
        raise EmptyGraph("voterank on empty graph")
    if k > graph.n_nodes():
        raise ValueError("k exceeds node count")
    ids = [n.node_id for n in graph.nodes]
    in_nb: dict[int, set] = {i: set() for i in ids}
    nb: dict[int, set] = {i: set() for i in ids}
    degree = {i: 0 for i in ids}
    for e in graph.edges:
        in_nb[e.dst].add(e.src)
        nb[e.src].add(e.dst)
        nb[e.dst].add(e.src)
        degree[e.src] += 1
        degree[e.dst] += 1
    mean_deg = sum(degree.values()) / len(ids)
    suppress = 1.0 / mean_deg if mean_deg > 0 else 1.0
    ability = {i: 1.0 for i in ids}
    selected: list[int] = []
    for _ in range(k):
        scores = {
            i: sum(ability[j] for j in in_nb[i]) for i in ids if i not in selected
        }
        best = min(scores, key=lambda i: (-scores[i], i))
        selected.append(best)
        ability[best] = 0.0
        for j in nb[best]:
            ability[j] = max(0.0, ability[j] - suppress)
    return selected


def make_subgoal_options(graph: TransitionGraph, subgoals: list[int]) -> list[HigherOrderOption]:
    """Per (source node, subgoal): most-reliable path by Dijkstra with
    -log(probability) edge weights, emitted as one composed option whose
    termination set is the single subgoal node."""
    inc = graph.in_edges()
    options: list[HigherOrderOption] = []
    for goal in subgoals:
        # Dijkstra on the reversed graph from the subgoal
        dist: dict[int, float] = {goal: 0.0}
        back: dict[int, GraphEdge] = {}
        heap = [(0.0, goal)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist.get(v, math.inf):
                continue
            for e in inc[v]:
                w = -math.log(max(e.probability, 1e-300))
                nd = d + w
                if nd < dist.get(e.src, math.inf) - 1e-15:
                    dist[e.src] = nd
                    back[e.src] = e
                    heapq.heappush(heap, (nd, e.src))
        for n in graph.nodes:
            src = n.node_id
            if src == goal or src not in dist:
                continue
            path = [src]
            ops = []
            cur = src
            prob = 1.0
            while cur != goal:
                e = back[cur]
                ops.append(e.operator)
                prob *= e.probability
                cur = e.dst
                path.append(cur)
            options.append(
                HigherOrderOption(
                    option_id=f"to_n{goal}_from_n{src}",
                    node_path=tuple(path),
                    operators=tuple(ops),
                    termination=(goal,),
                    probability=prob,
                )
            )
    return options


def lift(level: LevelModel, k: int | None = None, seed: int = 0) -> LevelModel:
    """Build the next level: subgoal nodes become the states, higher-order
    options become the operators, and the level's graph is re-derived from
    simulated executions of those options over the current graph."""
    graph = level.graph
    n = graph.n_nodes()
    if k is None:
        k = max(2, math.ceil(n / 10))
    if n < 2 or k < 2 or k > n:
        raise DegenerateLevel(f"{n} nodes at level {level.level}")
    subgoals = voterank(graph, k)
    if len(subgoals) < 2:
        raise DegenerateLevel("fewer than 2 subgoals")
    options = make_subgoal_options(graph, subgoals)
    # next level's graph: subgoal nodes, connected by the composed options
    sub_set = set(subgoals)
    remap = {old: new for new, old in enumerate(sorted(sub_set))}
    old_nodes = {nd.node_id: nd for nd in graph.nodes}
    nodes = tuple(
        GraphNode(remap[i], old_nodes[i].signature, old_nodes[i].centroid)
        for i in sorted(sub_set)
    )
    edges = []
    for op in options:
        if op.node_path[0] in sub_set:
            edges.append(
                GraphEdge(
                    remap[op.node_path[0]],
                    remap[op.termination[0]],
                    op.option_id,
                    op.probability,
                )
            )
    return LevelModel(level=level.level + 1, graph=TransitionGraph(nodes, tuple(edges)), options=tuple(options))


def lift_partitions(level: LevelModel, n_sim: int = 50, seed: int = 0):
    """Re-run the subgoal partition pipeline on simulated executions of the
    level's higher-order options (start/end node centroids, success by the
    composed path probability). Returns {option_id: [Partition, ...]}."""
    from .partition import ClusterParams, partition_option_vectors

    rng = np.random.default_rng(seed)
    graph = level.graph
    cent = {n.node_id: n.centroid for n in graph.nodes}
    by_goal: dict[int, list[HigherOrderOption]] = {}
    for op in level.options:
        by_goal.setdefault(op.termination[0], []).append(op)
    out = {}
    remap_cent = {n.signature: n.centroid for n in graph.nodes}
    for goal, ops in sorted(by_goal.items()):
        starts, ends = [], []
        for op in ops:
            for _ in range(max(1, n_sim // max(len(ops), 1))):
                if rng.random() <= op.probability:
                    # centroids are keyed by pre-lift ids; fall back to any
                    # centroid carried on the lifted nodes
                    s = cent.get(op.node_path[0])
                    e = cent.get(op.termination[0])
                    if s is None or e is None:
                        continue
                    starts.append(s)
                    ends.append(e)
        if len(starts) >= 1:
            out[f"reach_n{goal}"] = partition_option_vectors(
                f"reach_n{goal}",
                np.array(starts),
                np.array(ends),
                ClusterParams(epsilon=max(1e-6, 0.05 * _diameter(np.array(ends))), min_pts=1),
            )
    return out


def _diameter(pts: np.ndarray) -> float:
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return float(np.linalg.norm(hi - lo))


def build_hierarchy(model, max_levels: int = 10, seed: int = 0) -> list[LevelModel]:
    """Stack levels until degenerate or the node count stops shrinking."""
    levels = [LevelModel(level=0, graph=build_graph(model, seed=seed), options=())]
    while len(levels) < max_levels:
        try:
            nxt = lift(levels[-1], seed=seed)
        except DegenerateLevel:
            break
        if nxt.graph.n_nodes() >= levels[-1].graph.n_nodes():
            break
        levels.append(nxt)
    return levels


def path_length_histogram(graph: TransitionGraph) -> dict[int, int]:
    """All-pairs shortest path lengths (unit weights, directed) over connected
    ordered pairs."""
    out = graph.out_edges()
    hist: dict[int, int] = {}
    for n in graph.nodes:
        depth = {n.node_id: 0}
        q = [n.node_id]
        while q:
            v = q.pop(0)
            for e in out[v]:
                if e.dst not in depth:
                    depth[e.dst] = depth[v] + 1
                    q.append(e.dst)
        for m, d in depth.items():
            if m != n.node_id:
                hist[d] = hist.get(d, 0) + 1
    return dict(sorted(hist.items()))


def histogram_stats(hist: dict[int, int]) -> tuple[int, float]:
    """(max length, mean length) of a path-length histogram."""
    if not hist:
        return 0, 0.0
    total = sum(hist.values())
    mean = sum(l * c for l, c in hist.items()) / total
    return max(hist), mean


# --- export --------------------------------------------------------------------


def graph_to_text(graph: TransitionGraph) -> str:
    """Adjacency-list text with node centroids (the proposition summary)."""
    buf = io.StringIO()
    buf.write("# symplan-graph v1\n")
    out = graph.out_edges()
    for n in graph.nodes:
        cent = ",".join("%.6g" % v for v in n.centroid)
        buf.write(f"node {n.node_id} centroid={cent}\n")
        for e in sorted(out[n.node_id], key=lambda e: (e.dst, e.operator)):
            buf.write(f"  -> {e.dst} op={e.operator} p={e.probability:.6f}\n")
    return buf.getvalue()


def histograms_to_csv(hists: list[dict[int, int]]) -> str:
    """CSV rows (level, length, count) for a stack of per-level histograms."""
    lines = ["level,length,count"]
    for lvl, h in enumerate(hists):
        for length in sorted(h):
            lines.append(f"{lvl},{length},{h[length]}")
    return "\n".join(lines) + "\n"
