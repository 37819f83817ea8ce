"""Two-phase portable operator learning.

Phase 1 learns option operators purely in agent space (partition -> mask ->
effect densities -> precondition), so they transfer between tasks that share
the egocentric observation encoding. Phase 2 clusters problem-space start
states per operator into integer labels, estimates how labels change under
execution (the linking table), and grounds each (operator, start label) pair
into a task-specific operator usable for planning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InsufficientData, MissingLink
from .kernels import kth_neighbor_dist
from .partition import ClusterParams, partition_option_vectors
from .symbols import (
    EffectSymbol,
    Kde,
    PreconditionModel,
    compute_mask,
    fit_effect_density,
    fit_precondition,
    kde_from_doc,
    kde_symmetric_kl,
    kde_to_doc,
    precondition_from_doc,
    precondition_to_doc,
    symbol_from_doc,
    symbol_to_doc,
    symbols_equivalent,
)
from .smdp import Dataset

#: cap on stored support points per operator (deterministic strided subsample)
_SUPPORT_CAP = 600


def _cap(arr: np.ndarray, cap: int = _SUPPORT_CAP) -> np.ndarray:
    if len(arr) <= cap:
        return arr
    idx = np.linspace(0, len(arr) - 1, cap).astype(int)
    return arr[idx]


@dataclass(frozen=True)
class PortableOperator:
    option_id: str
    agent_partition_id: int
    precondition: PreconditionModel
    effects: tuple[tuple[EffectSymbol, float], ...]
    pos_support: np.ndarray  # full agent-space start states (positives)
    neg_support: np.ndarray
    n_train: int = 0

    @property
    def support_kde(self) -> Kde:
        return Kde.fit(self.pos_support)

    def key(self) -> str:
        return f"{self.option_id}#p{self.agent_partition_id}"


@dataclass(frozen=True)
class OperatorLibrary:
    operators: tuple[PortableOperator, ...] = ()
    version: int = 0

    def __len__(self) -> int:
        return len(self.operators)

    def for_option(self, option_id: str) -> list[tuple[int, PortableOperator]]:
        return [(i, op) for i, op in enumerate(self.operators) if op.option_id == option_id]


def _fit_operator(
    option_id: str,
    pid: int,
    starts: np.ndarray,
    ends: np.ndarray,
    part,
    negatives: np.ndarray,
    prefix: str,
) -> PortableOperator:
    idx = list(part.start_indices)
    mask = compute_mask(starts[idx], ends[idx])
    effects = []
    for k, (cluster, prob) in enumerate(part.outcomes):
        mem = list(cluster.members)
        sym = fit_effect_density(ends[mem], mask, name=f"{prefix}{option_id}_p{pid}_e{k}")
        effects.append((sym, prob))
    pre = fit_precondition(starts[idx], negatives if len(negatives) else None)
    return PortableOperator(
        option_id=option_id,
        agent_partition_id=pid,
        precondition=pre,
        effects=tuple(effects),
        pos_support=_cap(starts[idx]),
        neg_support=_cap(np.asarray(negatives)),
        n_train=len(idx),
    )


def operators_match(a: PortableOperator, b: PortableOperator, threshold: float = 0.1) -> bool:
    """Transfer test: same option, equivalent precondition support density and
    pairwise-equivalent effect symbols."""
    if a.option_id != b.option_id or len(a.effects) != len(b.effects):
        return False
    if kde_symmetric_kl(a.support_kde, b.support_kde) >= threshold:
        return False
    ea = sorted(a.effects, key=lambda e: (e[0].mask, tuple(e[0].density.support.mean(axis=0)) if len(e[0].density.support) else ()))
    eb = sorted(b.effects, key=lambda e: (e[0].mask, tuple(e[0].density.support.mean(axis=0)) if len(e[0].density.support) else ()))
    return all(symbols_equivalent(x[0], y[0], threshold) for x, y in zip(ea, eb))


def _merge_operators(old: PortableOperator, new: PortableOperator) -> PortableOperator:
    pos = _cap(np.vstack([old.pos_support, new.pos_support]))
    if len(old.neg_support) and len(new.neg_support):
        neg = _cap(np.vstack([old.neg_support, new.neg_support]))
    else:
        neg = old.neg_support if len(old.neg_support) else new.neg_support
    pre = fit_precondition(pos, neg if len(neg) else None)
    n = old.n_train + new.n_train
    ea = sorted(old.effects, key=lambda e: (e[0].mask, tuple(e[0].density.support.mean(axis=0)) if len(e[0].density.support) else ()))
    eb = sorted(new.effects, key=lambda e: (e[0].mask, tuple(e[0].density.support.mean(axis=0)) if len(e[0].density.support) else ()))
    effects = []
    for (sa, pa), (sb, pb) in zip(ea, eb):
        pooled = _cap(np.vstack([sa.density.support, sb.density.support]))
        sym = EffectSymbol(sa.name, sa.mask, Kde.fit(pooled))
        prob = (pa * old.n_train + pb * new.n_train) / n
        effects.append((sym, prob))
    total = sum(p for _, p in effects)
    effects = tuple((s, p / total) for s, p in effects)
    return replace(old, precondition=pre, effects=effects, pos_support=pos, neg_support=neg, n_train=n)


def learn_portable(
    dataset: Dataset,
    cluster_params: ClusterParams | None = None,
    min_successes: int = 5,
    symbol_prefix: str = "",
) -> OperatorLibrary:
    """Phase 1: partition + symbol pipeline entirely in agent space."""
    if len(dataset) == 0:
        raise InsufficientData("empty dataset")
    ops: list[PortableOperator] = []
    for option_id in sorted(dataset.option_ids()):
        succ = dataset.for_option(option_id, successful_only=True)
        if len(succ) < min_successes:
            continue
        starts = np.array([s.d_start for s in succ])
        ends = np.array([s.d_end for s in succ])
        fails = [s for s in dataset.for_option(option_id) if not s.success]
        fail_starts = np.array([s.d_start for s in fails]) if fails else np.zeros((0, starts.shape[1]))
        params = cluster_params or ClusterParams.default_for(ends)
        try:
            parts = partition_option_vectors(option_id, starts, ends, params)
        except InsufficientData:
            continue
        for part in parts:
            others = [
                i
                for p2 in parts
                if p2.partition_id != part.partition_id
                for i in p2.start_indices
            ]
            negatives = np.vstack([fail_starts, starts[others]]) if others else fail_starts
            try:
                op = _fit_operator(
                    option_id, part.partition_id, starts, ends, part, _cap(negatives), symbol_prefix
                )
            except InsufficientData:
                continue
            for prev in ops:
                if operators_match(prev, op):
                    break
            else:
                ops.append(op)
    return OperatorLibrary(operators=tuple(ops), version=1)


def transfer_update(
    library: OperatorLibrary, dataset: Dataset, threshold: float = 0.1, **learn_kw
) -> tuple[OperatorLibrary, int, int]:
    """Match new-task partitions to existing operators; append the rest.
    The library never shrinks."""
    try:
        fresh = learn_portable(dataset, **learn_kw)
    except InsufficientData:
        return library, 0, 0
    ops = list(library.operators)
    n_transferred = 0
    n_new = 0
    for cand in fresh.operators:
        for i, old in enumerate(ops):
            if operators_match(old, cand, threshold):
                ops[i] = _merge_operators(old, cand)
                n_transferred += 1
                break
        else:
            ops.append(cand)
            n_new += 1
    return OperatorLibrary(tuple(ops), version=library.version + 1), n_transferred, n_new


# --- phase 2: labels, linking, grounding ------------------------------------


@dataclass(frozen=True)
class LabelCell:
    """One problem-space start region of one portable operator."""

    op_index: int
    label: int
    sample_indices: tuple[int, ...]
    centroid: np.ndarray
    x_support: np.ndarray


@dataclass(frozen=True)
class TaskLabeling:
    cells: tuple[LabelCell, ...]
    epsilon: float
    assignment: dict = field(default_factory=dict)  # sample index -> (op_index, label)

    def cells_of(self, op_index: int) -> list[LabelCell]:
        return [c for c in self.cells if c.op_index == op_index]


@dataclass(frozen=True)
class LabelLink:
    op_index: int
    table: tuple[tuple[int, tuple[tuple[int, float], ...]], ...]  # start -> [(end, p)]


def infer_labels(
    dataset: Dataset, library: OperatorLibrary, epsilon: float | None = None
) -> TaskLabeling:
    """Assign each successful sample to its best-matching operator, then
    cluster each operator's problem-space start states into labels.

    Clustering uses min_pts=1 (states are exact in simulation), so labels are
    connected components of the epsilon-neighborhood graph."""
    xs = np.array([s.x_start for s in dataset.samples])
    if epsilon is None:
        lo, hi = xs.min(axis=0), xs.max(axis=0)
        epsilon = max(0.05 * float(np.linalg.norm(hi - lo)), 1e-6)
    by_op: dict[int, list[int]] = {}
    assignment: dict[int, tuple[int, int]] = {}
    for si, s in enumerate(dataset.samples):
        if not s.success:
            continue
        cands = library.for_option(s.option_id)
        if not cands:
            continue
        probs = [(op.precondition.prob(s.d_start[None])[0], -i) for i, op in cands]
        best_p, neg_i = max(probs)
        if best_p < 0.05:
            continue
        by_op.setdefault(-neg_i, []).append(si)

    cells: list[LabelCell] = []
    params_cache = ClusterParams(epsilon=epsilon, min_pts=1)
    for op_index in sorted(by_op):
        idx = by_op[op_index]
        pts = xs[idx]
        from .partition import cluster_effects_detailed

        clusters, _ = cluster_effects_detailed(pts, params_cache)
        for label, cl in enumerate(clusters):
            mem = tuple(idx[m] for m in cl.members)
            cells.append(
                LabelCell(
                    op_index=op_index,
                    label=label,
                    sample_indices=mem,
                    centroid=cl.centroid,
                    x_support=pts[list(cl.members)],
                )
            )
            for si in mem:
                assignment[si] = (op_index, label)
    return TaskLabeling(cells=tuple(cells), epsilon=epsilon, assignment=assignment)


def _cell_label_of(labeling: TaskLabeling, op_index: int, x: np.ndarray) -> int:
    """Label of x in an operator's label space; -1 if outside every region."""
    best = -1
    best_d = labeling.epsilon
    for c in labeling.cells_of(op_index):
        d = float(kth_neighbor_dist(x[None], c.x_support, 1)[0])
        if d <= best_d:
            best, best_d = c.label, d
    return best


def learn_linking(dataset: Dataset, labeling: TaskLabeling) -> list[LabelLink]:
    """Empirical frequency table of start label -> end label per operator."""
    links: list[LabelLink] = []
    op_indices = sorted({c.op_index for c in labeling.cells})
    for op_index in op_indices:
        rows = []
        for c in sorted(labeling.cells_of(op_index), key=lambda c: c.label):
            counts: dict[int, int] = {}
            for si in c.sample_indices:
                end_label = _cell_label_of(labeling, op_index, dataset.samples[si].x_end)
                counts[end_label] = counts.get(end_label, 0) + 1
            total = sum(counts.values())
            dist = tuple(sorted((lbl, n / total) for lbl, n in counts.items()))
            rows.append((c.label, dist))
        links.append(LabelLink(op_index=op_index, table=tuple(rows)))
    return links


@dataclass(frozen=True)
class GroundedOperator:
    """A portable operator instantiated at one problem-space start label.

    Particle semantics: the precondition multiplies the portable agent-space
    probability by membership of x in the start region; applying the operator
    resamples (d_end, x_end) jointly from the cell's recorded executions (the
    empirical effect distribution; identical to drawing from the effect KDE in
    the zero-bandwidth limit). Unmasked agent dims persist from the particle."""

    name: str
    op_index: int
    portable: PortableOperator
    start_label: int
    end_label_dist: tuple[tuple[int, float], ...]
    x_start_support: np.ndarray
    d_end_support: np.ndarray
    x_end_support: np.ndarray
    epsilon: float

    def precondition_prob(self, D: np.ndarray, X: np.ndarray) -> np.ndarray:
        # cheap label-membership gate first; the classifier only sees rows
        # inside the cell (usually few, and zero for most cells of a state)
        inside = kth_neighbor_dist(np.atleast_2d(X), self.x_start_support, 1) <= self.epsilon
        p = np.zeros(len(inside))
        if inside.any():
            p[inside] = self.portable.precondition.prob(np.atleast_2d(D)[inside])
        return p

    def apply(self, D: np.ndarray, X: np.ndarray, rng: np.random.Generator):
        pick = rng.integers(len(self.x_end_support), size=len(D))
        return self.d_end_support[pick].copy(), self.x_end_support[pick].copy()


def ground(
    library: OperatorLibrary,
    labeling: TaskLabeling,
    links: list[LabelLink],
    dataset: Dataset,
    strict: bool = False,
) -> list[GroundedOperator]:
    """One grounded operator per (portable operator, start label) row."""
    link_by_op = {l.op_index: dict(l.table) for l in links}
    grounded: list[GroundedOperator] = []
    seen_ops = {c.op_index for c in labeling.cells}
    for op_index in sorted(seen_ops):
        if op_index not in link_by_op:
            if strict:
                raise MissingLink(f"operator index {op_index}")
            continue
        op = library.operators[op_index]
        for c in sorted(labeling.cells_of(op_index), key=lambda c: c.label):
            d_end = np.array([dataset.samples[si].d_end for si in c.sample_indices])
            x_end = np.array([dataset.samples[si].x_end for si in c.sample_indices])
            grounded.append(
                GroundedOperator(
                    name=f"{op.key()}#l{c.label}",
                    op_index=op_index,
                    portable=op,
                    start_label=c.label,
                    end_label_dist=link_by_op[op_index].get(c.label, ()),
                    x_start_support=c.x_support,
                    d_end_support=d_end,
                    x_end_support=x_end,
                    epsilon=labeling.epsilon,
                )
            )
    return grounded


# --- serialization -----------------------------------------------------------

def _a(x) -> list:
    return np.asarray(x, dtype=np.float64).tolist()


def operator_to_doc(op: PortableOperator) -> dict:
    return {
        "option_id": op.option_id,
        "agent_partition_id": op.agent_partition_id,
        "precondition": precondition_to_doc(op.precondition),
        "effects": [[symbol_to_doc(s), p] for s, p in op.effects],
        "pos_support": _a(op.pos_support),
        "neg_support": _a(op.neg_support),
        "n_train": op.n_train,
    }


def operator_from_doc(doc: dict) -> PortableOperator:
    return PortableOperator(
        option_id=doc["option_id"],
        agent_partition_id=doc["agent_partition_id"],
        precondition=precondition_from_doc(doc["precondition"]),
        effects=tuple((symbol_from_doc(s), p) for s, p in doc["effects"]),
        pos_support=np.array(doc["pos_support"], dtype=np.float64),
        neg_support=np.array(doc["neg_support"], dtype=np.float64).reshape(
            (len(doc["neg_support"]), -1)
        )
        if doc["neg_support"]
        else np.zeros((0, np.array(doc["pos_support"]).shape[1])),
        n_train=doc["n_train"],
    )


def save_library(lib: OperatorLibrary, path: str) -> None:
    with open(path, "w") as f:
        json.dump(
            {
                "format": "symplan-library v1",
                "version": lib.version,
                "operators": [operator_to_doc(op) for op in lib.operators],
            },
            f,
        )


def load_library(path: str) -> OperatorLibrary:
    with open(path) as f:
        doc = json.load(f)
    return OperatorLibrary(
        operators=tuple(operator_from_doc(d) for d in doc["operators"]),
        version=doc["version"],
    )
