"""Object-centric pipeline: per-object symbols, effect-equivalence types,
typed operators, location-label grounding, and the PCA featurization path.

Options in the rooms domain are parameterized by a target object, so
per-object data association is exact. Preconditions live in an egocentric
relative feature space (distance to target, reachability through open doors,
target state, inventory), which is what makes typed operators transferable;
only the agent-location labels are task-specific and relearned per task.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientData, RankDeficient, SchemaMismatch
from .kernels import kth_neighbor_dist
from .partition import ClusterParams, cluster_effects_detailed
from .symbols import (
    EffectSymbol,
    Kde,
    PreconditionModel,
    fit_precondition,
    precondition_from_doc,
    precondition_to_doc,
    symbol_from_doc,
    symbol_to_doc,
    symbols_equivalent,
)
from .smdp import Dataset
from .envs.rooms import RoomsEnv, RoomsSpec

_SUPPORT_CAP = 600


def _cap(arr: np.ndarray, cap: int = _SUPPORT_CAP) -> np.ndarray:
    if len(arr) <= cap:
        return arr
    idx = np.linspace(0, len(arr) - 1, cap).astype(int)
    return arr[idx]


# --- PCA --------------------------------------------------------------------


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (K, D), rows orthonormal
    explained_variance: np.ndarray  # (K,)


def pca_fit(rasters: np.ndarray, k: int = 40) -> PcaModel:
    """Mean-centered PCA; components ordered by descending variance.
    Pads with zero components (and warns) when rank < k."""
    X = np.atleast_2d(np.asarray(rasters, dtype=np.float64))
    n, d = X.shape
    if n < k:
        raise InsufficientData(f"need >= {k} samples, got {n}")
    mean = X.mean(axis=0)
    Xc = X - mean
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    var = (s**2) / max(n - 1, 1)
    nonzero = int((s > 1e-12 * max(s[0], 1.0)).sum()) if len(s) else 0
    take = min(k, nonzero)
    comps = vt[:take]
    ev = var[:take]
    if take < k:
        warnings.warn(f"rank {take} < requested {k}; padding zero components", RankDeficient)
        comps = np.vstack([comps, np.zeros((k - take, d))])
        ev = np.concatenate([ev, np.zeros(k - take)])
    return PcaModel(mean=mean, components=comps, explained_variance=ev)


def pca_transform(model: PcaModel, rasters: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(rasters, dtype=np.float64))
    return (X - model.mean) @ model.components.T


def pca_reconstruct(model: PcaModel, codes: np.ndarray) -> np.ndarray:
    return np.atleast_2d(codes) @ model.components + model.mean


# --- synthetic raster path ----------------------------------------------------

RASTER_H, RASTER_W = 24, 32


def render_raster(spec: RoomsSpec, x: np.ndarray, env: RoomsEnv | None = None) -> np.ndarray:
    """Tiny greyscale top-down rendering of a factored rooms state; stands in
    for downscaled camera frames so the PCA path stays exercised."""
    env = env or RoomsEnv(spec)
    img = np.zeros((RASTER_H, RASTER_W))
    slices = env.object_slices()
    xs = [r[0] for r in spec.rooms] + [r[2] for r in spec.rooms]
    zs = [r[1] for r in spec.rooms] + [r[3] for r in spec.rooms]
    x0, x1, z0, z1 = min(xs), max(xs), min(zs), max(zs)

    def to_px(px, pz):
        c = int((px - x0) / max(x1 - x0, 1e-9) * (RASTER_W - 3)) + 1
        r = int((pz - z0) / max(z1 - z0, 1e-9) * (RASTER_H - 3)) + 1
        return r, c

    for rect in spec.rooms:
        ra, ca = to_px(rect[0], rect[1])
        rb, cb = to_px(rect[2], rect[3])
        img[ra : rb + 1, ca : cb + 1] = 0.15
    shade = {"door": 0.5, "lever": 0.65, "chest": 0.8, "gold": 0.9, "key": 0.75}
    for oid, kind in env.objects:
        f = x[slices[oid]]
        r, c = to_px(f[0], f[1])
        img[r, c] = shade[kind] + 0.1 * f[2] - 0.3 * f[3]
    ar, ac = to_px(x[0], x[2])
    img[ar, ac] = 1.0
    return img.ravel()


# --- relative featurization -----------------------------------------------------


class RoomsAdapter:
    """Bridges factored rooms states and the egocentric relative feature
    space used by typed preconditions."""

    REL_DIM = 5  # dist, reachable, state, possessed, key_held

    def __init__(self, spec: RoomsSpec):
        self.spec = spec
        self.env = RoomsEnv(spec)
        self.slices = self.env.object_slices()
        self.kinds = dict(self.env.objects)
        self._door_ids = [d["id"] for d in spec.doors]
        self._key_ids = [i["id"] for i in spec.items if i["kind"] == "key"]
        self._door_state_cols = [self.slices[d].start + 2 for d in self._door_ids]
        self._door_rooms = [d["rooms"] for d in spec.doors]
        self._rects = np.array(spec.rooms)  # (R, 4) as x0, z0, x1, z1
        self._target_rooms = {
            v["id"]: (v["room"],) for v in spec.levers
        } | {i["id"]: (i["room"],) for i in spec.items}
        self._target_rooms |= {d["id"]: d["rooms"] for d in spec.doors}
        self._reach_cache: dict[tuple, frozenset] = {}

    def _rooms_of(self, X: np.ndarray) -> np.ndarray:
        """Room index per row: containing rectangle, else nearest center."""
        ax, az = X[:, 0:1], X[:, 2:3]
        r = self._rects
        inside = (r[:, 0] - 1e-9 <= ax) & (ax <= r[:, 2] + 1e-9) & (r[:, 1] - 1e-9 <= az) & (az <= r[:, 3] + 1e-9)
        cx = (r[:, 0] + r[:, 2]) / 2.0
        cz = (r[:, 1] + r[:, 3]) / 2.0
        d2 = (ax - cx) ** 2 + (az - cz) ** 2
        return np.where(inside.any(axis=1), inside.argmax(axis=1), d2.argmin(axis=1))

    def _reachable_set(self, room: int, bits: tuple) -> frozenset:
        key = (room, bits)
        hit = self._reach_cache.get(key)
        if hit is not None:
            return hit
        seen = {room}
        frontier = [room]
        while frontier:
            cur = frontier.pop()
            for di, (a, b) in enumerate(self._door_rooms):
                if not bits[di]:
                    continue
                for u, v in ((a, b), (b, a)):
                    if u == cur and v not in seen:
                        seen.add(v)
                        frontier.append(v)
        out = frozenset(seen)
        self._reach_cache[key] = out
        return out

    def rel_features(self, X: np.ndarray, target: str) -> np.ndarray:
        X = np.atleast_2d(X)
        sl = self.slices[target]
        ax, az = X[:, 0], X[:, 2]
        tx, tz = X[:, sl.start], X[:, sl.start + 1]
        dist = np.sqrt((ax - tx) ** 2 + (az - tz) ** 2)
        state = X[:, sl.start + 2]
        possessed = X[:, sl.start + 3]
        key_held = np.zeros(len(X))
        for kid in self._key_ids:
            key_held = np.maximum(key_held, X[:, self.slices[kid].start + 3])
        rooms = self._rooms_of(X)
        door_bits = X[:, self._door_state_cols] > 0.5
        tgt_rooms = self._target_rooms[target]
        keys = np.column_stack([rooms, door_bits.astype(int)])
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        uniq_reach = np.empty(len(uniq))
        for u, row in enumerate(uniq):
            hops = self._reachable_set(int(row[0]), tuple(bool(b) for b in row[1:]))
            uniq_reach[u] = 1.0 if any(r in hops for r in tgt_rooms) else 0.0
        reach = uniq_reach[inv]
        return np.column_stack([dist, reach, state, possessed, key_held])

    def agent_xz(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        return X[:, [0, 2]]


# --- per-object operator learning -------------------------------------------------


@dataclass(frozen=True)
class ObjectOperator:
    """One (option kind, target object, outcome partition) abstraction."""

    kind: str
    target: str
    partition_id: int
    delta: tuple[float, float]  # (state, possessed) change defining the outcome
    precondition: PreconditionModel
    effect: EffectSymbol  # over the target's local feature indices (may be empty mask)
    side_effects: tuple[EffectSymbol, ...]  # on other objects, sorted by mask
    rel_pos: np.ndarray
    rel_neg: np.ndarray
    n_train: int

    def effect_signature(self):
        return (self.delta, self.effect.mask, tuple(s.mask for s in self.side_effects))


def _local_changes(xs, xe, sl) -> np.ndarray:
    return np.abs(xe[:, sl] - xs[:, sl]) > 1e-9


def learn_object_operators(
    dataset: Dataset, adapter: RoomsAdapter, min_successes: int = 3
) -> tuple[list[ObjectOperator], dict[str, frozenset]]:
    """Run the partition/mask/density pipeline per (option kind, target).

    Returns the per-object operators and each object's type signature (the
    set of option kinds under which its features ever change, including as a
    side effect)."""
    xs = np.array([s.x_start for s in dataset.samples])
    xe = np.array([s.x_end for s in dataset.samples])
    changed_under: dict[str, set] = {oid: set() for oid in adapter.kinds}
    by_option: dict[str, list[int]] = {}
    for i, s in enumerate(dataset.samples):
        by_option.setdefault(s.option_id, []).append(i)
        if s.success:
            kind, tgt = s.option_id.split(":", 1)
            for oid, sl in adapter.slices.items():
                if oid != "agent" and _local_changes(xs[i : i + 1], xe[i : i + 1], sl).any():
                    # side effects are tagged so e.g. a lever-linked door is
                    # not conflated with the lever itself
                    changed_under[oid].add(kind if oid == tgt else kind + "*")

    ops: list[ObjectOperator] = []
    for option_id in sorted(by_option):
        kind, target = option_id.split(":", 1)
        idx = by_option[option_id]
        succ = [i for i in idx if dataset.samples[i].success]
        fail = [i for i in idx if not dataset.samples[i].success]
        if len(succ) < min_successes:
            continue
        sl = adapter.slices[target]
        # outcome partitions over the change in the target's discrete state
        # features (end values alone would split on incidental start state)
        deltas = (xe[succ] - xs[succ])[:, [sl.start + 2, sl.start + 3]]
        clusters, _ = cluster_effects_detailed(deltas, ClusterParams(epsilon=0.25, min_pts=1))
        rel_fail = adapter.rel_features(xs[fail], target) if fail else np.zeros((0, adapter.REL_DIM))
        for pid, cl in enumerate(clusters):
            mem = [succ[m] for m in cl.members]
            # target effect over changed local dims
            loc_changed = _local_changes(xs[mem], xe[mem], sl)
            mask = tuple(int(j) for j in np.flatnonzero(loc_changed.mean(axis=0) >= 0.05))
            eff = EffectSymbol(
                name=f"{kind}_{target}_p{pid}",
                mask=mask,
                density=Kde.fit(xe[mem][:, [sl.start + j for j in mask]] if mask else np.zeros((len(mem), 0))),
            )
            # side effects on other objects
            sides = []
            for oid, osl in sorted(adapter.slices.items()):
                if oid in (target, "agent"):
                    continue
                och = _local_changes(xs[mem], xe[mem], osl)
                omask = tuple(int(j) for j in np.flatnonzero(och.mean(axis=0) >= 0.5))
                if omask:
                    sides.append(
                        EffectSymbol(
                            name=f"{kind}_{target}_p{pid}_side",
                            mask=omask,
                            density=Kde.fit(xe[mem][:, [osl.start + j for j in omask]]),
                        )
                    )
            pos = adapter.rel_features(xs[mem], target)
            others = [i for i in succ if i not in set(mem)]
            neg_rows = [rel_fail] if len(rel_fail) else []
            if others:
                neg_rows.append(adapter.rel_features(xs[others], target))
            neg = np.vstack(neg_rows) if neg_rows else np.zeros((0, adapter.REL_DIM))
            try:
                pre = fit_precondition(pos, neg if len(neg) else None)
            except InsufficientData:
                continue
            ops.append(
                ObjectOperator(
                    kind=kind,
                    target=target,
                    partition_id=pid,
                    delta=(round(float(cl.centroid[0]), 6), round(float(cl.centroid[1]), 6)),
                    precondition=pre,
                    effect=eff,
                    side_effects=tuple(sorted(sides, key=lambda s: s.mask)),
                    rel_pos=_cap(pos),
                    rel_neg=_cap(neg),
                    n_train=len(mem),
                )
            )
    signatures = {oid: frozenset(v) for oid, v in changed_under.items()}
    return ops, signatures


# --- effect-equivalence type merging ------------------------------------------------


@dataclass(frozen=True)
class ObjectType:
    type_id: int
    members: tuple[str, ...]
    signature: frozenset
    operators: tuple[ObjectOperator, ...]  # representative, pooled over members


def _object_effects_equivalent(a: list[ObjectOperator], b: list[ObjectOperator], threshold: float) -> bool:
    """Pairwise effect equivalence of two objects' operator lists."""
    ka = sorted({o.kind for o in a})
    kb = sorted({o.kind for o in b})
    if ka != kb:
        return False
    for kind in ka:
        oa = sorted([o for o in a if o.kind == kind], key=lambda o: o.effect_signature())
        ob = sorted([o for o in b if o.kind == kind], key=lambda o: o.effect_signature())
        if len(oa) != len(ob):
            return False
        for x, y in zip(oa, ob):
            if not symbols_equivalent(x.effect, y.effect, threshold):
                return False
            if len(x.side_effects) != len(y.side_effects):
                return False
            if not all(symbols_equivalent(p, q, threshold) for p, q in zip(x.side_effects, y.side_effects)):
                return False
    return True


def _pool_object_ops(ops_by_member: list[list[ObjectOperator]]) -> tuple[ObjectOperator, ...]:
    """Representative operators refit on pooled samples across members."""
    rep: list[ObjectOperator] = []
    base = ops_by_member[0]
    for op in sorted(base, key=lambda o: (o.kind, o.partition_id)):
        pos = [op.rel_pos]
        neg = [op.rel_neg] if len(op.rel_neg) else []
        eff_sup = [op.effect.density.support]
        n = op.n_train
        for other in ops_by_member[1:]:
            matches = [
                o
                for o in other
                if o.kind == op.kind and o.effect_signature() == op.effect_signature()
            ]
            for m in matches:
                pos.append(m.rel_pos)
                if len(m.rel_neg):
                    neg.append(m.rel_neg)
                eff_sup.append(m.effect.density.support)
                n += m.n_train
        pos_all = _cap(np.vstack(pos))
        neg_all = _cap(np.vstack(neg)) if neg else np.zeros((0, pos_all.shape[1]))
        try:
            pre = fit_precondition(pos_all, neg_all if len(neg_all) else None)
        except InsufficientData:
            pre = op.precondition
        eff = replace(op.effect, density=Kde.fit(_cap(np.vstack(eff_sup))))
        rep.append(
            replace(op, precondition=pre, effect=eff, rel_pos=pos_all, rel_neg=neg_all, n_train=n)
        )
    return tuple(rep)


def merge_types(
    ops: list[ObjectOperator],
    signatures: dict[str, frozenset],
    threshold: float = 0.1,
) -> list[ObjectType]:
    """Group objects by type signature, then merge signature-mates whose
    per-option effect symbols are pairwise equivalent. Objects untouched by
    every option become singleton inert types."""
    by_target: dict[str, list[ObjectOperator]] = {}
    for op in ops:
        by_target.setdefault(op.target, []).append(op)
    groups: dict[frozenset, list[str]] = {}
    for oid in sorted(signatures):
        groups.setdefault(signatures[oid], []).append(oid)

    types: list[ObjectType] = []
    for sig in sorted(groups, key=lambda s: tuple(sorted(s))):
        pending = list(groups[sig])
        while pending:
            seed = pending.pop(0)
            members = [seed]
            rest = []
            for other in pending:
                if _object_effects_equivalent(
                    by_target.get(seed, []), by_target.get(other, []), threshold
                ):
                    members.append(other)
                else:
                    rest.append(other)
            pending = rest
            rep = _pool_object_ops([by_target.get(m, []) for m in members]) if by_target.get(seed) else ()
            types.append(ObjectType(type_id=0, members=tuple(members), signature=sig, operators=rep))
    types.sort(key=lambda t: t.members[0])
    return [replace(t, type_id=i) for i, t in enumerate(types)]


def type_of(types: list[ObjectType], obj_id: str) -> ObjectType | None:
    for t in types:
        if obj_id in t.members:
            return t
    return None


# --- grounding ---------------------------------------------------------------------


@dataclass(frozen=True)
class TypedGroundedOperator:
    """Typed operator instantiated for one member object at one location label."""

    name: str
    option_id: str
    kind: str
    target: str
    type_id: int
    partition_id: int
    start_label: int
    end_label_dist: tuple[tuple[int, float], ...]
    precondition: PreconditionModel
    adapter: RoomsAdapter
    xz_support: np.ndarray
    rel_support: np.ndarray  # pooled relative features of the typed operator's successes
    d_end_support: np.ndarray
    x_start_support: np.ndarray
    x_end_support: np.ndarray
    epsilon: float
    rel_radius: float

    def precondition_prob(self, D: np.ndarray, X: np.ndarray) -> np.ndarray:
        """Classifier probability gated by (a) membership in the cell's
        agent-location region and (b) proximity to a recorded successful
        execution in relative-feature space. The support gate catches
        rarely-varying discrete enablers (held key, reachability) that greedy
        feature selection can miss when positives are scarce."""
        X = np.atleast_2d(X)
        inside = kth_neighbor_dist(self.adapter.agent_xz(X), self.xz_support, 1) <= self.epsilon
        if not inside.any():
            return np.zeros(len(X))
        rel = self.adapter.rel_features(X, self.target)
        near = kth_neighbor_dist(rel[:, 1:], self.rel_support[:, 1:], 1) <= self.rel_radius
        gate = inside & near
        if not gate.any():
            return np.zeros(len(X))
        p = np.zeros(len(X))
        p[gate] = self.precondition.prob(rel[gate])
        return p

    def apply(self, D: np.ndarray, X: np.ndarray, rng: np.random.Generator):
        """Agent position is set absolutely from a recorded execution; object
        features move by that execution's delta, leaving unrelated state (e.g.
        doors opened by earlier plan steps) intact."""
        pick = rng.integers(len(self.x_end_support), size=len(D))
        X2 = X + (self.x_end_support[pick] - self.x_start_support[pick])
        X2[:, :3] = self.x_end_support[pick][:, :3]
        return self.d_end_support[pick].copy(), X2


def ground_typed(
    types: list[ObjectType],
    dataset: Dataset,
    adapter: RoomsAdapter,
    epsilon: float = 2.0,
) -> tuple[list[TypedGroundedOperator], dict]:
    """Instantiate typed operators per member object and agent-location label.

    Location labels cluster the agent's xz position at option start; the
    label linking table (start label -> end label distribution) is learned
    per grounded operator, exactly as in the agent-space pipeline."""
    xs = np.array([s.x_start for s in dataset.samples])
    xe = np.array([s.x_end for s in dataset.samples])
    grounded: list[TypedGroundedOperator] = []
    links: dict[str, tuple] = {}
    by_option: dict[str, list[int]] = {}
    for i, s in enumerate(dataset.samples):
        if s.success:
            by_option.setdefault(s.option_id, []).append(i)

    for option_id in sorted(by_option):
        kind, target = option_id.split(":", 1)
        t = type_of(types, target)
        if t is None:
            continue
        reps = [o for o in t.operators if o.kind == kind]
        if not reps:
            continue
        idx = by_option[option_id]
        sl = adapter.slices[target]
        deltas = (xe - xs)[:, [sl.start + 2, sl.start + 3]]
        for rep in reps:
            # samples whose (state, possessed) change matches this outcome
            mem = [
                i for i in idx if float(np.abs(deltas[i] - np.array(rep.delta)).max()) <= 0.25
            ]
            if not mem:
                continue
            xz = adapter.agent_xz(xs[mem])
            clusters, _ = cluster_effects_detailed(xz, ClusterParams(epsilon=epsilon, min_pts=1))
            cells = []
            for label, cl in enumerate(clusters):
                rows = [mem[m] for m in cl.members]
                cells.append((label, rows, xz[list(cl.members)]))
            # label of an end position: nearest cell within epsilon
            def end_label(pos):
                best, best_d = -1, epsilon
                for label, _, sup in cells:
                    d = float(kth_neighbor_dist(pos[None], sup, 1)[0])
                    if d <= best_d:
                        best, best_d = label, d
                return best

            for label, rows, sup in cells:
                counts: dict[int, int] = {}
                for i in rows:
                    e = end_label(adapter.agent_xz(xe[i : i + 1])[0])
                    counts[e] = counts.get(e, 0) + 1
                total = sum(counts.values())
                dist = tuple(sorted((l, c / total) for l, c in counts.items()))
                name = f"{option_id}#t{t.type_id}p{rep.partition_id}#l{label}"
                links[name] = dist
                grounded.append(
                    TypedGroundedOperator(
                        name=name,
                        option_id=option_id,
                        kind=kind,
                        target=target,
                        type_id=t.type_id,
                        partition_id=rep.partition_id,
                        start_label=label,
                        end_label_dist=dist,
                        precondition=rep.precondition,
                        adapter=adapter,
                        xz_support=sup,
                        rel_support=rep.rel_pos,
                        d_end_support=np.array([dataset.samples[i].d_end for i in rows]),
                        x_start_support=xs[rows],
                        x_end_support=xe[rows],
                        epsilon=epsilon,
                        rel_radius=0.5,  # binary gate dims: exact combo match
                    )
                )
    return grounded, links


# --- type-level transfer --------------------------------------------------------------


def object_transfer_update(
    types: list[ObjectType],
    dataset: Dataset,
    adapter: RoomsAdapter,
    threshold: float = 0.1,
) -> tuple[list[ObjectType], int, int]:
    """Match new-task types to the library by signature + effect equivalence;
    transferred types pool their operator supports, unmatched types are
    appended. Location labels are never part of the library (always
    relearned)."""
    ops, signatures = learn_object_operators(dataset, adapter)
    fresh = merge_types(ops, signatures, threshold)
    lib = list(types)
    n_transferred = 0
    n_new = 0
    for cand in fresh:
        match_i = None
        for i, old in enumerate(lib):
            if old.signature != cand.signature or len(old.operators) != len(cand.operators):
                continue
            oa = sorted(old.operators, key=lambda o: (o.kind, o.effect_signature()))
            ob = sorted(cand.operators, key=lambda o: (o.kind, o.effect_signature()))
            if all(
                a.kind == b.kind
                and symbols_equivalent(a.effect, b.effect, threshold)
                and len(a.side_effects) == len(b.side_effects)
                and all(symbols_equivalent(p, q, threshold) for p, q in zip(a.side_effects, b.side_effects))
                for a, b in zip(oa, ob)
            ):
                match_i = i
                break
        if match_i is None:
            lib.append(replace(cand, type_id=len(lib)))
            n_new += len(cand.operators) if cand.operators else 1
        else:
            old = lib[match_i]
            members = tuple(sorted(set(old.members) | set(cand.members)))
            pooled = _pool_reps(old.operators, cand.operators)
            lib[match_i] = replace(old, members=members, operators=pooled)
            n_transferred += len(cand.operators) if cand.operators else 1
    return lib, n_transferred, n_new


def _pool_reps(a: tuple[ObjectOperator, ...], b: tuple[ObjectOperator, ...]):
    oa = sorted(a, key=lambda o: (o.kind, o.effect_signature()))
    ob = sorted(b, key=lambda o: (o.kind, o.effect_signature()))
    out = []
    for x, y in zip(oa, ob):
        pos = _cap(np.vstack([x.rel_pos, y.rel_pos]))
        neg_rows = [r for r in (x.rel_neg, y.rel_neg) if len(r)]
        neg = _cap(np.vstack(neg_rows)) if neg_rows else np.zeros((0, pos.shape[1]))
        try:
            pre = fit_precondition(pos, neg if len(neg) else None)
        except InsufficientData:
            pre = x.precondition
        eff = replace(
            x.effect,
            density=Kde.fit(_cap(np.vstack([x.effect.density.support, y.effect.density.support]))),
        )
        out.append(replace(x, precondition=pre, effect=eff, rel_pos=pos, rel_neg=neg, n_train=x.n_train + y.n_train))
    return tuple(out)


# --- serialization -----------------------------------------------------------------


def _op_to_doc(op: ObjectOperator) -> dict:
    return {
        "kind": op.kind,
        "target": op.target,
        "partition_id": op.partition_id,
        "delta": list(op.delta),
        "precondition": precondition_to_doc(op.precondition),
        "effect": symbol_to_doc(op.effect),
        "side_effects": [symbol_to_doc(s) for s in op.side_effects],
        "rel_pos": op.rel_pos.tolist(),
        "rel_neg": op.rel_neg.tolist(),
        "n_train": op.n_train,
    }


def _op_from_doc(doc: dict) -> ObjectOperator:
    rel_pos = np.array(doc["rel_pos"], dtype=np.float64)
    rel_neg = np.array(doc["rel_neg"], dtype=np.float64)
    if rel_neg.size == 0:
        rel_neg = rel_neg.reshape((0, rel_pos.shape[1] if rel_pos.ndim == 2 else 0))
    return ObjectOperator(
        kind=doc["kind"],
        target=doc["target"],
        partition_id=doc["partition_id"],
        delta=tuple(doc["delta"]),
        precondition=precondition_from_doc(doc["precondition"]),
        effect=symbol_from_doc(doc["effect"]),
        side_effects=tuple(symbol_from_doc(d) for d in doc["side_effects"]),
        rel_pos=rel_pos,
        rel_neg=rel_neg,
        n_train=doc["n_train"],
    )


def save_type_library(types: list[ObjectType], path: str) -> None:
    doc = {
        "format": "symplan-types v1",
        "types": [
            {
                "type_id": t.type_id,
                "members": list(t.members),
                "signature": sorted(t.signature),
                "operators": [_op_to_doc(o) for o in t.operators],
            }
            for t in types
        ],
    }
    with open(path, "w") as f:
        json.dump(doc, f)


def load_type_library(path: str) -> list[ObjectType]:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != "symplan-types v1":
        raise SchemaMismatch(f"unexpected format {doc.get('format')!r}")
    return [
        ObjectType(
            type_id=d["type_id"],
            members=tuple(d["members"]),
            signature=frozenset(d["signature"]),
            operators=tuple(_op_from_doc(o) for o in d["operators"]),
        )
        for d in doc["types"]
    ]
