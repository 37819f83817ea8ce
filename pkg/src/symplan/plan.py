"""Probabilistic plan evaluation and forward search over grounded models.

Abstract states are particle sets of (agent-space, problem-space) vectors.
Plan probability is estimated by Monte Carlo chaining: per step, particle
weights are multiplied by the operator's precondition probability, survivors
are resampled systematically, and successors are drawn from the operator's
effect distribution.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EqualityGoal:
    """Conjunction of |x[i] - v| <= tol tests over problem-space variables."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    tol: float = 1e-6
    name: str = "goal"

    def test(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        ok = np.ones(len(X), dtype=bool)
        for i, v in zip(self.indices, self.values):
            ok &= np.abs(X[:, i] - v) <= self.tol
        return ok


@dataclass(frozen=True)
class Plan:
    steps: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class PlanResult:
    plan: Plan | None
    probability: float

    @property
    def found(self) -> bool:
        return self.plan is not None


@dataclass
class GroundedModel:
    """Operators + initial particle support + goal predicate.

    Operators are duck-typed: anything with .name, .precondition_prob(D, X)
    and .apply(D, X, rng) works (learned operators and analytic toy operators
    alike)."""

    operators: list
    initial_d: np.ndarray
    initial_x: np.ndarray
    goal: EqualityGoal

    def __post_init__(self):
        self.initial_d = np.atleast_2d(np.asarray(self.initial_d, dtype=np.float64))
        self.initial_x = np.atleast_2d(np.asarray(self.initial_x, dtype=np.float64))

    def by_name(self) -> dict:
        return {op.name: op for op in self.operators}

    def option_of(self, op) -> str:
        if hasattr(op, "portable"):
            return op.portable.option_id
        return getattr(op, "option_id", op.name)


def _systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(weights)
    cum = np.cumsum(weights)
    cum /= cum[-1]
    u = (rng.random() + np.arange(n)) / n
    return np.searchsorted(cum, u)


def _init_particles(model: GroundedModel, n: int, rng: np.random.Generator):
    idx = rng.integers(len(model.initial_x), size=n)
    return model.initial_d[idx].copy(), model.initial_x[idx].copy()


def evaluate_plan(
    model: GroundedModel,
    plan: Plan | list[str],
    n_particles: int = 10_000,
    seed: int = 0,
    check_goal: bool = False,
) -> float:
    """Probability the operator sequence executes successfully (optionally
    also requiring the goal to hold at the end). Empty plan evaluates to 1."""
    steps = plan.steps if isinstance(plan, Plan) else tuple(plan)
    ops = model.by_name()
    rng = np.random.default_rng(seed)
    D, X = _init_particles(model, n_particles, rng)
    total = 1.0
    for name in steps:
        op = ops[name]
        w = np.asarray(op.precondition_prob(D, X), dtype=np.float64)
        survival = float(w.mean())
        total *= survival
        if total <= 0.0:
            return 0.0
        idx = _systematic_resample(w, rng)
        D, X = op.apply(D[idx], X[idx], rng)
    if check_goal:
        total *= float(model.goal.test(X).mean())
    return min(1.0, max(0.0, total))


def evaluate_option_plan(
    model: GroundedModel, option_ids, n_particles: int = 10_000, seed: int = 0,
    check_goal: bool = False,
) -> tuple[float, list[str]]:
    """Evaluate a plan given as env option ids. Each particle follows the
    grounded operator of that option whose precondition it best satisfies (a
    per-particle mixture: grounded partitions tile the option's initiation
    set, so a global greedy choice would mis-route particles that sit in a
    different partition cell). Returns the success probability and, per step,
    the most-used grounded operator name."""
    rng = np.random.default_rng(seed)
    D, X = _init_particles(model, n_particles, rng)
    total = 1.0
    chosen: list[str] = []
    for oid in option_ids:
        cands = sorted(
            (op for op in model.operators if model.option_of(op) == oid),
            key=lambda o: o.name,
        )
        if not cands:
            return 0.0, chosen
        probs = np.stack([
            np.asarray(op.precondition_prob(D, X), dtype=np.float64) for op in cands
        ])
        w = probs.max(axis=0)
        assign = probs.argmax(axis=0)
        survival = float(w.mean())
        total *= survival
        if total <= 0.0:
            chosen.append(cands[int(np.bincount(assign).argmax())].name)
            return 0.0, chosen
        idx = _systematic_resample(w, rng)
        assign = assign[idx]
        D, X = D[idx], X[idx]
        D2 = np.empty_like(D)
        X2 = np.empty_like(X)
        for k in np.unique(assign):
            sel = assign == k
            D2[sel], X2[sel] = cands[int(k)].apply(D[sel], X[sel], rng)
        D, X = D2, X2
        chosen.append(cands[int(np.bincount(assign).argmax())].name)
    if check_goal:
        total *= float(model.goal.test(X).mean())
    return min(1.0, max(0.0, total)), chosen


def _signature(X: np.ndarray, decimals: int = 6) -> tuple:
    rounded = np.round(X, decimals)
    uniq = np.unique(rounded, axis=0)
    return tuple(map(tuple, uniq))


def find_plan(
    model: GroundedModel,
    max_depth: int,
    n_particles: int = 2_000,
    seed: int = 0,
    min_step_prob: float = 1e-3,
    max_expansions: int = 20_000,
) -> PlanResult:
    """Best-first forward search for the highest-probability goal-reaching
    plan within max_depth steps. Deterministic given the model, the seed and
    the tie-break rule (higher probability, then deeper node, then insertion
    order)."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    rng = np.random.default_rng(seed)
    D0, X0 = _init_particles(model, n_particles, rng)
    best_plan: Plan | None = None
    best_prob = 0.0

    counter = 0
    # among equal-probability nodes, expand the deepest first: in
    # near-deterministic models this reaches the goal quickly and the
    # best-first bound then cuts off the remaining frontier
    heap = [(-1.0, 0, (), counter)]
    states = {(): (D0, X0)}
    seen: dict[tuple, tuple[float, int]] = {}
    ops = sorted(model.operators, key=lambda o: o.name)
    expansions = 0
    while heap:
        neg_p, neg_depth, steps, _ = heapq.heappop(heap)
        prob, depth = -neg_p, -neg_depth
        if prob <= best_prob:
            break  # survival only decreases; nothing better remains
        D, X = states.pop(steps)
        g = float(model.goal.test(X).mean())
        if prob * g > best_prob:
            best_prob = prob * g
            best_plan = Plan(tuple(steps))
        if depth >= max_depth:
            continue
        expansions += 1
        if expansions > max_expansions:
            break
        for op in ops:
            w = np.asarray(op.precondition_prob(D, X), dtype=np.float64)
            survival = float(w.mean())
            p2 = prob * survival
            if survival < min_step_prob or p2 <= best_prob:
                continue
            idx = _systematic_resample(w, rng)
            D2, X2 = op.apply(D[idx], X[idx], rng)
            sig = _signature(X2)
            old = seen.get(sig)
            # revisit only with better probability or a shallower depth
            # (shallower leaves more budget to reach the goal)
            if old is not None and old[0] >= p2 and old[1] <= depth + 1:
                continue
            seen[sig] = (p2, depth + 1)
            steps2 = steps + (op.name,)
            counter += 1
            states[steps2] = (D2, X2)
            heapq.heappush(heap, (-p2, -(depth + 1), steps2, counter))
    if best_plan is None:
        return PlanResult(None, 0.0)
    return PlanResult(best_plan, best_prob)


# --- PPDDL export -------------------------------------------------------------

def export_ppddl(model: GroundedModel, domain_name: str = "symplan-domain") -> str:
    """Deterministic PPDDL text: one action per grounded operator with a
    probabilistic effect clause over its outcome distribution."""
    out = io.StringIO()
    preds: set[str] = set()
    actions = []
    for op in sorted(model.operators, key=lambda o: o.name):
        safe = _pddl_name(op.name)
        pre_atoms = [f"(pre_{safe})"]
        preds.add(f"pre_{safe}")
        outcomes = []
        if hasattr(op, "end_label_dist") and getattr(op, "end_label_dist"):
            opi = getattr(op, "op_index", 0)
            start = getattr(op, "start_label", 0)
            pre_atoms.append(f"(label_{opi}_{start})")
            preds.add(f"label_{opi}_{start}")
            for end, p in op.end_label_dist:
                atoms = []
                if end != start:
                    atoms.append(f"(not (label_{opi}_{start}))")
                if end >= 0:
                    atoms.append(f"(label_{opi}_{end})")
                    preds.add(f"label_{opi}_{end}")
                if hasattr(op, "portable"):
                    for sym, _ in op.portable.effects:
                        atoms.append(f"({_pddl_name(sym.name)})")
                        preds.add(_pddl_name(sym.name))
                outcomes.append((p, atoms))
        elif hasattr(op, "outcome_probs"):
            for k, p in enumerate(op.outcome_probs):
                atoms = [f"(outcome_{safe}_{k})"]
                preds.add(f"outcome_{safe}_{k}")
                outcomes.append((p, atoms))
        else:
            outcomes.append((1.0, [f"(done_{safe})"]))
            preds.add(f"done_{safe}")
        actions.append((safe, pre_atoms, outcomes))

    out.write(f"(define (domain {domain_name})\n")
    out.write("  (:requirements :strips :probabilistic-effects)\n")
    out.write("  ;; symbol glossary\n")
    glossary = []
    for op in sorted(model.operators, key=lambda o: o.name):
        if hasattr(op, "portable"):
            for sym, _ in op.portable.effects:
                glossary.append(f"  ;; {_pddl_name(sym.name)}: density over agent-space dims {list(sym.mask)}")
    for line in sorted(set(glossary)):
        out.write(line + "\n")
    out.write("  (:predicates " + " ".join(f"({p})" for p in sorted(preds)) + ")\n")
    for safe, pre_atoms, outcomes in actions:
        out.write(f"  (:action {safe}\n")
        out.write("    :precondition (and " + " ".join(sorted(pre_atoms)) + ")\n")
        if len(outcomes) == 1 and abs(outcomes[0][0] - 1.0) < 1e-12:
            out.write("    :effect (and " + " ".join(outcomes[0][1]) + ")\n")
        else:
            clauses = " ".join(
                f"{p:.6f} (and {' '.join(atoms)})" for p, atoms in outcomes
            )
            out.write(f"    :effect (probabilistic {clauses})\n")
        out.write("  )\n")
    out.write(")\n")
    return out.getvalue()


def _pddl_name(name: str) -> str:
    return (
        name.replace("#", "_").replace(":", "_").replace(" ", "_").replace("-", "_").lower()
    )


# --- model accuracy stopping test ---------------------------------------------

@dataclass
class AccuracyReport:
    oracle_plan_probability: float
    planner_probability: float
    planner_plan: Plan | None
    rollout_successes: int
    rollouts: int
    accurate: bool

    def text(self) -> str:
        buf = io.StringIO()
        buf.write(f"oracle_plan_probability={self.oracle_plan_probability:.4f}\n")
        buf.write(f"planner_probability={self.planner_probability:.4f}\n")
        steps = list(self.planner_plan.steps) if self.planner_plan else []
        buf.write(f"planner_plan={steps}\n")
        buf.write(f"rollouts={self.rollout_successes}/{self.rollouts}\n")
        buf.write(f"accurate={self.accurate}\n")
        return buf.getvalue()


def model_accurate(
    model: GroundedModel,
    oracle_option_ids,
    env,
    theta: float = 0.8,
    n_particles: int = 2_000,
    rollouts: int = 10,
    required_successes: int = 8,
    max_depth: int | None = None,
    seed: int = 0,
) -> tuple[bool, AccuracyReport]:
    """True iff the model scores the generator's plan >= theta AND the
    planner's own best plan succeeds in >= 8/10 open-loop env rollouts."""
    p_oracle, _ = evaluate_option_plan(
        model, oracle_option_ids, n_particles=n_particles, seed=seed
    )
    if theta > 0.0 and p_oracle < theta:
        # cannot be accurate regardless of the planner's own plan; skip the
        # expensive search (this is the common case early in learning)
        return False, AccuracyReport(
            oracle_plan_probability=p_oracle,
            planner_probability=0.0,
            planner_plan=None,
            rollout_successes=0,
            rollouts=rollouts,
            accurate=False,
        )
    depth = max_depth or (len(oracle_option_ids) + 2)
    # search with a small particle set (step survivals are near-deterministic
    # per grounded operator), then re-score the winner at full resolution
    res = find_plan(model, max_depth=depth, n_particles=min(256, n_particles), seed=seed)
    if res.found:
        p_full = evaluate_plan(model, res.plan, n_particles=n_particles, seed=seed, check_goal=True)
        res = PlanResult(res.plan, p_full)
    successes = 0
    if res.found:
        option_steps = [model.option_of(model.by_name()[s]) for s in res.plan.steps]
        for r in range(rollouts):
            env.reset()
            rng = np.random.default_rng(seed + r)
            ok = True
            for oid in option_steps:
                if env.is_solved() or not env.can_execute(oid):
                    ok = False
                    break
                env.run_option(oid, rng)
            if ok and env.is_solved():
                successes += 1
        env.reset()
    accurate = (p_oracle >= theta) and (successes >= required_successes)
    if theta <= 0.0:
        accurate = successes >= required_successes
    return accurate, AccuracyReport(
        oracle_plan_probability=p_oracle,
        planner_probability=res.probability,
        planner_plan=res.plan,
        rollout_successes=successes,
        rollouts=rollouts,
        accurate=accurate,
    )


def plan_report(model: GroundedModel, plan: Plan, n_particles: int = 10_000, seed: int = 0) -> str:
    """Structured text: plan, overall probability, per-step survival."""
    ops = model.by_name()
    rng = np.random.default_rng(seed)
    D, X = _init_particles(model, n_particles, rng)
    buf = io.StringIO()
    buf.write("# symplan-plan-report v1\n")
    total = 1.0
    for name in plan.steps:
        op = ops[name]
        w = np.asarray(op.precondition_prob(D, X), dtype=np.float64)
        survival = float(w.mean())
        total *= survival
        buf.write(f"step={name} survival={survival:.6f} cumulative={total:.6f}\n")
        if total <= 0:
            break
        idx = _systematic_resample(w, rng)
        D, X = op.apply(D[idx], X[idx], rng)
    buf.write(f"plan_probability={total:.6f}\n")
    return buf.getvalue()
