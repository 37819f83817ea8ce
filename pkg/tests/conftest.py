"""Shared fixtures and toy constructions used across the test modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from symplan.plan import EqualityGoal, GroundedModel


@dataclass
class ToyOperator:
    """Analytic operator for planner tests: succeeds with probability p from
    states in `sources`, moving the (1-dim) problem state to `dest`."""

    name: str
    sources: tuple[float, ...]
    dest: float
    p: float = 1.0
    option_id: str = ""

    def __post_init__(self):
        if not self.option_id:
            self.option_id = self.name

    def precondition_prob(self, D, X):
        X = np.atleast_2d(X)
        ok = np.zeros(len(X))
        for s in self.sources:
            ok = np.maximum(ok, (np.abs(X[:, 0] - s) < 1e-9).astype(float))
        return ok * self.p

    def apply(self, D, X, rng):
        X2 = X.copy()
        X2[:, 0] = self.dest
        return D.copy(), X2


def toy_chain_model(edge_probs, goal_state=None):
    """Line graph 0 -> 1 -> ... -> n with the given per-edge success
    probabilities. Exact success probability of the full chain is the
    product of the probabilities."""
    ops = [
        ToyOperator(name=f"step{i}", sources=(float(i),), dest=float(i + 1), p=p)
        for i, p in enumerate(edge_probs)
    ]
    n = len(edge_probs)
    goal = EqualityGoal(indices=(0,), values=(float(goal_state if goal_state is not None else n),))
    return GroundedModel(
        operators=ops, initial_d=np.zeros((1, 1)), initial_x=np.zeros((1, 1)), goal=goal
    )


def toy_graph_model(edges, n_states, goal_state, seed=None):
    """Arbitrary toy graph: edges is a list of (src, dst, prob). One operator
    per edge; exact max-probability plans are computable by dynamic
    programming over (state, depth)."""
    ops = [
        ToyOperator(name=f"e{i}_{s}to{t}", sources=(float(s),), dest=float(t), p=p)
        for i, (s, t, p) in enumerate(edges)
    ]
    goal = EqualityGoal(indices=(0,), values=(float(goal_state),))
    return GroundedModel(
        operators=ops, initial_d=np.zeros((1, 1)), initial_x=np.zeros((1, 1)), goal=goal
    )


def dp_best_probability(edges, n_states, goal_state, max_depth, start=0):
    """Exhaustive DP oracle: best success probability of reaching the goal in
    at most max_depth steps. Independent of the planner implementation."""
    best = np.zeros(n_states)
    best[goal_state] = 1.0
    for _ in range(max_depth):
        new = best.copy()
        for s, t, p in edges:
            new[s] = max(new[s], p * best[t])
        best = new
    return float(best[start])


@pytest.fixture(scope="session")
def maze_env7():
    from symplan.envs.maze import MazeEnv, generate_maze

    return MazeEnv(generate_maze(7, 1))


@pytest.fixture(scope="session")
def maze_dataset7(maze_env7):
    from symplan.smdp import collect_dataset

    return collect_dataset(maze_env7, 1200, 0, p_uniform=0.3)


@pytest.fixture(scope="session")
def rooms_setup():
    from symplan.envs.rooms import RoomsEnv, generate_rooms
    from symplan.objects import RoomsAdapter
    from symplan.smdp import collect_dataset

    spec = generate_rooms(3)
    env = RoomsEnv(spec)
    ds = collect_dataset(env, 3000, 0, p_uniform=0.3)
    return spec, env, RoomsAdapter(spec), ds
