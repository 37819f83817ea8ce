"""Ground-truth shortest plans via breadth-first search over env snapshots.

Works for any Environment exposing get_state/set_state with hashable states
and deterministic scripted options.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import Unsolvable


@dataclass(frozen=True)
class OraclePlan:
    steps: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.steps)


def oracle_plan(env, max_states: int = 200_000) -> OraclePlan:
    """Shortest option sequence solving the task from the env's reset state."""
    rng = np.random.default_rng(0)  # scripted options ignore randomness
    env.reset()
    start = env.get_state()
    if env.is_solved():
        return OraclePlan(())
    frontier = deque([start])
    parent: dict = {start: None}
    while frontier:
        state = frontier.popleft()
        for oid in env.option_ids():
            env.set_state(state)
            if env.is_solved() or not env.can_execute(oid):
                continue
            env.run_option(oid, rng)
            nxt = env.get_state()
            if nxt in parent:
                continue
            parent[nxt] = (state, oid)
            env.set_state(nxt)
            if env.is_solved():
                steps: list[str] = []
                cur = nxt
                while parent[cur] is not None:
                    cur, o = parent[cur]
                    steps.append(o)
                env.reset()
                return OraclePlan(tuple(reversed(steps)))
            if len(parent) > max_states:
                raise Unsolvable("state cap exceeded during oracle search")
            frontier.append(nxt)
    env.reset()
    raise Unsolvable("no plan reaches the goal")
