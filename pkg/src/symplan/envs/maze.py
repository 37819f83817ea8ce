"""Treasure-maze domain: corridors, ladders, lever/key doors, one treasure.

The generator lays corridors out as a snake connected by ladders, places
doors along the path with their levers/keys strictly earlier on the path, so
every generated maze is solvable by construction (still verified by the BFS
oracle). The task is solved when the agent holds the treasure and stands on
the start cell again.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import GenerationFailure
from ..smdp import Environment, STEP_CAP

# static cell codes
EMPTY, WALL, LADDER = 0, 1, 2
LEVER_DOOR, KEY_DOOR, LEVER, KEY, TREASURE = 3, 4, 5, 6, 7

MAZE_OPTIONS = ["GoLeft", "GoRight", "ClimbUp", "ClimbDown", "Interact"]

# agent-space one-hot channels per window cell
_CHANNELS = 8  # wall, ladder, closed lever door, closed key door, open door, lever, key, treasure
AGENT_OBS_DIM = 9 * _CHANNELS + 2


@dataclass(frozen=True)
class MazeSpec:
    width: int
    height: int
    cells: tuple[tuple[int, ...], ...]          # static cell codes, row-major
    object_ids: tuple[tuple[int, ...], ...]     # door/lever/key index per cell, -1 if none
    door_linkage: tuple[tuple[int, int], ...]   # (lever_id, door_id)
    start: tuple[int, int]                      # (row, col)
    treasure_cell: tuple[int, int]
    key_cells: tuple[tuple[int, int], ...]
    n_doors: int
    seed: int = 0
    difficulty: int = 1

    def count_cells(self, code: int) -> int:
        return sum(row.count(code) for row in self.cells)


class MazeEnv(Environment):
    """Scripted-option maze. Movement options run until blocked or until an
    interactable becomes adjacent; Interact acts on co-located keys/treasure
    and adjacent levers/doors."""

    def __init__(self, spec: MazeSpec, task_id: str | None = None):
        self.spec = spec
        self.task_id = task_id or f"maze-s{spec.seed}-d{spec.difficulty}"
        self.reset()

    # --- state -----------------------------------------------------------
    def reset(self) -> None:
        self.agent = self.spec.start
        self.door_open = [False] * self.spec.n_doors
        self.key_present = [True] * len(self.spec.key_cells)
        self.treasure_present = True
        self.has_key = False
        self.has_treasure = False

    def get_state(self):
        return (
            self.agent,
            tuple(self.door_open),
            tuple(self.key_present),
            self.treasure_present,
            self.has_key,
            self.has_treasure,
        )

    def set_state(self, st) -> None:
        agent, doors, keys, tp, hk, ht = st
        self.agent = agent
        self.door_open = list(doors)
        self.key_present = list(keys)
        self.treasure_present = tp
        self.has_key = hk
        self.has_treasure = ht

    def is_solved(self) -> bool:
        return self.has_treasure and self.agent == self.spec.start

    # --- helpers -----------------------------------------------------------
    def _cell(self, r: int, c: int) -> int:
        if not (0 <= r < self.spec.height and 0 <= c < self.spec.width):
            return WALL
        return self.spec.cells[r][c]

    def _oid(self, r: int, c: int) -> int:
        return self.spec.object_ids[r][c]

    def _passable(self, r: int, c: int) -> bool:
        code = self._cell(r, c)
        if code in (WALL, LEVER):
            return False
        if code in (LEVER_DOOR, KEY_DOOR):
            return self.door_open[self._oid(r, c)]
        if code == KEY:
            # a collected key cell is plain floor
            return True
        return True

    def _interactable_adjacent(self) -> bool:
        r, c = self.agent
        code = self._cell(r, c)
        if code == KEY and self.key_present[self._oid(r, c)]:
            return True
        if code == TREASURE and self.treasure_present:
            return True
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            k = self._cell(rr, cc)
            if k == LEVER:
                return True
            if k in (LEVER_DOOR, KEY_DOOR) and not self.door_open[self._oid(rr, cc)]:
                return True
        return False

    def _movement_stop(self) -> bool:
        r, c = self.agent
        if self._interactable_adjacent() or self._cell(r, c) == LADDER:
            return True
        # pause at ladder columns so vertical travel stays reachable
        return self._cell(r - 1, c) == LADDER or self._cell(r + 1, c) == LADDER

    # --- observation encodings --------------------------------------------
    def problem_state(self) -> np.ndarray:
        r, c = self.agent
        return np.array(
            [float(c), float(r)]
            + [1.0 if b else 0.0 for b in self.door_open]
            + [1.0 if b else 0.0 for b in self.key_present]
            + [1.0 if self.treasure_present else 0.0]
            + [1.0 if self.has_key else 0.0, 1.0 if self.has_treasure else 0.0]
        )

    def agent_obs(self) -> np.ndarray:
        r, c = self.agent
        out = np.zeros(AGENT_OBS_DIM)
        i = 0
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                code = self._cell(rr, cc)
                if code == WALL:
                    out[i + 0] = 1.0
                elif code == LADDER:
                    out[i + 1] = 1.0
                elif code == LEVER_DOOR:
                    out[i + 2 if not self.door_open[self._oid(rr, cc)] else i + 4] = 1.0
                elif code == KEY_DOOR:
                    out[i + 3 if not self.door_open[self._oid(rr, cc)] else i + 4] = 1.0
                elif code == LEVER:
                    out[i + 5] = 1.0
                elif code == KEY and self.key_present[self._oid(rr, cc)]:
                    out[i + 6] = 1.0
                elif code == TREASURE and self.treasure_present:
                    out[i + 7] = 1.0
                i += _CHANNELS
        out[-2] = 1.0 if self.has_key else 0.0
        out[-1] = 1.0 if self.has_treasure else 0.0
        return out

    # --- options -----------------------------------------------------------
    def option_ids(self) -> list[str]:
        return list(MAZE_OPTIONS)

    def _move_delta(self, option_id: str) -> tuple[int, int]:
        return {
            "GoLeft": (0, -1),
            "GoRight": (0, 1),
            "ClimbUp": (-1, 0),
            "ClimbDown": (1, 0),
        }[option_id]

    def _can_step(self, option_id: str) -> bool:
        r, c = self.agent
        dr, dc = self._move_delta(option_id)
        rr, cc = r + dr, c + dc
        if not self._passable(rr, cc):
            return False
        if option_id in ("ClimbUp", "ClimbDown"):
            # vertical travel requires a ladder under or ahead of the agent
            return self._cell(rr, cc) == LADDER or self._cell(r, c) == LADDER
        return True

    def can_execute(self, option_id: str) -> bool:
        if option_id == "Interact":
            return self._interact_target() is not None
        return self._can_step(option_id)

    def _interact_target(self):
        r, c = self.agent
        code = self._cell(r, c)
        if code == KEY and self.key_present[self._oid(r, c)]:
            return ("key", self._oid(r, c))
        if code == TREASURE and self.treasure_present:
            return ("treasure", 0)
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            k = self._cell(rr, cc)
            if k == LEVER:
                return ("lever", self._oid(rr, cc))
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            k = self._cell(rr, cc)
            if k == KEY_DOOR and not self.door_open[self._oid(rr, cc)] and self.has_key:
                return ("key_door", self._oid(rr, cc))
        return None

    def run_option(self, option_id: str, rng: np.random.Generator) -> tuple[float, int]:
        steps = 0
        if option_id == "Interact":
            kind, idx = self._interact_target()
            if kind == "key":
                self.key_present[idx] = False
                self.has_key = True
            elif kind == "treasure":
                self.treasure_present = False
                self.has_treasure = True
            elif kind == "lever":
                door = dict(self.spec.door_linkage)[idx]
                self.door_open[door] = not self.door_open[door]
            elif kind == "key_door":
                self.door_open[idx] = True
                self.has_key = False
            steps = 1
        else:
            dr, dc = self._move_delta(option_id)
            while self._can_step(option_id):
                self.agent = (self.agent[0] + dr, self.agent[1] + dc)
                steps += 1
                if steps >= STEP_CAP:
                    from ..errors import StepCapExceeded

                    raise StepCapExceeded(option_id)
                if self._movement_stop():
                    break
        reward = -float(steps) + (100.0 if self.is_solved() else 0.0)
        return reward, steps


# --- generator --------------------------------------------------------------

def generate_maze(seed: int, difficulty: int) -> MazeSpec:
    """Deterministic snake-corridor maze; higher difficulty adds corridors,
    doors, levers and (from difficulty 3) key doors."""
    if not 1 <= difficulty <= 10:
        raise ValueError("difficulty must be in 1..10")
    for attempt in range(20):
        spec = _try_generate(seed * 1000 + attempt * 7919, difficulty, seed)
        if spec is not None:
            from .oracle import oracle_plan  # local import avoids cycle

            try:
                oracle_plan(MazeEnv(spec))
                return spec
            except Exception:
                continue
    raise GenerationFailure(f"maze seed={seed} difficulty={difficulty}")


def _try_generate(gen_seed: int, difficulty: int, seed: int) -> MazeSpec | None:
    rng = np.random.default_rng(gen_seed)
    n_rows = 2 + (difficulty - 1) // 3          # corridor rows
    corridor_w = 8 + difficulty
    height = 2 * n_rows + 1
    width = corridor_w + 2

    cells = [[WALL] * width for _ in range(height)]
    oid = [[-1] * width for _ in range(height)]
    corridor_rows = [2 * i + 1 for i in range(n_rows)]
    for r in corridor_rows:
        for c in range(1, width - 1):
            cells[r][c] = EMPTY

    # snake path: corridor i traversed left->right if even, right->left if odd;
    # ladders at the far end connect to the corridor below
    path: list[tuple[int, int]] = []
    for i, r in enumerate(corridor_rows):
        cols = range(1, width - 1) if i % 2 == 0 else range(width - 2, 0, -1)
        path.extend((r, c) for c in cols)
        if i + 1 < n_rows:
            ladder_c = width - 2 if i % 2 == 0 else 1
            cells[r + 1][ladder_c] = LADDER
            cells[r + 2][ladder_c] = EMPTY  # ensured; corridor row below

    start = path[0]
    treasure = path[-1]
    cells[treasure[0]][treasure[1]] = TREASURE

    n_doors = 1 + (difficulty - 1) // 2
    n_key_doors = max(0, (difficulty - 1) // 4)
    n_lever_doors = n_doors - n_key_doors
    if n_lever_doors < 1:
        n_lever_doors, n_key_doors = 1, n_doors - 1

    # candidate door slots: interior path positions, away from ladders/ends
    def ok_door(pos_idx: int) -> bool:
        r, c = path[pos_idx]
        if cells[r][c] != EMPTY:
            return False
        if cells[r + 1][c] == LADDER or cells[r - 1][c] == LADDER:
            return False
        return 3 <= c <= width - 4

    cand = [i for i in range(6, len(path) - 3) if ok_door(i)]
    if len(cand) < n_doors * 4:
        return None
    door_pos = sorted(rng.choice(cand, size=n_doors * 3, replace=False))
    # keep doors spaced at least 3 path steps apart
    chosen: list[int] = []
    for p in door_pos:
        if not chosen or p - chosen[-1] >= 4:
            chosen.append(int(p))
        if len(chosen) == n_doors:
            break
    if len(chosen) < n_doors:
        return None

    kinds = [KEY_DOOR] * n_key_doors + [LEVER_DOOR] * n_lever_doors
    # earliest doors are lever doors so difficulty-1 mazes have none keyed
    kinds = kinds[::-1]
    door_id = 0
    lever_id = 0
    key_cells: list[tuple[int, int]] = []
    linkage: list[tuple[int, int]] = []
    for p, kind in zip(chosen, kinds):
        r, c = path[p]
        cells[r][c] = kind
        oid[r][c] = door_id
        lo = 2 if door_id == 0 else chosen[door_id - 1] + 2
        hi = p - 2
        if hi <= lo:
            return None
        q_cands = [
            j
            for j in range(lo, hi)
            if cells[path[j][0]][path[j][1]] == EMPTY and oid[path[j][0]][path[j][1]] == -1
        ]
        if not q_cands:
            return None
        j = int(rng.choice(q_cands))
        qr, qc = path[j]
        if kind == LEVER_DOOR:
            # lever sits in the wall row beside the corridor cell
            wr = qr + 1 if cells[qr + 1][qc] == WALL else qr - 1
            if cells[wr][qc] != WALL:
                return None
            cells[wr][qc] = LEVER
            oid[wr][qc] = lever_id
            linkage.append((lever_id, door_id))
            lever_id += 1
        else:
            cells[qr][qc] = KEY
            oid[qr][qc] = len(key_cells)
            key_cells.append((qr, qc))
        door_id += 1

    return MazeSpec(
        width=width,
        height=height,
        cells=tuple(tuple(r) for r in cells),
        object_ids=tuple(tuple(r) for r in oid),
        door_linkage=tuple(linkage),
        start=start,
        treasure_cell=treasure,
        key_cells=tuple(key_cells),
        n_doors=n_doors,
        seed=seed,
        difficulty=difficulty,
    )
