"""Five-room object world: doors (regular/puzzle), levers, keys, gold, chest.

Rooms sit on a grid of slots connected by a random spanning tree; each tree
edge carries a door. Exactly one door on the path to the chest room is a
puzzle door whose lever sits on the start side, and the chest needs the key.
The task is solved when the chest is open. Option policies abstract
path-planning: walking teleports the agent next to the target, with duration
equal to the number of rooms crossed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import GenerationFailure
from ..smdp import Environment

N_ROOMS = 5
ROOM_SIZE = 8.0
ROOM_PITCH = 10.0
REACH = 1.2

OPTION_KINDS = [
    "WalkToItem",
    "WalkThroughDoor",
    "ToggleDoor",
    "PullLever",
    "AttackBlock",
    "OpenChest",
    "PickUp",
]


@dataclass(frozen=True)
class RoomsSpec:
    rooms: tuple[tuple[float, float, float, float], ...]  # (x0, z0, x1, z1)
    doors: tuple[dict, ...]    # {id, kind, rooms:(i,j), pos:(x,z), open0}
    levers: tuple[dict, ...]   # {id, room, pos, door}
    items: tuple[dict, ...]    # {id, kind in key/gold/chest, room, pos}
    start_room: int
    start_pos: tuple[float, float]
    chest_room: int
    seed: int = 0


def _room_center(rect):
    x0, z0, x1, z1 = rect
    return ((x0 + x1) / 2.0, (z0 + z1) / 2.0)


class RoomsEnv(Environment):
    def __init__(self, spec: RoomsSpec, task_id: str | None = None):
        self.spec = spec
        self.task_id = task_id or f"rooms-s{spec.seed}"
        # object registry in stable order: doors, levers, items
        self.objects: list[tuple[str, str]] = []  # (object_id, kind)
        for d in spec.doors:
            self.objects.append((d["id"], "door"))
        for lv in spec.levers:
            self.objects.append((lv["id"], "lever"))
        for it in spec.items:
            self.objects.append((it["id"], it["kind"]))
        self._doors = {d["id"]: d for d in spec.doors}
        self._levers = {v["id"]: v for v in spec.levers}
        self._items = {i["id"]: i for i in spec.items}
        self.reset()

    # --- state -------------------------------------------------------------
    def reset(self) -> None:
        self.agent = tuple(self.spec.start_pos)
        self.door_open = {d["id"]: bool(d["open0"]) for d in self.spec.doors}
        self.lever_pulled = {v["id"]: False for v in self.spec.levers}
        self.gold_whole = {i["id"]: True for i in self.spec.items if i["kind"] == "gold"}
        self.key_held = {i["id"]: False for i in self.spec.items if i["kind"] == "key"}
        self.chest_open = {i["id"]: False for i in self.spec.items if i["kind"] == "chest"}

    def get_state(self):
        return (
            self.agent,
            tuple(sorted(self.door_open.items())),
            tuple(sorted(self.lever_pulled.items())),
            tuple(sorted(self.gold_whole.items())),
            tuple(sorted(self.key_held.items())),
            tuple(sorted(self.chest_open.items())),
        )

    def set_state(self, st) -> None:
        agent, doors, levers, gold, keys, chests = st
        self.agent = agent
        self.door_open = dict(doors)
        self.lever_pulled = dict(levers)
        self.gold_whole = dict(gold)
        self.key_held = dict(keys)
        self.chest_open = dict(chests)

    def is_solved(self) -> bool:
        return all(self.chest_open.values())

    # --- geometry ------------------------------------------------------------
    def room_of(self, pos) -> int:
        x, z = pos
        best, best_d = 0, float("inf")
        for i, (x0, z0, x1, z1) in enumerate(self.spec.rooms):
            if x0 - 1e-9 <= x <= x1 + 1e-9 and z0 - 1e-9 <= z <= z1 + 1e-9:
                return i
            cx, cz = _room_center(self.spec.rooms[i])
            d = (x - cx) ** 2 + (z - cz) ** 2
            if d < best_d:
                best, best_d = i, d
        return best

    def _reachable_rooms(self, src: int) -> dict[int, int]:
        """room -> hop count through open doors."""
        hops = {src: 0}
        q = deque([src])
        while q:
            r = q.popleft()
            for d in self.spec.doors:
                if not self.door_open[d["id"]]:
                    continue
                a, b = d["rooms"]
                for u, v in ((a, b), (b, a)):
                    if u == r and v not in hops:
                        hops[v] = hops[r] + 1
                        q.append(v)
        return hops

    def object_pos(self, obj_id: str):
        if obj_id in self._doors:
            return tuple(self._doors[obj_id]["pos"])
        if obj_id in self._levers:
            return tuple(self._levers[obj_id]["pos"])
        return tuple(self._items[obj_id]["pos"])

    def _object_room(self, obj_id: str) -> int:
        if obj_id in self._levers:
            return self._levers[obj_id]["room"]
        if obj_id in self._items:
            return self._items[obj_id]["room"]
        raise KeyError(obj_id)

    def _near(self, obj_id: str) -> bool:
        ox, oz = self.object_pos(obj_id)
        ax, az = self.agent
        return (ax - ox) ** 2 + (az - oz) ** 2 <= REACH * REACH

    def _walk_target(self, obj_id: str):
        """Deterministic standing spot next to an object; None if unreachable."""
        hops = self._reachable_rooms(self.room_of(self.agent))
        ox, oz = self.object_pos(obj_id)
        if obj_id in self._doors:
            a, b = self._doors[obj_id]["rooms"]
            sides = []
            for room in (a, b):
                if room in hops:
                    cx, cz = _room_center(self.spec.rooms[room])
                    dx, dz = cx - ox, cz - oz
                    n = max((dx * dx + dz * dz) ** 0.5, 1e-9)
                    sides.append((hops[room], (ox + 0.8 * dx / n, oz + 0.8 * dz / n)))
            if not sides:
                return None
            sides.sort()
            return sides[0][1], sides[0][0]
        room = self._object_room(obj_id)
        if room not in hops:
            return None
        cx, cz = _room_center(self.spec.rooms[room])
        dx, dz = cx - ox, cz - oz
        n = max((dx * dx + dz * dz) ** 0.5, 1e-9)
        return (ox + 0.8 * dx / n, oz + 0.8 * dz / n), hops[room]

    # --- observation encodings -----------------------------------------------
    def object_features(self, obj_id: str) -> np.ndarray:
        """Per-object feature vector [x, z, state_bit, possessed]."""
        x, z = self.object_pos(obj_id)
        if obj_id in self._doors:
            return np.array([x, z, 1.0 if self.door_open[obj_id] else 0.0, 0.0])
        if obj_id in self._levers:
            return np.array([x, z, 1.0 if self.lever_pulled[obj_id] else 0.0, 0.0])
        kind = self._items[obj_id]["kind"]
        if kind == "gold":
            return np.array([x, z, 1.0 if self.gold_whole[obj_id] else 0.0, 0.0])
        if kind == "key":
            return np.array([x, z, 0.0, 1.0 if self.key_held[obj_id] else 0.0])
        return np.array([x, z, 1.0 if self.chest_open[obj_id] else 0.0, 0.0])

    def agent_features(self) -> np.ndarray:
        return np.array([self.agent[0], 0.0, self.agent[1]])

    def problem_state(self) -> np.ndarray:
        parts = [self.agent_features()]
        parts += [self.object_features(oid) for oid, _ in self.objects]
        return np.concatenate(parts)

    def object_slices(self) -> dict[str, slice]:
        """Index ranges of each object's features inside problem_state()."""
        out = {"agent": slice(0, 3)}
        off = 3
        for oid, _ in self.objects:
            out[oid] = slice(off, off + 4)
            off += 4
        return out

    def agent_obs(self) -> np.ndarray:
        """Egocentric summary: per object kind, proximity of the nearest
        instance and its state bit, plus inventory."""
        ax, az = self.agent
        out = []
        for kind in ("door", "lever", "chest", "gold", "key"):
            best_d, state = float("inf"), 0.0
            for oid, k in self.objects:
                if k != kind:
                    continue
                ox, oz = self.object_pos(oid)
                d = ((ax - ox) ** 2 + (az - oz) ** 2) ** 0.5
                if d < best_d:
                    best_d = d
                    state = float(self.object_features(oid)[2])
            prox = 0.0 if best_d == float("inf") else 1.0 / (1.0 + best_d)
            near = 1.0 if best_d <= REACH else 0.0
            out += [prox, near, state]
        out.append(1.0 if any(self.key_held.values()) else 0.0)
        return np.array(out)

    # --- options ---------------------------------------------------------------
    def option_ids(self) -> list[str]:
        ids = []
        walkable = [oid for oid, _ in self.objects]
        ids += [f"WalkToItem:{o}" for o in walkable]
        ids += [f"WalkThroughDoor:{d['id']}" for d in self.spec.doors]
        ids += [f"ToggleDoor:{d['id']}" for d in self.spec.doors]
        ids += [f"PullLever:{v['id']}" for v in self.spec.levers]
        ids += [f"AttackBlock:{i['id']}" for i in self.spec.items if i["kind"] == "gold"]
        ids += [f"OpenChest:{i['id']}" for i in self.spec.items if i["kind"] == "chest"]
        ids += [f"PickUp:{i['id']}" for i in self.spec.items if i["kind"] == "key"]
        return ids

    def can_execute(self, option_id: str) -> bool:
        kind, target = option_id.split(":", 1)
        if kind == "WalkToItem":
            if target in self.key_held and self.key_held[target]:
                return False
            return self._walk_target(target) is not None
        if kind == "WalkThroughDoor":
            return self.door_open[target] and self._near(target)
        if kind == "ToggleDoor":
            return self._doors[target]["kind"] == "regular" and self._near(target)
        if kind == "PullLever":
            return self._near(target)
        if kind == "AttackBlock":
            return self.gold_whole[target] and self._near(target)
        if kind == "OpenChest":
            return (
                not self.chest_open[target]
                and self._near(target)
                and any(self.key_held.values())
            )
        if kind == "PickUp":
            return not self.key_held[target] and self._near(target)
        return False

    def run_option(self, option_id: str, rng: np.random.Generator) -> tuple[float, int]:
        kind, target = option_id.split(":", 1)
        steps = 1
        if kind == "WalkToItem":
            pos, hops = self._walk_target(target)
            self.agent = pos
            steps = 1 + hops
        elif kind == "WalkThroughDoor":
            d = self._doors[target]
            here = self.room_of(self.agent)
            a, b = d["rooms"]
            other = b if here == a else a
            ox, oz = d["pos"]
            cx, cz = _room_center(self.spec.rooms[other])
            dx, dz = cx - ox, cz - oz
            n = max((dx * dx + dz * dz) ** 0.5, 1e-9)
            self.agent = (ox + 0.8 * dx / n, oz + 0.8 * dz / n)
        elif kind == "ToggleDoor":
            self.door_open[target] = not self.door_open[target]
        elif kind == "PullLever":
            self.lever_pulled[target] = not self.lever_pulled[target]
            door = self._levers[target]["door"]
            self.door_open[door] = not self.door_open[door]
        elif kind == "AttackBlock":
            self.gold_whole[target] = False
        elif kind == "OpenChest":
            self.chest_open[target] = True
            for k in self.key_held:
                self.key_held[k] = False
        elif kind == "PickUp":
            self.key_held[target] = True
        reward = -float(steps) + (100.0 if self.is_solved() else 0.0)
        return reward, steps


# --- generator ----------------------------------------------------------------

_SLOTS = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]


def generate_rooms(seed: int) -> RoomsSpec:
    for attempt in range(20):
        spec = _try_rooms(seed * 1000 + attempt * 7919, seed)
        if spec is not None:
            from .oracle import oracle_plan

            try:
                oracle_plan(RoomsEnv(spec))
                return spec
            except Exception:
                continue
    raise GenerationFailure(f"rooms seed={seed}")


def rooms_options(spec: RoomsSpec) -> list[str]:
    """Scripted option set for a rooms task (parameterized by target id)."""
    return RoomsEnv(spec).option_ids()


def _try_rooms(gen_seed: int, seed: int) -> RoomsSpec | None:
    rng = np.random.default_rng(gen_seed)
    slots = [_SLOTS[i] for i in sorted(rng.choice(len(_SLOTS), size=N_ROOMS, replace=False))]
    rects = tuple(
        (sx * ROOM_PITCH, sz * ROOM_PITCH, sx * ROOM_PITCH + ROOM_SIZE, sz * ROOM_PITCH + ROOM_SIZE)
        for sx, sz in slots
    )
    # adjacency among chosen slots
    adj = []
    for i in range(N_ROOMS):
        for j in range(i + 1, N_ROOMS):
            dx = abs(slots[i][0] - slots[j][0])
            dz = abs(slots[i][1] - slots[j][1])
            if dx + dz == 1:
                adj.append((i, j))
    if not adj:
        return None
    # random spanning tree
    order = rng.permutation(len(adj))
    parent = list(range(N_ROOMS))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = []
    for k in order:
        i, j = adj[k]
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append((i, j))
    if len(tree) != N_ROOMS - 1:
        return None

    # door positions on shared walls, jittered
    doors = []
    for idx, (i, j) in enumerate(sorted(tree)):
        xi0, zi0, xi1, zi1 = rects[i]
        xj0, zj0, xj1, zj1 = rects[j]
        t = float(rng.uniform(1.5, ROOM_SIZE - 1.5))
        if slots[i][0] != slots[j][0]:  # horizontal neighbors, shared x wall
            wall_x = (max(xi0, xj0) + min(xi1, xj1)) / 2.0
            pos = (wall_x, min(zi0, zj0) + t)
        else:
            wall_z = (max(zi0, zj0) + min(zi1, zj1)) / 2.0
            pos = (min(xi0, xj0) + t, wall_z)
        doors.append({"id": f"door{idx}", "kind": "regular", "rooms": (i, j), "pos": pos, "open0": bool(rng.integers(2))})

    start_room = 0
    # chest room: farthest room from start in the tree
    tree_adj = {i: [] for i in range(N_ROOMS)}
    for di, d in enumerate(doors):
        a, b = d["rooms"]
        tree_adj[a].append((b, di))
        tree_adj[b].append((a, di))
    dist = {start_room: (0, [])}
    q = deque([start_room])
    while q:
        r = q.popleft()
        for nb, di in tree_adj[r]:
            if nb not in dist:
                dist[nb] = (dist[r][0] + 1, dist[r][1] + [di])
                q.append(nb)
    chest_room = max(dist, key=lambda r: dist[r][0])
    path_doors = dist[chest_room][1]
    if not path_doors:
        return None

    # one puzzle door on the chest path; its lever on the start side
    puzzle_di = int(path_doors[int(rng.integers(len(path_doors)))])
    doors[puzzle_di]["kind"] = "puzzle"
    doors[puzzle_di]["open0"] = False
    start_side = {start_room}
    q = deque([start_room])
    while q:
        r = q.popleft()
        for nb, di in tree_adj[r]:
            if di != puzzle_di and nb not in start_side:
                start_side.add(nb)
                q.append(nb)

    def spot(room: int):
        x0, z0, x1, z1 = rects[room]
        return (float(rng.uniform(x0 + 1.0, x1 - 1.0)), float(rng.uniform(z0 + 1.0, z1 - 1.0)))

    lever_room = int(rng.choice(sorted(start_side)))
    levers = ({"id": "lever0", "room": lever_room, "pos": spot(lever_room), "door": doors[puzzle_di]["id"]},)

    key_room = int(rng.choice(sorted(start_side)))
    items = [
        {"id": "chest0", "kind": "chest", "room": chest_room, "pos": spot(chest_room)},
        {"id": "key0", "kind": "key", "room": key_room, "pos": spot(key_room)},
    ]
    for g in range(2):
        room = int(rng.integers(N_ROOMS))
        items.append({"id": f"gold{g}", "kind": "gold", "room": room, "pos": spot(room)})

    start_pos = spot(start_room)
    return RoomsSpec(
        rooms=rects,
        doors=tuple(doors),
        levers=levers,
        items=tuple(items),
        start_room=start_room,
        start_pos=start_pos,
        chest_room=chest_room,
        seed=seed,
    )
