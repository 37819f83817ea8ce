"""Task-spec files: JSON with enough schema to rebuild either domain bit-exactly."""

from __future__ import annotations

import json

from .maze import MazeSpec
from .rooms import RoomsSpec


def _tupled(obj):
    if isinstance(obj, list):
        return tuple(_tupled(v) for v in obj)
    return obj


def save_task(spec, path: str) -> None:
    if isinstance(spec, MazeSpec):
        doc = {
            "domain": "maze",
            "seed": spec.seed,
            "difficulty": spec.difficulty,
            "width": spec.width,
            "height": spec.height,
            "cells": [list(r) for r in spec.cells],
            "object_ids": [list(r) for r in spec.object_ids],
            "door_linkage": [list(p) for p in spec.door_linkage],
            "start": list(spec.start),
            "treasure_cell": list(spec.treasure_cell),
            "key_cells": [list(p) for p in spec.key_cells],
            "n_doors": spec.n_doors,
        }
    elif isinstance(spec, RoomsSpec):
        doc = {
            "domain": "rooms",
            "seed": spec.seed,
            "rooms": [list(r) for r in spec.rooms],
            "doors": [
                {**d, "rooms": list(d["rooms"]), "pos": list(d["pos"])} for d in spec.doors
            ],
            "levers": [{**v, "pos": list(v["pos"])} for v in spec.levers],
            "items": [{**i, "pos": list(i["pos"])} for i in spec.items],
            "start_room": spec.start_room,
            "start_pos": list(spec.start_pos),
            "chest_room": spec.chest_room,
        }
    else:
        raise TypeError(type(spec).__name__)
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


def load_task(path: str):
    with open(path) as f:
        doc = json.load(f)
    if doc["domain"] == "maze":
        return MazeSpec(
            width=doc["width"],
            height=doc["height"],
            cells=_tupled(doc["cells"]),
            object_ids=_tupled(doc["object_ids"]),
            door_linkage=_tupled(doc["door_linkage"]),
            start=tuple(doc["start"]),
            treasure_cell=tuple(doc["treasure_cell"]),
            key_cells=_tupled(doc["key_cells"]),
            n_doors=doc["n_doors"],
            seed=doc["seed"],
            difficulty=doc["difficulty"],
        )
    if doc["domain"] == "rooms":
        return RoomsSpec(
            rooms=_tupled(doc["rooms"]),
            doors=tuple(
                {**d, "rooms": tuple(d["rooms"]), "pos": tuple(d["pos"])} for d in doc["doors"]
            ),
            levers=tuple({**v, "pos": tuple(v["pos"])} for v in doc["levers"]),
            items=tuple({**i, "pos": tuple(i["pos"])} for i in doc["items"]),
            start_room=doc["start_room"],
            start_pos=tuple(doc["start_pos"]),
            chest_room=doc["chest_room"],
            seed=doc["seed"],
        )
    raise ValueError(f"unknown domain {doc['domain']!r}")
