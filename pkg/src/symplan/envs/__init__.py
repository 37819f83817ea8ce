from .maze import MazeEnv, MazeSpec, generate_maze
from .oracle import OraclePlan, oracle_plan
from .rooms import RoomsEnv, RoomsSpec, generate_rooms, rooms_options
from .taskfile import load_task, save_task

__all__ = [
    "MazeEnv",
    "MazeSpec",
    "generate_maze",
    "OraclePlan",
    "oracle_plan",
    "RoomsEnv",
    "RoomsSpec",
    "generate_rooms",
    "rooms_options",
    "load_task",
    "save_task",
]
