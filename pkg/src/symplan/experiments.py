"""Experiment harness: agent-centric transfer, object-centric transfer, and
hierarchy construction, each emitting deterministic CSV metrics.

Seeds are independent jobs (optionally run in a process pool); results are
gathered, sorted, and written once, so the CSV bytes do not depend on
scheduling. All randomness is derived from the per-seed value.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .envs.maze import MazeEnv, generate_maze
from .envs.oracle import oracle_plan
from .envs.rooms import RoomsEnv, generate_rooms
from .errors import InsufficientData, SymplanError
from .hierarchy import build_hierarchy, histogram_stats, path_length_histogram
from .objects import (
    RoomsAdapter,
    ground_typed,
    learn_object_operators,
    merge_types,
    object_transfer_update,
)
from .plan import EqualityGoal, GroundedModel, model_accurate
from .portable import (
    ground,
    infer_labels,
    learn_linking,
    learn_portable,
    transfer_update,
)
from .smdp import Dataset, collect_dataset

METRICS_HEADER = (
    "seed,task_index,arm,accurate,samples_to_accurate,episodes,"
    "operators_transferred,operators_new,levels,level0_nodes,level0_max_path,"
    "top_nodes,top_max_path"
)
HIST_HEADER = "seed,task_index,level,length,count"

# ten-task maze curriculum; mostly easy so a full sweep fits a desk budget
MAZE_DIFFICULTIES = (1, 1, 2, 1, 1, 2, 1, 2, 1, 1)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str                      # agent-transfer | object-transfer | hierarchy
    seeds: tuple[int, ...]
    n_tasks: int = 10
    batch_size: int = 200
    max_batches: int = 15
    theta: float = 0.8
    equivalence_threshold: float = 0.1
    n_particles: int = 500
    out_dir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if self.n_tasks < 1:
            raise ValueError("n_tasks must be >= 1")
        if self.kind not in ("agent-transfer", "object-transfer", "hierarchy"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")


@dataclass(frozen=True)
class MetricsRow:
    seed: int
    task_index: int
    arm: str
    accurate: bool
    samples_to_accurate: int
    episodes: int
    operators_transferred: int = 0
    operators_new: int = 0
    levels: int = 0
    level0_nodes: int = 0
    level0_max_path: int = 0
    top_nodes: int = 0
    top_max_path: int = 0

    def csv(self) -> str:
        return ",".join(
            str(v)
            for v in (
                self.seed,
                self.task_index,
                self.arm,
                int(self.accurate),
                self.samples_to_accurate,
                self.episodes,
                self.operators_transferred,
                self.operators_new,
                self.levels,
                self.level0_nodes,
                self.level0_max_path,
                self.top_nodes,
                self.top_max_path,
            )
        )


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = ["# symplan-config v1"]
    lines.append(f"kind = {cfg.kind}")
    lines.append("seeds = " + ",".join(str(s) for s in cfg.seeds))
    for name in ("n_tasks", "batch_size", "max_batches", "n_particles", "jobs"):
        lines.append(f"{name} = {getattr(cfg, name)}")
    lines.append(f"theta = {cfg.theta:g}")
    lines.append(f"equivalence_threshold = {cfg.equivalence_threshold:g}")
    lines.append(f"out_dir = {cfg.out_dir}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> ExperimentConfig:
    vals: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key == "seeds":
            vals[key] = tuple(int(t) for t in raw.split(","))
        elif key in ("n_tasks", "batch_size", "max_batches", "n_particles", "jobs"):
            vals[key] = int(raw)
        elif key in ("theta", "equivalence_threshold"):
            vals[key] = float(raw)
        else:
            vals[key] = raw
    return ExperimentConfig(**vals)


# --- maze task loop ---------------------------------------------------------------


def _maze_goal(env: MazeEnv) -> EqualityGoal:
    env.reset()
    x0 = env.problem_state()
    # solved means: treasure held, agent back at the start cell
    return EqualityGoal(
        indices=(0, 1, len(x0) - 1),
        values=(float(env.spec.start[0]), float(env.spec.start[1]), 1.0),
    )


def _maze_rounds(env, oracle_steps, cfg, seed_base, library):
    """Collect in batches until the grounded model is accurate. Returns
    (accurate, samples_used, episodes, library', n_transferred, n_new,
    final grounded model or None)."""
    cum: Dataset | None = None
    n_tr = n_new = 0
    model = None
    lib_latest = library
    for batch in range(1, cfg.max_batches + 1):
        ds = collect_dataset(env, cfg.batch_size, seed_base + batch, p_uniform=0.3)
        cum = ds if cum is None else cum.merged_with(ds)
        try:
            if library is None:
                lib_now = learn_portable(cum)
                n_tr, n_new = 0, len(lib_now.operators)
            else:
                lib_now, n_tr, n_new = transfer_update(
                    library, cum, threshold=cfg.equivalence_threshold
                )
            labeling = infer_labels(cum, lib_now)
            links = learn_linking(cum, labeling)
            gops = ground(lib_now, labeling, links, cum)
        except (InsufficientData, SymplanError):
            continue
        if not gops:
            continue
        lib_latest = lib_now
        env.reset()
        model = GroundedModel(
            operators=gops,
            initial_d=env.agent_obs(),
            initial_x=env.problem_state(),
            goal=_maze_goal(env),
        )
        ok, _ = model_accurate(
            model, oracle_steps, env, theta=cfg.theta, n_particles=cfg.n_particles,
            seed=seed_base,
        )
        if ok:
            return True, batch * cfg.batch_size, batch, lib_latest, n_tr, n_new, model
    return False, cfg.max_batches * cfg.batch_size, cfg.max_batches, lib_latest, n_tr, n_new, model


def _agent_transfer_seed(args):
    seed, cfg = args
    rng = np.random.default_rng(seed)
    order = rng.permutation(cfg.n_tasks)
    tasks = [
        (int(j), generate_maze(1000 * seed + int(j), MAZE_DIFFICULTIES[int(j) % len(MAZE_DIFFICULTIES)]))
        for j in order
    ]
    rows: list[MetricsRow] = []
    for arm in ("transfer", "baseline"):
        library = None
        for pos, (j, spec) in enumerate(tasks):
            env = MazeEnv(spec, task_id=f"maze-s{seed}-t{j}")
            steps = list(oracle_plan(env).steps)
            env.reset()
            lib_in = library if arm == "transfer" else None
            ok, samples, episodes, lib_out, n_tr, n_new, _ = _maze_rounds(
                env, steps, cfg, seed_base=100_000 * seed + 1_000 * pos, library=lib_in
            )
            if arm == "transfer":
                library = lib_out if lib_out is not None else library
            rows.append(
                MetricsRow(
                    seed=seed,
                    task_index=pos + 1,
                    arm=arm,
                    accurate=ok,
                    samples_to_accurate=samples,
                    episodes=episodes,
                    operators_transferred=n_tr,
                    operators_new=n_new,
                )
            )
    return rows


# --- rooms task loop ---------------------------------------------------------------


def _rooms_rounds(env, adapter, oracle_steps, cfg, seed_base, types):
    cum: Dataset | None = None
    n_tr = n_new = 0
    types_latest = types if types is not None else []
    for batch in range(1, cfg.max_batches + 1):
        ds = collect_dataset(env, cfg.batch_size, seed_base + batch, p_uniform=0.3)
        cum = ds if cum is None else cum.merged_with(ds)
        try:
            if types is None:
                ops, sigs = learn_object_operators(cum, adapter)
                types_now = merge_types(ops, sigs, cfg.equivalence_threshold)
                n_tr, n_new = 0, sum(max(len(t.operators), 1) for t in types_now)
            else:
                types_now, n_tr, n_new = object_transfer_update(
                    types, cum, adapter, cfg.equivalence_threshold
                )
            gops, _ = ground_typed(types_now, cum, adapter)
        except (InsufficientData, SymplanError):
            continue
        if not gops:
            continue
        env.reset()
        model = GroundedModel(
            operators=gops,
            initial_d=env.agent_obs(),
            initial_x=env.problem_state(),
            goal=EqualityGoal(
                indices=(adapter.slices["chest0"].start + 2,), values=(1.0,)
            ),
        )
        ok, _ = model_accurate(
            model, oracle_steps, env, theta=cfg.theta, n_particles=cfg.n_particles,
            seed=seed_base,
        )
        if ok:
            return True, batch * cfg.batch_size, batch, types_now, n_tr, n_new
        types_latest = types_now
    return False, cfg.max_batches * cfg.batch_size, cfg.max_batches, types_latest, n_tr, n_new


def _object_transfer_seed(args):
    seed, cfg = args
    rows: list[MetricsRow] = []
    types = None
    for j in range(cfg.n_tasks):
        spec = generate_rooms(1000 * seed + j)
        env = RoomsEnv(spec, task_id=f"rooms-s{seed}-t{j}")
        adapter = RoomsAdapter(spec)
        steps = list(oracle_plan(env).steps)
        env.reset()
        ok, samples, episodes, types, n_tr, n_new = _rooms_rounds(
            env, adapter, steps, cfg, seed_base=100_000 * seed + 1_000 * j, types=types
        )
        rows.append(
            MetricsRow(
                seed=seed,
                task_index=j + 1,
                arm="transfer",
                accurate=ok,
                samples_to_accurate=samples,
                episodes=episodes,
                operators_transferred=n_tr,
                operators_new=n_new,
            )
        )
    return rows


# --- hierarchy loop -----------------------------------------------------------------


def _hierarchy_seed(args):
    seed, cfg = args
    rows: list[MetricsRow] = []
    hist_rows: list[str] = []
    library = None
    for j in range(cfg.n_tasks):
        spec = generate_maze(1000 * seed + j, MAZE_DIFFICULTIES[j % len(MAZE_DIFFICULTIES)])
        env = MazeEnv(spec, task_id=f"maze-s{seed}-t{j}")
        steps = list(oracle_plan(env).steps)
        env.reset()
        ok, samples, episodes, library, n_tr, n_new, model = _maze_rounds(
            env, steps, cfg, seed_base=100_000 * seed + 1_000 * j, library=library
        )
        levels = []
        if model is not None:
            levels = build_hierarchy(model, seed=seed)
            for lv in levels:
                h = path_length_histogram(lv.graph)
                for length in sorted(h):
                    hist_rows.append(f"{seed},{j + 1},{lv.level},{length},{h[length]}")
        l0max = histogram_stats(path_length_histogram(levels[0].graph))[0] if levels else 0
        topmax = histogram_stats(path_length_histogram(levels[-1].graph))[0] if levels else 0
        rows.append(
            MetricsRow(
                seed=seed,
                task_index=j + 1,
                arm="transfer",
                accurate=ok,
                samples_to_accurate=samples,
                episodes=episodes,
                operators_transferred=n_tr,
                operators_new=n_new,
                levels=len(levels),
                level0_nodes=levels[0].graph.n_nodes() if levels else 0,
                level0_max_path=l0max,
                top_nodes=levels[-1].graph.n_nodes() if levels else 0,
                top_max_path=topmax,
            )
        )
    return rows, hist_rows


# --- drivers -----------------------------------------------------------------------


def _run_seeds(fn, cfg: ExperimentConfig):
    """Run one job per seed; on failure return what finished plus the error,
    so callers can flush a partial CSV before propagating."""
    args = [(s, cfg) for s in cfg.seeds]
    results, err = [], None
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(fn, a) for a in args]
            for fut in futures:
                try:
                    results.append(fut.result())
                except Exception as e:  # noqa: BLE001 - deliberate flush point
                    err = e
                    break
    else:
        for a in args:
            try:
                results.append(fn(a))
            except Exception as e:  # noqa: BLE001
                err = e
                break
    return results, err


def _write(path: str, header: str, lines: list[str]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        f.write(header + "\n")
        for line in lines:
            f.write(line + "\n")


def run_agent_transfer(cfg: ExperimentConfig) -> str:
    """Sample-efficiency experiment: randomized 10-maze curriculum per seed,
    with a library-carrying transfer arm and a fresh-library baseline arm."""
    results, err = _run_seeds(_agent_transfer_seed, cfg)
    rows = sorted(
        (r for rs in results for r in rs), key=lambda r: (r.seed, r.arm, r.task_index)
    )
    path = os.path.join(cfg.out_dir, "agent_transfer.csv")
    _write(path, METRICS_HEADER, [r.csv() for r in rows])
    if err is not None:
        raise err
    return path


def run_object_transfer(cfg: ExperimentConfig) -> str:
    """Operator-reuse experiment: 5 rooms tasks per seed; typed operators
    carry over, location labels are relearned per task."""
    cfg = replace(cfg, n_tasks=min(cfg.n_tasks, 5))
    results, err = _run_seeds(_object_transfer_seed, cfg)
    rows = sorted(
        (r for rs in results for r in rs), key=lambda r: (r.seed, r.arm, r.task_index)
    )
    path = os.path.join(cfg.out_dir, "object_transfer.csv")
    _write(path, METRICS_HEADER, [r.csv() for r in rows])
    if err is not None:
        raise err
    return path


def run_hierarchy(cfg: ExperimentConfig) -> tuple[str, str]:
    """Hierarchy experiment: per task, episodes-to-accurate-model with a
    transferred library, plus the per-level path-length histograms."""
    results, err = _run_seeds(_hierarchy_seed, cfg)
    rows = sorted(
        (r for rs, _ in results for r in rs), key=lambda r: (r.seed, r.arm, r.task_index)
    )
    hists = sorted(
        (h for _, hs in results for h in hs),
        key=lambda s: tuple(int(t) for t in s.split(",")),
    )
    mpath = os.path.join(cfg.out_dir, "hierarchy.csv")
    hpath = os.path.join(cfg.out_dir, "hierarchy_hists.csv")
    _write(mpath, METRICS_HEADER, [r.csv() for r in rows])
    _write(hpath, HIST_HEADER, hists)
    if err is not None:
        raise err
    return mpath, hpath


def run_experiment(cfg: ExperimentConfig):
    if cfg.kind == "agent-transfer":
        return run_agent_transfer(cfg)
    if cfg.kind == "object-transfer":
        return run_object_transfer(cfg)
    return run_hierarchy(cfg)
