"""Command-line harness around the library.

Subcommands mirror the pipeline stages: generate a task file, collect a
dataset, learn a (portable or typed) operator library, ground it, plan, build
a hierarchy, or run one of the batch experiments. Every command is seeded and
deterministic.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from .envs.maze import MazeEnv, MazeSpec, generate_maze
from .envs.oracle import oracle_plan
from .envs.rooms import RoomsEnv, RoomsSpec, generate_rooms
from .envs.taskfile import load_task, save_task
from .experiments import (
    ExperimentConfig,
    config_from_text,
    run_experiment,
)
from .hierarchy import build_hierarchy, graph_to_text, histograms_to_csv, path_length_histogram
from .objects import (
    RoomsAdapter,
    ground_typed,
    learn_object_operators,
    load_type_library,
    merge_types,
    save_type_library,
)
from .plan import EqualityGoal, GroundedModel, find_plan, model_accurate
from .portable import ground, infer_labels, learn_linking, learn_portable, load_library, save_library
from .smdp import collect_dataset, load_dataset, save_dataset


def _env_of(spec):
    if isinstance(spec, MazeSpec):
        return MazeEnv(spec)
    if isinstance(spec, RoomsSpec):
        return RoomsEnv(spec)
    raise click.ClickException(f"unsupported task spec {type(spec).__name__}")


def _goal_of(spec, env) -> EqualityGoal:
    env.reset()
    if isinstance(spec, MazeSpec):
        x0 = env.problem_state()
        return EqualityGoal(
            indices=(0, 1, len(x0) - 1),
            values=(float(spec.start[0]), float(spec.start[1]), 1.0),
        )
    adapter = RoomsAdapter(spec)
    return EqualityGoal(indices=(adapter.slices["chest0"].start + 2,), values=(1.0,))


def _grounded_ops(spec, ds, library_path):
    """Learn (or load) the appropriate library and ground it on the dataset."""
    if isinstance(spec, MazeSpec):
        lib = load_library(library_path) if library_path else learn_portable(ds)
        labeling = infer_labels(ds, lib)
        links = learn_linking(ds, labeling)
        return ground(lib, labeling, links, ds)
    adapter = RoomsAdapter(spec)
    if library_path:
        types = load_type_library(library_path)
    else:
        ops, sigs = learn_object_operators(ds, adapter)
        types = merge_types(ops, sigs)
    gops, _ = ground_typed(types, ds, adapter)
    return gops


@click.group()
def main():
    """Learn portable symbolic abstractions from option-execution data."""


@main.command("gen-task")
@click.option("--domain", type=click.Choice(["maze", "rooms"]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--difficulty", type=int, default=1, show_default=True, help="maze only")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen_task(domain, seed, difficulty, out):
    """Generate a task spec file."""
    spec = generate_maze(seed, difficulty) if domain == "maze" else generate_rooms(seed)
    save_task(spec, out)
    click.echo(out)


@main.command()
@click.option("--task", "task_path", type=click.Path(exists=True), required=True)
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--p-uniform", type=float, default=1.0, show_default=True,
              help="probability of drawing from the full option set vs the executable subset")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def collect(task_path, n, seed, p_uniform, out):
    """Collect an exploration dataset on a task."""
    env = _env_of(load_task(task_path))
    ds = collect_dataset(env, n, seed, p_uniform=p_uniform)
    save_dataset(ds, out)
    click.echo(f"{out}: {len(ds)} samples, {len(ds.option_ids())} options")


@main.command()
@click.option("--task", "task_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def learn(task_path, data_path, out):
    """Learn the portable (maze) or typed (rooms) operator library."""
    spec = load_task(task_path)
    ds = load_dataset(data_path)
    if isinstance(spec, MazeSpec):
        lib = learn_portable(ds)
        save_library(lib, out)
        click.echo(f"{out}: {len(lib.operators)} portable operators")
    else:
        ops, sigs = learn_object_operators(ds, RoomsAdapter(spec))
        types = merge_types(ops, sigs)
        save_type_library(types, out)
        click.echo(f"{out}: {len(types)} object types, {len(ops)} operators")


@main.command("ground")
@click.option("--task", "task_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--library", "library_path", type=click.Path(exists=True), default=None,
              help="reuse a saved library instead of learning from the dataset")
def ground_cmd(task_path, data_path, library_path):
    """Ground the library on a task; prints one operator per line."""
    spec = load_task(task_path)
    ds = load_dataset(data_path)
    gops = _grounded_ops(spec, ds, library_path)
    for g in sorted(gops, key=lambda g: g.name):
        dist = " ".join(f"{l}:{p:.2f}" for l, p in g.end_label_dist)
        click.echo(f"{g.name} -> {dist}")
    click.echo(f"# {len(gops)} grounded operators", err=True)


@main.command("plan")
@click.option("--task", "task_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--library", "library_path", type=click.Path(exists=True), default=None)
@click.option("--max-depth", type=int, default=None, help="default: oracle length + 2")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--particles", type=int, default=2000, show_default=True)
@click.option("--check", is_flag=True, help="also run the model-accuracy check")
def plan_cmd(task_path, data_path, library_path, max_depth, seed, particles, check):
    """Search for the highest-probability plan on a task."""
    spec = load_task(task_path)
    ds = load_dataset(data_path)
    env = _env_of(spec)
    gops = _grounded_ops(spec, ds, library_path)
    env.reset()
    model = GroundedModel(
        operators=gops,
        initial_d=env.agent_obs(),
        initial_x=env.problem_state(),
        goal=_goal_of(spec, env),
    )
    oracle = list(oracle_plan(env).steps)
    env.reset()
    if check:
        ok, report = model_accurate(model, oracle, env, n_particles=particles, seed=seed)
        click.echo(report.text(), nl=False)
        sys.exit(0 if ok else 1)
    depth = max_depth if max_depth is not None else len(oracle) + 2
    res = find_plan(model, max_depth=depth, n_particles=particles, seed=seed)
    if not res.found:
        click.echo("no plan found")
        sys.exit(1)
    for step in res.plan.steps:
        click.echo(step)
    click.echo(f"# probability {res.probability:.4f}", err=True)


@main.command("hierarchy")
@click.option("--task", "task_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--library", "library_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def hierarchy_cmd(task_path, data_path, library_path, seed, out_dir):
    """Build the abstraction hierarchy over a grounded model."""
    import os

    spec = load_task(task_path)
    ds = load_dataset(data_path)
    env = _env_of(spec)
    gops = _grounded_ops(spec, ds, library_path)
    env.reset()
    model = GroundedModel(
        operators=gops,
        initial_d=env.agent_obs(),
        initial_x=env.problem_state(),
        goal=_goal_of(spec, env),
    )
    levels = build_hierarchy(model, seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    hists = []
    for lv in levels:
        with open(os.path.join(out_dir, f"level{lv.level}.txt"), "w") as f:
            f.write(graph_to_text(lv.graph))
        hists.append(path_length_histogram(lv.graph))
        click.echo(f"level {lv.level}: {lv.graph.n_nodes()} nodes, {len(lv.options)} options")
    with open(os.path.join(out_dir, "path_hists.csv"), "w") as f:
        f.write(histograms_to_csv(hists))


@main.command("experiment")
@click.argument("kind", type=click.Choice(["agent-transfer", "object-transfer", "hierarchy"]))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="structured-text config; flags below override it")
@click.option("--seed", "seeds", type=int, multiple=True,
              help="repeatable; default 0..19")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--tasks", type=int, default=None)
@click.option("--jobs", type=int, default=None)
def experiment(kind, config_path, seeds, out_dir, tasks, jobs):
    """Run a batch experiment, writing deterministic CSV metrics."""
    from dataclasses import replace

    if config_path:
        with open(config_path) as f:
            cfg = config_from_text(f.read())
        cfg = replace(cfg, kind=kind)
    else:
        cfg = ExperimentConfig(kind=kind, seeds=tuple(range(20)))
    if seeds:
        cfg = replace(cfg, seeds=tuple(seeds))
    if out_dir is not None:
        cfg = replace(cfg, out_dir=out_dir)
    if tasks is not None:
        cfg = replace(cfg, n_tasks=tasks)
    if jobs is not None:
        cfg = replace(cfg, jobs=jobs)
    out = run_experiment(cfg)
    for path in [out] if isinstance(out, str) else list(out):
        click.echo(path)


if __name__ == "__main__":
    main()
