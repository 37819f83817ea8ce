"""Core option/SMDP abstractions: environments, transition samples, datasets.

Every learning module in the package consumes ``Dataset`` objects produced
here. Datasets are immutable after collection and deterministic in the seed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import NoExecutableOption, UnknownOption

#: hard bound on primitive steps per option execution
STEP_CAP = 1000

#: option executions per episode before a forced reset during collection
EPISODE_CAP = 200


class Environment:
    """Interface every simulated domain implements.

    Options are scripted: ``can_execute`` is the initiation predicate and
    ``run_option`` runs the policy to termination (deterministic, bounded by
    STEP_CAP). State is exposed as two vectors: the task-specific problem
    state and the egocentric agent observation.
    """

    task_id: str = "task"

    def reset(self) -> None:
        raise NotImplementedError

    def option_ids(self) -> list[str]:
        raise NotImplementedError

    def can_execute(self, option_id: str) -> bool:
        raise NotImplementedError

    def run_option(self, option_id: str, rng: np.random.Generator) -> tuple[float, int]:
        """Execute the scripted policy; returns (reward, duration)."""
        raise NotImplementedError

    def problem_state(self) -> np.ndarray:
        raise NotImplementedError

    def agent_obs(self) -> np.ndarray:
        raise NotImplementedError

    def is_solved(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class TransitionSample:
    task_id: str
    option_id: str
    x_start: np.ndarray
    x_end: np.ndarray
    d_start: np.ndarray
    d_end: np.ndarray
    success: bool
    reward: float
    duration: int


@dataclass(frozen=True)
class Dataset:
    domain_id: str
    seed: int
    samples: tuple[TransitionSample, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.samples)

    def for_option(self, option_id: str, successful_only: bool = False):
        return [
            s
            for s in self.samples
            if s.option_id == option_id and (s.success or not successful_only)
        ]

    def option_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for s in self.samples:
            seen.setdefault(s.option_id, None)
        return list(seen)

    def merged_with(self, other: "Dataset") -> "Dataset":
        return Dataset(self.domain_id, self.seed, self.samples + other.samples)


def execute_option(env: Environment, option_id: str, rng: np.random.Generator) -> TransitionSample:
    """Attempt one option; failed initiation yields an unchanged-state sample."""
    if option_id not in env.option_ids():
        raise UnknownOption(option_id)
    x0 = env.problem_state()
    d0 = env.agent_obs()
    if env.is_solved() or not env.can_execute(option_id):
        return TransitionSample(env.task_id, option_id, x0, x0, d0, d0, False, 0.0, 0)
    reward, duration = env.run_option(option_id, rng)
    return TransitionSample(
        env.task_id, option_id, x0, env.problem_state(), d0, env.agent_obs(),
        True, reward, duration,
    )


def collect_dataset(env: Environment, n: int, seed: int, p_uniform: float = 1.0) -> Dataset:
    """Gather n samples by random exploration over the option set.

    With probability p_uniform an option is drawn uniformly from the full
    option set; attempts whose initiation predicate fails are recorded as
    success=False samples (the natural negative examples for precondition
    learning). Otherwise the draw is restricted to currently executable
    options, which pushes exploration deeper into domains with long
    enabling chains. The episode resets when the task is solved, no option
    is executable, or EPISODE_CAP executions have happened.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    env.reset()
    options = env.option_ids()
    if not any(env.can_execute(o) for o in options):
        raise NoExecutableOption(env.task_id)
    samples: list[TransitionSample] = []
    executions = 0
    while len(samples) < n:
        if env.is_solved() or executions >= EPISODE_CAP or not any(
            env.can_execute(o) for o in options
        ):
            env.reset()
            executions = 0
        pool = options
        if rng.random() >= p_uniform:
            pool = [o for o in options if env.can_execute(o)] or options
        oid = pool[int(rng.integers(len(pool)))]
        s = execute_option(env, oid, rng)
        samples.append(s)
        if s.success:
            executions += 1
    return Dataset(domain_id=env.task_id, seed=seed, samples=tuple(samples))


# --- serialization ---------------------------------------------------------

_FMT = "%.17g"


def _vec_str(v: np.ndarray) -> str:
    return ",".join(_FMT % x for x in np.asarray(v, dtype=np.float64).ravel())


def _vec_parse(s: str) -> np.ndarray:
    if s == "":
        return np.zeros(0)
    return np.array([float(t) for t in s.split(",")])


def save_dataset(ds: Dataset, path_or_buf) -> None:
    """Write the structured text format (lossless at >= 15 significant digits)."""
    own = isinstance(path_or_buf, (str, bytes))
    f = open(path_or_buf, "w") if own else path_or_buf
    try:
        x_dim = len(ds.samples[0].x_start) if ds.samples else 0
        d_dim = len(ds.samples[0].d_start) if ds.samples else 0
        f.write("# symplan-dataset v1\n")
        f.write(f"domain_id={ds.domain_id}\n")
        f.write(f"seed={ds.seed}\n")
        f.write(f"x_dim={x_dim}\n")
        f.write(f"d_dim={d_dim}\n")
        f.write(f"n={len(ds.samples)}\n")
        for s in ds.samples:
            f.write(
                "|".join(
                    [
                        s.task_id,
                        s.option_id,
                        "1" if s.success else "0",
                        _FMT % s.reward,
                        str(s.duration),
                        _vec_str(s.x_start),
                        _vec_str(s.x_end),
                        _vec_str(s.d_start),
                        _vec_str(s.d_end),
                    ]
                )
                + "\n"
            )
    finally:
        if own:
            f.close()


def load_dataset(path_or_buf) -> Dataset:
    own = isinstance(path_or_buf, (str, bytes))
    f = open(path_or_buf) if own else path_or_buf
    try:
        header = f.readline().strip()
        if header != "# symplan-dataset v1":
            raise ValueError(f"not a symplan dataset: {header!r}")
        meta = {}
        for _ in range(5):
            k, v = f.readline().strip().split("=", 1)
            meta[k] = v
        samples = []
        for _ in range(int(meta["n"])):
            parts = f.readline().rstrip("\n").split("|")
            task_id, option_id, succ, reward, duration = parts[:5]
            samples.append(
                TransitionSample(
                    task_id=task_id,
                    option_id=option_id,
                    x_start=_vec_parse(parts[5]),
                    x_end=_vec_parse(parts[6]),
                    d_start=_vec_parse(parts[7]),
                    d_end=_vec_parse(parts[8]),
                    success=succ == "1",
                    reward=float(reward),
                    duration=int(duration),
                )
            )
        return Dataset(meta["domain_id"], int(meta["seed"]), tuple(samples))
    finally:
        if own:
            f.close()


def dataset_to_text(ds: Dataset) -> str:
    buf = io.StringIO()
    save_dataset(ds, buf)
    return buf.getvalue()


def dataset_from_text(text: str) -> Dataset:
    return load_dataset(io.StringIO(text))
