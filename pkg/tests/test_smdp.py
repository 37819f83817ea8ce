"""Dataset collection and serialization."""

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplan.envs.maze import MazeEnv, generate_maze
from symplan.errors import UnknownOption
from symplan.smdp import (
    Dataset,
    TransitionSample,
    collect_dataset,
    dataset_from_text,
    dataset_to_text,
    execute_option,
)


def test_collect_deterministic(maze_env7):
    a = collect_dataset(maze_env7, 200, 5)
    b = collect_dataset(maze_env7, 200, 5)
    assert dataset_to_text(a) == dataset_to_text(b)


def test_collect_seed_sensitivity(maze_env7):
    a = collect_dataset(maze_env7, 200, 5)
    b = collect_dataset(maze_env7, 200, 6)
    assert dataset_to_text(a) != dataset_to_text(b)


def test_failed_attempts_keep_state(maze_env7):
    ds = collect_dataset(maze_env7, 400, 0)
    fails = [s for s in ds.samples if not s.success]
    assert fails, "uniform exploration should hit failed initiations"
    for s in fails:
        np.testing.assert_array_equal(s.x_start, s.x_end)
        np.testing.assert_array_equal(s.d_start, s.d_end)
        assert s.duration == 0


def test_executable_biased_collection_has_no_failures(maze_env7):
    ds = collect_dataset(maze_env7, 200, 0, p_uniform=0.0)
    assert all(s.success for s in ds.samples)


def test_unknown_option_raises(maze_env7):
    maze_env7.reset()
    with pytest.raises(UnknownOption):
        execute_option(maze_env7, "Fly", np.random.default_rng(0))


def test_collect_n_validation(maze_env7):
    with pytest.raises(ValueError):
        collect_dataset(maze_env7, 0, 0)


def test_roundtrip_exact(maze_dataset7):
    text = dataset_to_text(maze_dataset7)
    back = dataset_from_text(text)
    assert len(back) == len(maze_dataset7)
    for a, b in zip(maze_dataset7.samples, back.samples):
        assert a.option_id == b.option_id and a.success == b.success
        np.testing.assert_array_equal(a.x_start, b.x_start)
        np.testing.assert_array_equal(a.d_end, b.d_end)


@settings(max_examples=30, deadline=None)
@given(
    vals=st.lists(
        st.floats(min_value=-1e100, max_value=1e100, allow_nan=False), min_size=1, max_size=6
    ),
    reward=st.floats(min_value=-1e100, max_value=1e100, allow_nan=False),
)
def test_roundtrip_property(vals, reward):
    # %.17g is lossless for doubles, so the round-trip must be bit-exact
    v = np.array(vals)
    s = TransitionSample("t", "o", v, v * 3.0 + 1e-17, v - 2.0, v, True, reward, 3)
    ds = Dataset("d", 0, (s,))
    back = dataset_from_text(dataset_to_text(ds))
    np.testing.assert_array_equal(back.samples[0].x_end, s.x_end)
    assert back.samples[0].reward == reward


def test_merged_with(maze_dataset7):
    m = maze_dataset7.merged_with(maze_dataset7)
    assert len(m) == 2 * len(maze_dataset7)
    assert m.option_ids() == maze_dataset7.option_ids()


def test_for_option_filters(maze_dataset7):
    succ = maze_dataset7.for_option("GoLeft", successful_only=True)
    assert succ and all(s.success and s.option_id == "GoLeft" for s in succ)
