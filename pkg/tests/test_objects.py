"""Object-centric pipeline: PCA, relative features, types, typed grounding."""

import numpy as np
import pytest

from symplan.envs.oracle import oracle_plan
from symplan.envs.rooms import RoomsEnv, generate_rooms
from symplan.errors import InsufficientData, RankDeficient, SchemaMismatch
from symplan.objects import (
    RASTER_H,
    RASTER_W,
    RoomsAdapter,
    ground_typed,
    learn_object_operators,
    load_type_library,
    merge_types,
    object_transfer_update,
    pca_fit,
    pca_reconstruct,
    pca_transform,
    render_raster,
    save_type_library,
    type_of,
)
from symplan.plan import EqualityGoal, GroundedModel, evaluate_option_plan


# --- PCA ---------------------------------------------------------------------


def _synthetic_rasters(seed, n=120, d=60, rank=25):
    rng = np.random.default_rng(seed)
    basis = rng.normal(size=(rank, d))
    codes = rng.normal(size=(n, rank)) * np.linspace(5, 0.5, rank)
    return codes @ basis + rng.normal(scale=1e-3, size=(n, d))


def test_pca_matches_eigendecomposition():
    # [DERIVED] oracle: dense eigendecomposition of the covariance matrix
    X = _synthetic_rasters(0)
    model = pca_fit(X, k=40)
    cov = np.cov(X, rowvar=False)
    evals = np.sort(np.linalg.eigvalsh(cov))[::-1]
    total = evals.sum()
    got = model.explained_variance[:40] / total
    want = evals[:40] / total
    np.testing.assert_allclose(got, want, atol=1e-8)


def test_pca_components_orthonormal():
    model = pca_fit(_synthetic_rasters(1), k=20)
    gram = model.components @ model.components.T
    np.testing.assert_allclose(gram, np.eye(20), atol=1e-9)


def test_pca_reconstruction_monotone_in_k():
    X = _synthetic_rasters(2)
    errs = []
    for k in (5, 10, 20, 40):
        m = pca_fit(X, k=k)
        rec = pca_reconstruct(m, pca_transform(m, X))
        errs.append(float(((X - rec) ** 2).mean()))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < errs[0]


def test_pca_rank_deficient_pads():
    X = _synthetic_rasters(3, n=80, rank=10)
    # exact low rank: strip the noise term
    rng = np.random.default_rng(3)
    basis = rng.normal(size=(10, 60))
    X = rng.normal(size=(80, 10)) @ basis
    with pytest.warns(RankDeficient):
        m = pca_fit(X, k=40)
    assert m.components.shape == (40, 60)
    assert (m.explained_variance[10:] == 0.0).all()


def test_pca_insufficient_samples():
    with pytest.raises(InsufficientData):
        pca_fit(np.zeros((10, 5)), k=40)


def test_render_raster_deterministic(rooms_setup):
    spec, env, adapter, ds = rooms_setup
    env.reset()
    x = env.problem_state()
    a = render_raster(spec, x, env)
    b = render_raster(spec, x, env)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (RASTER_H * RASTER_W,)
    assert a.max() == 1.0  # agent pixel


def test_pca_on_rendered_rasters(rooms_setup):
    spec, env, adapter, ds = rooms_setup
    rasters = np.array([render_raster(spec, s.x_start, env) for s in ds.samples[:200]])
    with pytest.warns(RankDeficient):
        m = pca_fit(rasters, k=40)
    rec = pca_reconstruct(m, pca_transform(m, rasters))
    assert ((rasters - rec) ** 2).mean() < 1e-6


# --- relative features -------------------------------------------------------


def test_rel_features_shape_and_distance(rooms_setup):
    spec, env, adapter, ds = rooms_setup
    env.reset()
    x = env.problem_state()[None]
    for oid, kind in env.objects:
        rel = adapter.rel_features(x, oid)
        assert rel.shape == (1, adapter.REL_DIM)
        sl = adapter.slices[oid]
        d = np.hypot(x[0, 0] - x[0, sl.start], x[0, 2] - x[0, sl.start + 1])
        assert rel[0, 0] == pytest.approx(d)


def test_reachability_respects_closed_doors(rooms_setup):
    spec, env, adapter, ds = rooms_setup
    env.reset()
    x = env.problem_state().copy()
    closed = [d for d in spec.doors if not d["open0"]]
    if not closed:
        pytest.skip("generated task has no closed door")
    # an object behind a closed door in another room must be unreachable from
    # the start until the door state flips
    start_room = spec.start_room
    for item in spec.items:
        if item["room"] != start_room:
            rel0 = adapter.rel_features(x[None], item["id"])[0]
            x2 = x.copy()
            for d in spec.doors:
                x2[adapter.slices[d["id"]].start + 2] = 1.0
            rel1 = adapter.rel_features(x2[None], item["id"])[0]
            assert rel1[1] == 1.0
            if rel0[1] == 0.0:
                return
    pytest.skip("all items reachable at reset in this task")


# --- operators, types, grounding ---------------------------------------------


@pytest.fixture(scope="module")
def typed_pipeline(rooms_setup):
    spec, env, adapter, ds = rooms_setup
    ops, sigs = learn_object_operators(ds, adapter)
    types = merge_types(ops, sigs)
    return ops, sigs, types


def test_signatures_tag_side_effects(rooms_setup, typed_pipeline):
    spec, env, adapter, ds = rooms_setup
    ops, sigs, types = typed_pipeline
    lever_ids = [v["id"] for v in spec.levers]
    for lv in lever_ids:
        assert "PullLever" in sigs[lv]
    # the lever-linked door changes state only as a side effect
    linked = [d["id"] for d in spec.doors if d["kind"] == "puzzle"]
    for did in linked:
        assert "PullLever*" in sigs[did]
        assert "PullLever" not in sigs[did]


def test_chest_and_doors_typed_differently(rooms_setup, typed_pipeline):
    spec, env, adapter, ds = rooms_setup
    _, _, types = typed_pipeline
    chest_t = type_of(types, "chest0")
    assert chest_t is not None
    for d in spec.doors:
        door_t = type_of(types, d["id"])
        assert door_t is None or door_t.type_id != chest_t.type_id


def test_plain_doors_share_a_type(rooms_setup, typed_pipeline):
    spec, env, adapter, ds = rooms_setup
    _, _, types = typed_pipeline
    plain = [d["id"] for d in spec.doors if d["kind"] == "regular"]
    tids = {type_of(types, did).type_id for did in plain if type_of(types, did)}
    assert len(tids) == 1


def test_typed_grounded_model_scores_oracle(rooms_setup, typed_pipeline):
    spec, env, adapter, ds = rooms_setup
    _, _, types = typed_pipeline
    gops, _ = ground_typed(types, ds, adapter)
    steps = list(oracle_plan(env).steps)
    env.reset()
    model = GroundedModel(
        operators=gops,
        initial_d=env.agent_obs(),
        initial_x=env.problem_state(),
        goal=EqualityGoal(indices=(adapter.slices["chest0"].start + 2,), values=(1.0,)),
    )
    p, _ = evaluate_option_plan(model, steps, n_particles=300, seed=0)
    assert p > 0.8


def test_transfer_to_new_rooms_task(typed_pipeline):
    _, _, types = typed_pipeline
    spec_b = generate_rooms(11)
    env_b = RoomsEnv(spec_b)
    adapter_b = RoomsAdapter(spec_b)
    from symplan.smdp import collect_dataset

    ds_b = collect_dataset(env_b, 3000, 1, p_uniform=0.3)
    types_b, n_tr, n_new = object_transfer_update(types, ds_b, adapter_b, 0.1)
    assert n_tr > 0
    # chest/door/lever/key machinery recurs across tasks, so most operator
    # mass transfers
    assert n_tr >= n_new


def test_type_library_roundtrip(tmp_path, rooms_setup, typed_pipeline):
    spec, env, adapter, ds = rooms_setup
    _, _, types = typed_pipeline
    path = str(tmp_path / "types.json")
    save_type_library(types, path)
    back = load_type_library(path)
    assert [t.members for t in back] == [t.members for t in types]
    g1 = sorted(g.name for g in ground_typed(types, ds, adapter)[0])
    g2 = sorted(g.name for g in ground_typed(back, ds, adapter)[0])
    assert g1 == g2


def test_type_library_schema_mismatch(tmp_path):
    path = str(tmp_path / "bad.json")
    with open(path, "w") as f:
        f.write('{"format": "something-else"}')
    with pytest.raises(SchemaMismatch):
        load_type_library(path)
