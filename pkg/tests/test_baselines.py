import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwglobal.baselines import (
    ascent_objective,
    brute_force,
    linearization,
    local_search,
    multi_start,
    relative_error,
)
from gwglobal.core import PointCloud, build_instance, gw_value_quadratic
from gwglobal.solver import solve
from cases import near_symmetric_instance
from oracles import all_perms, finite_difference_grad, gw_double_sum


def random_instance(seed, n, lx=2, ly=2):
    rng = np.random.default_rng(seed)
    return build_instance(PointCloud(rng.standard_normal((lx, n))), PointCloud(rng.standard_normal((ly, n))))


# -- brute_force ----------------------------------------------------------------

def test_brute_identical():
    x = PointCloud(np.random.default_rng(0).standard_normal((2, 4)))
    inst = build_instance(x, x)
    perm, value = brute_force(inst)
    assert abs(value) <= 1e-12 * inst.scale
    assert abs(gw_value_quadratic(inst, np.arange(4))) <= 1e-12 * inst.scale


def test_brute_1d_pair():
    inst = build_instance(PointCloud(np.array([[0.0, 1.0]])), PointCloud(np.array([[0.0, 2.0]])))
    perm, value = brute_force(inst)
    assert value == pytest.approx(9.0)
    np.testing.assert_array_equal(perm, [0, 1])


def test_brute_mirror():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((2, 6))
    sigma = rng.permutation(6)
    Y = (np.diag([-1.0, 1.0]) @ X)[:, sigma]
    inst = build_instance(PointCloud(X), PointCloud(Y))
    perm, value = brute_force(inst)
    assert abs(value) <= 1e-9 * inst.scale
    np.testing.assert_array_equal(sigma[perm], np.arange(6))


def test_brute_matches_enumeration_oracle():
    inst = random_instance(2, 5)
    vals = [gw_double_sum(inst.X, inst.Y, p) for p in all_perms(5)]
    perm, value = brute_force(inst)
    assert value == pytest.approx(min(vals), rel=1e-10)
    assert int(np.argmin(vals)) == [tuple(p) for p in all_perms(5)].index(tuple(perm))


def test_brute_guard():
    with pytest.raises(ValueError):
        brute_force(random_instance(0, 11))


# -- local_search ----------------------------------------------------------------

def test_linearization_is_gradient():
    inst = random_instance(3, 5, 2, 3)
    rng = np.random.default_rng(0)
    G = np.zeros((5, 5))
    for w in rng.dirichlet(np.ones(4)):
        G[np.arange(5), rng.permutation(5)] += w
    num = finite_difference_grad(lambda H: ascent_objective(inst, H), G)
    np.testing.assert_allclose(linearization(inst, G), num, rtol=1e-6, atol=1e-6 * inst.scale)
    p = rng.permutation(5)
    np.testing.assert_allclose(linearization(inst, p), linearization(inst, np.eye(5)[p]), rtol=1e-12)


def test_fixed_point_at_optimum():
    for seed in range(5):
        inst = random_instance(10 + seed, 6)
        perm, value = brute_force(inst)
        res = local_search(inst, perm)
        assert res.value == pytest.approx(value, rel=1e-9, abs=1e-12)


def test_identical_identity_start():
    x = PointCloud(np.random.default_rng(4).standard_normal((2, 30)))
    res = local_search(build_instance(x, x), np.arange(30))
    assert abs(res.value) <= 1e-9 * build_instance(x, x).scale
    assert res.iters <= 2
    perm, value, iters = res
    assert iters == res.iters


def test_start_validation():
    inst = random_instance(0, 4)
    with pytest.raises(ValueError):
        local_search(inst, np.array([0, 0, 1, 2]))
    with pytest.raises(ValueError):
        local_search(inst, np.eye(3))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8))
def test_ascent_and_dominance(seed, n):
    inst = random_instance(seed, n)
    start = np.random.default_rng(seed).permutation(n)
    res = local_search(inst, start)
    g = np.array(res.objective_trace)
    assert np.all(np.diff(g) >= -1e-9 * inst.scale)
    assert res.value >= brute_force(inst)[1] - 1e-9 * inst.scale


def test_dense_start():
    inst = random_instance(5, 6)
    res = local_search(inst, np.full((6, 6), 1 / 6))
    assert sorted(res.perm) == list(range(6))


# -- multi_start -------------------------------------------------------------------

def test_single_start_equals_local_search():
    inst = random_instance(6, 12)
    rep = multi_start(inst, 1, seed=7)
    start = np.random.default_rng(7).permutation(12)
    assert rep.best_value == local_search(inst, start).value
    assert rep.n_starts == 1 and rep.values == [rep.best_value]


def test_multi_start_deterministic_and_consistent():
    inst = random_instance(7, 15)
    a, b = multi_start(inst, 8, seed=1), multi_start(inst, 8, seed=1)
    assert a.values == b.values
    assert a.best_value == min(a.values)
    opt = solve(inst).value
    assert all(v >= opt - 1e-9 * inst.scale for v in a.values)
    with pytest.raises(ValueError):
        multi_start(inst, 0)


def test_symmetric_instance_has_traps():
    inst = near_symmetric_instance(8, 0)
    _, opt = brute_force(inst)
    rep = multi_start(inst, 100, seed=0)
    hit = np.mean([relative_error(v, opt) <= 1e-6 for v in rep.values])
    assert 0 < hit < 1


def test_oracle_mode(tmp_path):
    inst = near_symmetric_instance(8, 1)
    _, opt = brute_force(inst)
    rep = multi_start(inst, 200, seed=0, stop_value=opt, tol=1e-6)
    assert rep.success
    assert relative_error(rep.best_value, opt) <= 1e-6
    assert rep.n_starts < 200
    path = tmp_path / "report.csv"
    rep.write_csv(path)
    row = next(csv.DictReader(path.open()))
    assert int(row["initializations"]) == rep.n_starts and row["success"] == "1"
    assert rep.to_dict()["best_value"] == rep.best_value
