import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwglobal.assignment import lap_solve, rank_one_assignment, transport_bound
from gwglobal.core import PointCloud, build_instance
from oracles import all_perms, lap_enumerate


def test_identity_max():
    for n in (2, 5):
        res = lap_solve(np.eye(n), "max")
        np.testing.assert_array_equal(res.perm, np.arange(n))
        assert res.value == n


def test_swap_max():
    res = lap_solve(np.array([[0.0, 1.0], [1.0, 0.0]]), "max")
    np.testing.assert_array_equal(res.perm, [1, 0])
    assert res.value == 2 and res.direction == "max"


@pytest.mark.parametrize("direction", ["min", "max"])
def test_random_6x6_matches_enumeration(direction):
    C = np.random.default_rng(0).standard_normal((6, 6))
    res = lap_solve(C, direction)
    _, best, vals = lap_enumerate(C, direction)
    assert res.value == pytest.approx(best, abs=1e-12)
    assert len(vals) == 720


def test_integer_costs_exact():
    rng = np.random.default_rng(1)
    for n in range(1, 8):
        C = rng.integers(-20, 20, (n, n)).astype(float)
        for d in ("min", "max"):
            assert lap_solve(C, d).value == lap_enumerate(C, d)[1]


def test_errors():
    with pytest.raises(ValueError):
        lap_solve(np.array([[0.0, np.inf], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        lap_solve(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        lap_solve(np.zeros((2, 2)), "up")
    with pytest.raises(ValueError):
        lap_solve(np.zeros((2, 2)), backend="gurobi")


def test_value_recomputed_from_perm():
    C = np.random.default_rng(2).standard_normal((30, 30))
    res = lap_solve(C, "min")
    assert sorted(res.perm) == list(range(30))
    assert res.value == C[np.arange(30), res.perm].sum()


def test_deterministic():
    C = np.round(np.random.default_rng(3).standard_normal((40, 40)), 1)  # many ties
    a, b = lap_solve(C, "max"), lap_solve(C.copy(), "max")
    np.testing.assert_array_equal(a.perm, b.perm)


@pytest.mark.parametrize("n", [256, 400])
@pytest.mark.parametrize("direction", ["min", "max"])
def test_network_simplex_agrees_with_scipy(n, direction):
    rng = np.random.default_rng(n)
    # low-rank cost, the shape produced by cut generation
    X, Y = rng.standard_normal((3, n)), rng.standard_normal((3, n))
    C = X.T @ rng.standard_normal((3, 3)) @ Y + rng.standard_normal((n, n))
    a = lap_solve(C, direction, backend="network_simplex")
    b = lap_solve(C, direction, backend="scipy")
    assert sorted(a.perm) == list(range(n))
    assert a.value == pytest.approx(b.value, rel=1e-12, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30), direction=st.sampled_from(["min", "max"]))
def test_beats_random_permutations(seed, n, direction):
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((n, n))
    v = lap_solve(C, direction).value
    P = np.array([rng.permutation(n) for _ in range(1000)])
    others = C[np.arange(n)[None, :], P].sum(axis=1)
    if direction == "max":
        assert np.all(others <= v + 1e-12)
    else:
        assert np.all(others >= v - 1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7), a=st.floats(0.01, 100), b=st.floats(-100, 100))
def test_affine_rescaling_keeps_optimum(seed, n, a, b):
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((n, n))
    perm = lap_solve(a * C + b, "max").perm
    best = lap_enumerate(C, "max")[1]
    assert C[np.arange(n), perm].sum() == pytest.approx(best, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7), direction=st.sampled_from(["min", "max"]))
def test_rank_one_matches_enumeration(seed, n, direction):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal(n), rng.standard_normal(n)
    res = rank_one_assignment(u, v, direction)
    assert sorted(res.perm) == list(range(n))
    assert res.value == pytest.approx(lap_enumerate(np.outer(u, v), direction)[1], abs=1e-12)


def test_transport_bound_examples():
    inst = build_instance(PointCloud(np.array([[0.0, 1.0]])), PointCloud(np.array([[0.0, 2.0]])))
    coeff = 2 * np.outer(inst.X[0], inst.Y[0])
    assert transport_bound(inst, coeff, "max") == 4
    assert transport_bound(inst, coeff, "min") == 0
    assert transport_bound(inst, inst.L, "min") == pytest.approx(-16)
    assert transport_bound(inst, inst.L, "max") == pytest.approx(0)
    assert transport_bound(inst, np.ones((2, 2)), "min") == transport_bound(inst, np.ones((2, 2)), "max") == 2
    with pytest.raises(ValueError):
        transport_bound(inst, np.ones((3, 3)), "min")


def test_transport_bound_enumeration():
    rng = np.random.default_rng(9)
    inst = build_instance(PointCloud(rng.standard_normal((2, 5))), PointCloud(rng.standard_normal((2, 5))))
    perms = all_perms(5)
    vals = inst.L[np.arange(5)[None, :], perms].sum(axis=1)
    assert transport_bound(inst, inst.L, "min") == pytest.approx(vals.min())
    assert transport_bound(inst, inst.L, "max") == pytest.approx(vals.max())
