import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwglobal.core import (
    Coupling,
    DimensionError,
    PointCloud,
    SizeMismatchError,
    build_instance,
    distance_matrix,
    gw_value_lowrank,
    gw_value_quadratic,
    identity_lhs,
    project,
    squared_norms,
    verify_identity,
)
from oracles import all_perms, gw_double_sum, pairwise_sq_loop, random_rotation


def cloud(*rows):
    return PointCloud(np.array(rows, dtype=float))


def random_instance(rng, n, lx, ly):
    return build_instance(PointCloud(rng.standard_normal((lx, n))), PointCloud(rng.standard_normal((ly, n))))


def birkhoff_mixture(rng, n, k=5):
    w = rng.dirichlet(np.ones(k))
    G = np.zeros((n, n))
    for wi in w:
        G[np.arange(n), rng.permutation(n)] += wi
    return G


# -- build_instance -------------------------------------------------------------

def test_two_point_unit_clouds():
    inst = build_instance(cloud([0, 1]), cloud([0, 1]))
    np.testing.assert_array_equal(inst.m_x, [0, 1])
    np.testing.assert_array_equal(inst.m_y, [0, 1])
    np.testing.assert_allclose(inst.L, [[0, 0], [0, -4]], atol=1e-15)
    assert inst.c0 == pytest.approx(0.0, abs=1e-15)


def test_single_point_at_origin():
    inst = build_instance(cloud([0.0]), cloud([0.0]))
    np.testing.assert_array_equal(inst.L, [[0.0]])
    assert inst.c0 == 0.0


def test_two_point_scaled_pair():
    inst = build_instance(cloud([0, 1]), cloud([0, 2]))
    np.testing.assert_allclose(inst.L, [[0, 0], [0, -16]], atol=1e-14)
    assert inst.c0 == pytest.approx(9.0)
    for perm in ([0, 1], [1, 0]):
        assert verify_identity(inst, np.array(perm)) <= 1e-12


def test_instance_matches_formula_loops():
    rng = np.random.default_rng(3)
    X, Y = rng.standard_normal((2, 6)), rng.standard_normal((3, 6))
    inst = build_instance(PointCloud(X), PointCloud(Y))
    n = 6
    mx = np.array([X[:, i] @ X[:, i] for i in range(n)])
    my = np.array([Y[:, j] @ Y[:, j] for j in range(n)])
    L = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            sy = sum(Y[:, j] @ Y[:, k] for k in range(n))
            sx = sum(X[:, i] @ X[:, k] for k in range(n))
            L[i, j] = 2 * n * mx[i] * my[j] - 4 * mx[i] * sy - 4 * sx * my[j]
    Cx, Cy = pairwise_sq_loop(X), pairwise_sq_loop(Y)
    c0 = ((Cx ** 2).sum() + (Cy ** 2).sum() - 4 * my.sum() * mx.sum()) / 2
    np.testing.assert_allclose(inst.L, L, rtol=1e-12, atol=1e-12)
    assert inst.c0 == pytest.approx(c0, rel=1e-12)
    np.testing.assert_array_equal(squared_norms(inst.x), inst.m_x)


def test_size_mismatch():
    with pytest.raises(SizeMismatchError):
        build_instance(cloud([0, 1]), cloud([0, 1, 2]))


def test_dimension_cap():
    x = PointCloud(np.zeros((4, 3)))
    with pytest.raises(DimensionError):
        build_instance(x, x)
    assert build_instance(x, x, dim_max=4).r == 17


def test_instance_is_read_only():
    inst = build_instance(cloud([0, 1]), cloud([0, 2]))
    with pytest.raises(ValueError):
        inst.L[0, 0] = 1.0


def test_point_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud(np.array([[0.0, np.nan]]))
    with pytest.raises(DimensionError):
        PointCloud(np.zeros((0, 3)))
    c = PointCloud.from_points([[0, 1], [2, 3], [4, 5]])
    assert (c.dim, c.count) == (2, 3)
    np.testing.assert_array_equal(c.coords, [[0, 2, 4], [1, 3, 5]])


# -- distance_matrix ------------------------------------------------------------

def test_distance_matrix_small():
    np.testing.assert_array_equal(distance_matrix(cloud([0, 1])), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(distance_matrix(cloud([0, 2])), [[0, 4], [4, 0]])


def test_distance_matrix_matches_loop():
    P = np.random.default_rng(0).standard_normal((2, 3))
    np.testing.assert_allclose(distance_matrix(PointCloud(P)), pairwise_sq_loop(P), rtol=1e-14, atol=1e-14)


def test_distance_matrix_expanded_form():
    P = np.random.default_rng(1).standard_normal((3, 7))
    m = (P ** 2).sum(axis=0)
    expanded = m[None, :] - 2 * P.T @ P + m[:, None]
    np.testing.assert_allclose(distance_matrix(PointCloud(P)), expanded, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12), dim=st.integers(1, 3), reflect=st.booleans())
def test_distance_matrix_rigid_invariance(seed, n, dim, reflect):
    rng = np.random.default_rng(seed)
    c = PointCloud(rng.standard_normal((dim, n)))
    D = distance_matrix(c)
    R = random_rotation(dim, rng, reflect=reflect)
    D2 = distance_matrix(c.transformed(R, rng.uniform(-5, 5, dim)))
    np.testing.assert_allclose(D2, D, atol=1e-10 * (1 + D.max()))
    assert np.all(D >= 0) and np.all(np.diag(D) == 0)
    np.testing.assert_array_equal(D, D.T)


# -- objective evaluators --------------------------------------------------------

def test_quadratic_identical_clouds_zero():
    x = PointCloud(np.random.default_rng(2).standard_normal((2, 5)))
    inst = build_instance(x, x)
    assert abs(gw_value_quadratic(inst, np.arange(5))) <= 1e-10 * inst.scale


def test_quadratic_two_point_pair():
    inst = build_instance(cloud([0, 1]), cloud([0, 2]))
    for perm in ([0, 1], [1, 0]):
        assert gw_value_quadratic(inst, np.array(perm)) == pytest.approx(9.0)
        assert gw_double_sum(inst.X, inst.Y, perm) == pytest.approx(9.0)


def test_quadratic_matches_double_sum_all_perms():
    rng = np.random.default_rng(4)
    inst = random_instance(rng, 4, 2, 2)
    for p in all_perms(4):
        ref = gw_double_sum(inst.X, inst.Y, p)
        assert gw_value_quadratic(inst, p) == pytest.approx(ref, rel=1e-10, abs=1e-10)


def test_lowrank_examples():
    inst = build_instance(cloud([0, 1]), cloud([0, 2]))
    w, W = project(inst, np.array([0, 1]))
    assert np.vdot(W, W) == pytest.approx(16.0) and w == pytest.approx(-16.0)
    assert gw_value_lowrank(inst, np.array([0, 1])) == pytest.approx(9.0)
    same = build_instance(cloud([0, 1]), cloud([0, 1]))
    w, W = project(same, np.array([1, 0]))
    assert np.all(W == 0) and w == 0
    assert gw_value_lowrank(same, np.array([1, 0])) == pytest.approx(0.0, abs=1e-15)


def test_dense_coupling_matches_permutation():
    rng = np.random.default_rng(5)
    inst = random_instance(rng, 6, 2, 3)
    p = rng.permutation(6)
    G = Coupling.from_perm(p)
    assert gw_value_lowrank(inst, G) == pytest.approx(gw_value_lowrank(inst, p), rel=1e-12)
    assert gw_value_quadratic(inst, G) == pytest.approx(gw_value_quadratic(inst, p), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8), lx=st.integers(1, 3), ly=st.integers(1, 3))
def test_reformulation_equivalence(seed, n, lx, ly):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, lx, ly)
    p = rng.permutation(n)
    ref = gw_double_sum(inst.X, inst.Y, p)
    tol = 1e-8 * (1 + abs(ref))
    assert abs(gw_value_lowrank(inst, p) - ref) <= tol
    assert abs(gw_value_quadratic(inst, p) - ref) <= tol
    assert ref >= -1e-9 * inst.scale


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), dim=st.integers(1, 3), reflect=st.booleans())
def test_isometry_optimum_is_identity(seed, n, dim, reflect):
    rng = np.random.default_rng(seed)
    x = PointCloud(rng.standard_normal((dim, n)))
    y = x.transformed(random_rotation(dim, rng, reflect), rng.uniform(-3, 3, dim))
    inst = build_instance(x, y)
    vals = [gw_value_quadratic(inst, p) for p in all_perms(n)]
    assert min(vals) >= -1e-9 * inst.scale
    assert abs(gw_value_quadratic(inst, np.arange(n))) <= 1e-9 * inst.scale


# -- verify_identity ----------------------------------------------------------

def test_identity_uniform_coupling():
    rng = np.random.default_rng(6)
    inst = random_instance(rng, 7, 2, 2)
    G = np.full((7, 7), 1 / 7)
    lhs = identity_lhs(inst, G)
    assert verify_identity(inst, G) <= 1e-8 * (1 + abs(lhs))


def test_identity_birkhoff_mixtures():
    rng = np.random.default_rng(7)
    inst = random_instance(rng, 5, 2, 3)
    worst = 0.0
    for _ in range(100):
        G = birkhoff_mixture(rng, 5)
        worst = max(worst, verify_identity(inst, G) / (1 + abs(identity_lhs(inst, G))))
    assert worst <= 1e-8


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 20), lx=st.integers(1, 3), ly=st.integers(1, 3))
def test_identity_property(seed, n, lx, ly):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, lx, ly)
    G = birkhoff_mixture(rng, n, k=3)
    assert verify_identity(inst, G) <= 1e-8 * (1 + abs(identity_lhs(inst, G)))


# -- Coupling -------------------------------------------------------------------

def test_coupling_validation():
    with pytest.raises(ValueError):
        Coupling(np.array([[0.5, 0.5], [0.5, 0.4]]))
    with pytest.raises(ValueError):
        Coupling(np.array([[1.5, -0.5], [-0.5, 1.5]]))
    with pytest.raises(SizeMismatchError):
        Coupling(np.ones((2, 3)) / 2)
    assert Coupling(np.eye(3)).n == 3


def test_bad_permutation_rejected():
    inst = build_instance(cloud([0, 1, 2]), cloud([0, 1, 2]))
    with pytest.raises(ValueError):
        gw_value_lowrank(inst, np.array([0, 0, 1]))
    with pytest.raises(SizeMismatchError):
        gw_value_lowrank(inst, np.array([0, 1]))
