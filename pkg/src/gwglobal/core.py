"""Point clouds, the low-rank Gromov-Wasserstein instance and objective evaluators.

Couplings are accepted in two forms throughout the package:

* a 1-D integer array ``perm`` with ``perm[i] = j`` meaning point ``x_i`` is
  matched to ``y_j`` (the permutation matrix has ``G[i, perm[i]] = 1``);
* a dense ``(n, n)`` doubly stochastic matrix.

Marginals are all-ones vectors, so a permutation matrix is a vertex of the
Birkhoff polytope and its objective equals the double-sum GW discrepancy

    0.5 * sum_{i,i',j,j'} (|x_i - x_i'|^2 - |y_j - y_j'|^2)^2 G[i,j] G[i',j'].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

DEFAULT_DIM_MAX = 3


class SizeMismatchError(ValueError):
    """The two clouds (or a cloud and a coupling) have different cardinality."""


class DimensionError(ValueError):
    """Ambient dimension outside the supported range."""


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``n`` points in R^dim stored column-wise as a ``(dim, n)`` array."""

    coords: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=float, copy=True)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise DimensionError(f"coords must be a non-empty (dim, n) array, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("point cloud contains non-finite coordinates")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_points(cls, points, meta=None) -> "PointCloud":
        """Build from an ``(n, dim)`` array of row points."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(pts.T, meta=dict(meta or {}))

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def count(self) -> int:
        return self.coords.shape[1]

    @property
    def points(self) -> np.ndarray:
        """``(n, dim)`` view with one point per row."""
        return self.coords.T

    def centered(self) -> "PointCloud":
        return PointCloud(self.coords - self.coords.mean(axis=1, keepdims=True), meta=dict(self.meta))

    def transformed(self, R, t=None) -> "PointCloud":
        """Return ``R @ X + t``; ``R`` may change the dimension."""
        R = np.asarray(R, dtype=float)
        out = R @ self.coords
        if t is not None:
            out = out + np.asarray(t, dtype=float).reshape(-1, 1)
        return PointCloud(out, meta=dict(self.meta))


def squared_norms(c: PointCloud) -> np.ndarray:
    return np.einsum("ij,ij->j", c.coords, c.coords)


def distance_matrix(c: PointCloud) -> np.ndarray:
    """Squared Euclidean distance matrix, equal to ``1 m^T - 2 X^T X + m 1^T``.

    Computed from coordinate differences, which avoids the cancellation of the
    expanded form for clouds far from the origin.
    """
    return cdist(c.points, c.points, "sqeuclidean")


@dataclass(frozen=True, eq=False)
class GWInstance:
    """A matched pair of clouds with the precomputed low-rank data.

    ``L = 2n m_x m_y^T - 4 m_x 1^T Y^T Y - 4 X^T X 1 m_y^T`` and
    ``c0 = (<C_x, C_x> + <C_y, C_y> - 4 (1^T m_y)(1^T m_x)) / 2``.
    """

    x: PointCloud
    y: PointCloud
    m_x: np.ndarray
    m_y: np.ndarray
    L: np.ndarray
    c0: float
    norm_cx: float
    norm_cy: float

    @property
    def n(self) -> int:
        return self.x.count

    @property
    def X(self) -> np.ndarray:
        return self.x.coords

    @property
    def Y(self) -> np.ndarray:
        return self.y.coords

    @property
    def shape(self) -> tuple[int, int]:
        return self.x.dim, self.y.dim

    @property
    def r(self) -> int:
        """Dimension of the projected ``(w, W)`` space."""
        return self.x.dim * self.y.dim + 1

    @property
    def scale(self) -> float:
        """Magnitude of the constant part of the objective; used to scale tolerances."""
        return 0.5 * (self.norm_cx + self.norm_cy)


def build_instance(x: PointCloud, y: PointCloud, *, dim_max: int = DEFAULT_DIM_MAX,
                   center: bool = False) -> GWInstance:
    """Precompute ``m_x``, ``m_y``, ``L`` and ``c0`` for the pair ``(x, y)``.

    ``center=True`` translates both clouds to zero mean first.  The GW value is
    translation invariant, and centering reduces cancellation in the low-rank
    objective.
    """
    if x.count != y.count:
        raise SizeMismatchError(f"clouds have different sizes: {x.count} != {y.count}")
    for c in (x, y):
        if not 1 <= c.dim <= dim_max:
            raise DimensionError(f"dimension {c.dim} outside [1, {dim_max}]")
    if center:
        x, y = x.centered(), y.centered()
    n = x.count
    X, Y = x.coords, y.coords
    m_x, m_y = squared_norms(x), squared_norms(y)
    # 1^T Y^T Y as a row vector and X^T X 1 as a column vector
    yty1 = Y.T @ Y.sum(axis=1)
    xtx1 = X.T @ X.sum(axis=1)
    L = 2.0 * n * np.outer(m_x, m_y) - 4.0 * np.outer(m_x, yty1) - 4.0 * np.outer(xtx1, m_y)
    Cx, Cy = distance_matrix(x), distance_matrix(y)
    norm_cx = float(np.vdot(Cx, Cx))
    norm_cy = float(np.vdot(Cy, Cy))
    c0 = 0.5 * (norm_cx + norm_cy - 4.0 * m_y.sum() * m_x.sum())
    for a in (m_x, m_y, L):
        a.setflags(write=False)
    return GWInstance(x=x, y=y, m_x=m_x, m_y=m_y, L=L, c0=float(c0), norm_cx=norm_cx, norm_cy=norm_cy)


# -- couplings ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Coupling:
    """Dense doubly stochastic ``n x n`` plan with unit marginals."""

    plan: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        p = np.asarray(self.plan, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise SizeMismatchError(f"coupling must be square, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("coupling contains non-finite entries")
        if p.min() < -self.tol or p.max() > 1 + self.tol:
            raise ValueError("coupling entries outside [0, 1]")
        if (np.abs(p.sum(axis=0) - 1).max() > self.tol
                or np.abs(p.sum(axis=1) - 1).max() > self.tol):
            raise ValueError("coupling marginals are not all ones")
        object.__setattr__(self, "plan", p)

    @property
    def n(self) -> int:
        return self.plan.shape[0]

    @classmethod
    def from_perm(cls, perm) -> "Coupling":
        return cls(perm_matrix(perm))


def perm_matrix(perm) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.intp)
    G = np.zeros((perm.size, perm.size))
    G[np.arange(perm.size), perm] = 1.0
    return G


def is_permutation(perm, n: int | None = None) -> bool:
    perm = np.asarray(perm)
    if perm.ndim != 1 or (n is not None and perm.size != n):
        return False
    return bool(np.array_equal(np.sort(perm), np.arange(perm.size)))


def _as_plan(g, n: int):
    """Return ``(perm, None)`` for permutations or ``(None, dense)`` otherwise."""
    if isinstance(g, Coupling):
        g = g.plan
    a = np.asarray(g)
    if a.ndim == 1:
        if a.size != n:
            raise SizeMismatchError(f"permutation of length {a.size} for n={n}")
        if not is_permutation(a):
            raise ValueError("not a permutation")
        return a.astype(np.intp), None
    if a.shape != (n, n):
        raise SizeMismatchError(f"coupling of shape {a.shape} for n={n}")
    return None, a.astype(float)


def project(inst: GWInstance, g) -> tuple[float, np.ndarray]:
    """Image ``(w, W) = (<L, G>, 2 X G Y^T)`` of a coupling."""
    perm, G = _as_plan(g, inst.n)
    if perm is not None:
        W = 2.0 * inst.X @ inst.Y[:, perm].T
        w = float(inst.L[np.arange(inst.n), perm].sum())
    else:
        W = 2.0 * inst.X @ G @ inst.Y.T
        w = float(np.vdot(inst.L, G))
    return w, W


def pack(w: float, W: np.ndarray) -> np.ndarray:
    """Pack ``(w, W)`` as ``(w, W[0,0], W[0,1], ...)`` (row-major ``W``)."""
    return np.concatenate(([w], np.asarray(W, dtype=float).ravel()))


def unpack(x: np.ndarray, shape: tuple[int, int]) -> tuple[float, np.ndarray]:
    x = np.asarray(x, dtype=float)
    return float(x[0]), x[1:].reshape(shape)


def lowrank_objective(inst: GWInstance, pts: np.ndarray) -> np.ndarray:
    """Concave objective ``-|W|_F^2 - w + c0`` on packed points, shape ``(k, r)`` or ``(r,)``."""
    pts = np.asarray(pts, dtype=float)
    return -np.sum(pts[..., 1:] ** 2, axis=-1) - pts[..., 0] + inst.c0


def gw_value_lowrank(inst: GWInstance, g) -> float:
    """``-|2 X G Y^T|_F^2 - <L, G> + c0`` without forming the distance matrices."""
    w, W = project(inst, g)
    return float(-np.vdot(W, W) - w + inst.c0)


def _cross_term(inst: GWInstance, g, Cx=None, Cy=None) -> float:
    """``<C_x G, G C_y>``."""
    Cx = distance_matrix(inst.x) if Cx is None else Cx
    Cy = distance_matrix(inst.y) if Cy is None else Cy
    perm, G = _as_plan(g, inst.n)
    if perm is not None:
        return float(np.vdot(Cx, Cy[np.ix_(perm, perm)]))
    return float(np.vdot(Cx @ G, G @ Cy))


def gw_value_quadratic(inst: GWInstance, g) -> float:
    """Koopmans-Beckmann form ``-<C_x G, G C_y> + (<C_x,C_x> + <C_y,C_y>)/2``."""
    return -_cross_term(inst, g) + inst.scale


def verify_identity(inst: GWInstance, g) -> float:
    """Absolute residual of ``<C_x G, G C_y> = |2XGY^T|^2 + <L,G> + 2 (1^T m_y)(1^T m_x)``."""
    lhs = _cross_term(inst, g)
    w, W = project(inst, g)
    rhs = float(np.vdot(W, W)) + w + 2.0 * inst.m_y.sum() * inst.m_x.sum()
    return abs(lhs - rhs)


def identity_lhs(inst: GWInstance, g) -> float:
    """Left side of the identity checked by :func:`verify_identity`."""
    return _cross_term(inst, g)
