"""Exact linear assignment over the Birkhoff polytope.

With unit marginals the transport LP ``max/min <C, G>`` over doubly stochastic
``G`` always has a permutation optimum, so an assignment solver is exact.
Small problems go to :func:`scipy.optimize.linear_sum_assignment` (a
Jonker-Volgenant shortest-augmenting-path solver).  From
``NETWORK_SIMPLEX_MIN_N`` points on, the network simplex of POT is used when
installed; on the low-rank cost matrices produced here it is several times
faster.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import linear_sum_assignment

Direction = Literal["min", "max"]

NETWORK_SIMPLEX_MIN_N = 256
_POT_BACKENDS = ("PYTORCH", "JAX", "CUPY", "TENSORFLOW")
_emd = None


def _network_simplex():
    """POT's exact EMD solver, or None when POT is unavailable."""
    global _emd
    if _emd is None:
        # POT probes every installed array framework on import; only numpy is needed
        for name in _POT_BACKENDS:
            os.environ.setdefault(f"POT_BACKEND_DISABLE_{name}", "1")
        try:
            from ot.lp import emd
        except ImportError:
            emd = False
        _emd = emd
    return _emd or None


def _perm_from_plan(G: np.ndarray) -> np.ndarray | None:
    perm = np.argmax(G, axis=1)
    n = len(perm)
    if not np.all(np.abs(G[np.arange(n), perm] - 1.0) <= 1e-9) or len(np.unique(perm)) != n:
        return None
    return perm.astype(np.intp)


@dataclass(frozen=True)
class AssignmentResult:
    perm: np.ndarray
    value: float
    direction: str


def lap_solve(C, direction: Direction = "min", backend: str = "auto") -> AssignmentResult:
    """Optimal permutation for ``min``/``max`` of ``sum_i C[i, perm[i]]``.

    Maximisation is solved as minimisation of ``-C``.  The result is
    deterministic for a given matrix.  ``backend`` is ``"auto"``, ``"scipy"``
    or ``"network_simplex"`` (falls back to scipy if POT is missing or its
    plan is not a permutation).
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"cost matrix must be square, got {C.shape}")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix contains non-finite entries")
    if direction not in ("min", "max"):
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")
    if backend not in ("auto", "scipy", "network_simplex"):
        raise ValueError(f"unknown backend {backend!r}")
    cost = -C if direction == "max" else C
    n = C.shape[0]
    perm = None
    if backend == "auto" and n >= NETWORK_SIMPLEX_MIN_N or backend == "network_simplex":
        emd = _network_simplex()
        if emd is not None:
            G, log = emd(np.ones(n), np.ones(n), np.ascontiguousarray(cost),
                         numItermax=max(100_000, 200 * n * n), log=True)
            if log.get("warning") is None:
                perm = _perm_from_plan(G)
    if perm is None:
        rows, cols = linear_sum_assignment(cost)
        perm = np.empty(n, dtype=np.intp)
        perm[rows] = cols
    value = float(C[np.arange(C.shape[0]), perm].sum())
    return AssignmentResult(perm=perm, value=value, direction=direction)


def transport_bound(inst, coeff, direction: Direction) -> float:
    """Extreme value of ``<coeff, G>`` over the permutations of ``inst``."""
    coeff = np.asarray(coeff, dtype=float)
    if coeff.shape != (inst.n, inst.n):
        raise ValueError(f"coefficient matrix of shape {coeff.shape} for n={inst.n}")
    return lap_solve(coeff, direction).value


def rank_one_assignment(u, v, direction: Direction = "min") -> AssignmentResult:
    """Extreme assignment for the rank-one cost ``C[i, j] = u[i] * v[j]``.

    By the rearrangement inequality the maximum pairs ``u`` and ``v`` in the
    same sorted order and the minimum in opposite orders.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("u and v must be vectors of equal length")
    if direction not in ("min", "max"):
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")
    iu = np.argsort(u, kind="stable")
    iv = np.argsort(v, kind="stable")
    if direction == "min":
        iv = iv[::-1]
    perm = np.empty(len(u), dtype=np.intp)
    perm[iu] = iv
    return AssignmentResult(perm=perm, value=float(np.dot(u, v[perm])), direction=direction)
