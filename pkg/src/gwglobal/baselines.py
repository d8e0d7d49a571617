"""Reference methods: exhaustive enumeration and multi-start local search."""

from __future__ import annotations

import csv
import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .assignment import lap_solve
from .core import GWInstance, distance_matrix, gw_value_lowrank, is_permutation
from .io import fmt_float

BRUTE_FORCE_MAX_N = 10


def _perm_chunks(n: int, size: int):
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def brute_force(inst: GWInstance, *, max_n: int = BRUTE_FORCE_MAX_N) -> tuple[np.ndarray, float]:
    """Exact minimum of the quadratic GW objective over all ``n!`` permutations.

    Ties (within 1e-12 relative) go to the lexicographically first permutation.
    """
    n = inst.n
    if n > max_n:
        raise ValueError(f"brute force limited to n <= {max_n}, got n={n}")
    Cx, Cy = distance_matrix(inst.x), distance_matrix(inst.y)
    const = inst.scale
    chunk = max(1, 2_000_000 // (n * n))
    vals, perms = [], []
    for P in _perm_chunks(n, chunk):
        cross = np.einsum("ij,pij->p", Cx, Cy[P[:, :, None], P[:, None, :]])
        vals.append(const - cross)
        perms.append(P)
    vals = np.concatenate(vals)
    best = vals.min()
    i = int(np.flatnonzero(vals <= best + 1e-12 * (1.0 + abs(best)))[0])
    return np.concatenate(perms)[i], float(vals[i])


@dataclass
class LocalSearchResult:
    perm: np.ndarray
    value: float
    iters: int
    objective_trace: list[float] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (perm, value, iters)
        return iter((self.perm, self.value, self.iters))


def ascent_objective(inst: GWInstance, g) -> float:
    """``g(G) = |2 X G Y^T|^2 + <L, G>``; maximising it minimises the GW value."""
    return inst.c0 - gw_value_lowrank(inst, g)


def linearization(inst: GWInstance, g) -> np.ndarray:
    """Gradient ``8 X^T X G Y^T Y + L`` of :func:`ascent_objective`."""
    g = np.asarray(g)
    if g.ndim == 1:
        XG = inst.Y[:, g].T  # G Y^T for a permutation
    else:
        XG = g @ inst.Y.T
    W = 2.0 * inst.X @ XG
    return 4.0 * (inst.X.T @ W) @ inst.Y + inst.L


def local_search(inst: GWInstance, start, max_iters: int = 1000) -> LocalSearchResult:
    """Conditional-gradient ascent with full steps over permutations.

    Each step jumps to the permutation maximising the linearisation at the
    current point; the run stops at a fixed point, when the objective stops
    increasing, or after ``max_iters`` steps.
    """
    start = np.asarray(start)
    if start.ndim == 1:
        if not is_permutation(start, inst.n):
            raise ValueError("start is not a permutation of the right size")
    elif start.shape != (inst.n, inst.n):
        raise ValueError(f"start coupling has shape {start.shape} for n={inst.n}")
    current = start
    g_cur = ascent_objective(inst, current)
    history = [g_cur]
    perm = None
    it = 0
    while it < max_iters:
        it += 1
        nxt = lap_solve(linearization(inst, current), "max").perm
        g_next = ascent_objective(inst, nxt)
        history.append(g_next)
        if perm is not None and (np.array_equal(nxt, perm) or g_next <= g_cur + 1e-12 * (1 + abs(g_cur))):
            break
        perm, current, g_cur = nxt, nxt, g_next
    return LocalSearchResult(perm=perm, value=gw_value_lowrank(inst, perm), iters=it, objective_trace=history)


@dataclass
class LocalSearchReport:
    best_perm: np.ndarray
    best_value: float
    n_starts: int
    values: list[float]
    iterations: list[int]
    success: bool | None = None
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "best_perm": self.best_perm.tolist(),
            "best_value": self.best_value,
            "n_starts": self.n_starts,
            "values": self.values,
            "iterations": self.iterations,
            "success": self.success,
            "elapsed": self.elapsed,
        }

    def write_csv(self, path) -> None:
        """One summary row: exec time, initializations used, success flag, best value."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("exec_time_s", "initializations", "success", "best_value"))
            w.writerow((fmt_float(self.elapsed), self.n_starts,
                        "" if self.success is None else int(self.success), fmt_float(self.best_value)))


def relative_error(value: float, reference: float, delta: float = 1e-12) -> float:
    return (value - reference) / max(abs(reference), delta)


def multi_start(inst: GWInstance, n_starts: int, seed: int = 0, stop_value: float | None = None,
                tol: float = 1e-6, max_iters: int = 1000, time_limit: float | None = None) -> LocalSearchReport:
    """Local search from ``n_starts`` uniformly random permutations.

    With ``stop_value`` (an oracle optimum) the run ends as soon as a start
    reaches relative error ``<= tol``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    best_perm, best_value = None, np.inf
    values, iters = [], []
    success = None if stop_value is None else False
    for _ in range(n_starts):
        res = local_search(inst, rng.permutation(inst.n), max_iters=max_iters)
        values.append(res.value)
        iters.append(res.iters)
        if res.value < best_value:
            best_perm, best_value = res.perm, res.value
        if stop_value is not None and relative_error(best_value, stop_value) <= tol:
            success = True
            break
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            break
    return LocalSearchReport(best_perm=best_perm, best_value=float(best_value), n_starts=len(values),
                             values=values, iterations=iters, success=success,
                             elapsed=time.perf_counter() - t0)

