"""Certified global solver: cutting planes in the projected ``(w, W)`` space.

Each iteration minimises the concave objective ``-|W|^2 - w + c0`` over the
vertices of the current outer approximation (a lower bound), maximises the
gradient functional ``<4 X^T W_N Y + L, G>`` over permutations (an upper bound
candidate and a supporting hyperplane), and adds that hyperplane as a cut.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .assignment import lap_solve, rank_one_assignment
from .core import GWInstance, gw_value_lowrank, lowrank_objective, pack, project
from .vertex import (
    DEFAULT_R_CAP,
    DEFAULT_VERTEX_CAP,
    CoverExploded,
    HalfspaceCut,
    PolytopeCover,
    add_cut,
    init_box,
    min_concave_vertex,
)

log = logging.getLogger(__name__)

CONVERGED = "converged"
ITER_CAP = "iter_cap"
VERTEX_CAP = "vertex_cap"
STALLED = "stalled"
TIME_LIMIT = "time_limit"


@dataclass
class SolverConfig:
    epsilon: float = 1e-8
    gap_mode: str = "relative"
    max_iters: int = 10_000
    vertex_cap: int = DEFAULT_VERTEX_CAP
    r_cap: int = DEFAULT_R_CAP
    tol_eq: float = 1e-11
    tol_feas: float = 1e-11
    tol_dedupe: float = 1e-7
    tol_merge: float = 1e-12
    tol_marginal: float = 1e-9
    tol_box: float = 1e-6
    rel_delta: float = 1e-12
    max_stalls: int = 50
    time_limit: float | None = None
    warm_start: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.gap_mode not in ("absolute", "relative"):
            raise ValueError(f"gap_mode must be 'absolute' or 'relative', got {self.gap_mode!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "SolverConfig":
        return cls.from_dict(load_config_file(path).get("solver", {}))

    def to_dict(self) -> dict:
        return asdict(self)

    def relative_gap(self, upper: float, lower: float) -> float:
        gap = upper - lower
        if abs(upper) <= self.rel_delta:
            return gap
        return gap / abs(upper)

    def gap_closed(self, upper: float, lower: float) -> bool:
        if not math.isfinite(upper):
            return False
        if self.gap_mode == "absolute":
            return upper - lower <= self.epsilon
        return self.relative_gap(upper, lower) <= self.epsilon


def load_config_file(path) -> dict:
    """Read a JSON or TOML configuration file into a dict."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


@dataclass(frozen=True)
class IterRecord:
    iter: int
    lower: float
    upper: float
    gap: float
    rel_gap: float
    beta: float
    vertices: int
    constraints: int
    millis: float


@dataclass
class SolveTrace:
    records: list[IterRecord] = field(default_factory=list)
    status: str = ""

    CSV_COLUMNS = ("iter", "lower", "upper", "gap", "rel_gap", "beta", "vertices", "constraints", "millis")

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(rec, name) for rec in self.records], dtype=float)

    def to_rows(self) -> list[list]:
        return [[getattr(rec, c) for c in self.CSV_COLUMNS] for rec in self.records]

    def write_csv(self, path, include_time: bool = True) -> None:
        from .io import fmt_float

        cols = [c for c in self.CSV_COLUMNS if include_time or c != "millis"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for rec in self.records:
                row = []
                for c in cols:
                    v = getattr(rec, c)
                    row.append(v if isinstance(v, int) else fmt_float(v))
                w.writerow(row)

    def to_dict(self) -> dict:
        return {"status": self.status, "records": [asdict(r) for r in self.records]}


@dataclass
class SolveResult:
    best_perm: np.ndarray
    value: float
    lower: float
    trace: SolveTrace
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        return self.trace.status

    @property
    def converged(self) -> bool:
        return self.trace.status == CONVERGED

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def gap(self) -> float:
        return self.value - self.lower

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "value": self.value,
            "lower": self.lower,
            "iterations": self.iterations,
            "elapsed": self.elapsed,
            "best_perm": self.best_perm.tolist(),
            "trace": self.trace.to_dict(),
        }


def bounding_box(inst: GWInstance) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise extremes of ``(w, W)`` over all permutations.

    Packed like :func:`gwglobal.core.pack`: entry 0 is ``w = <L, G>``, then the
    entries of ``W = 2 X G Y^T`` in row-major order.  Uses ``2 r`` assignment
    solves; the ``W`` entries have rank-one coefficients ``2 x_i y_j^T`` and
    are solved by sorting.
    """
    lx, ly = inst.shape
    lo = np.empty(inst.r)
    hi = np.empty(inst.r)
    lo[0] = lap_solve(inst.L, "min").value
    hi[0] = lap_solve(inst.L, "max").value
    k = 1
    for i in range(lx):
        for j in range(ly):
            lo[k] = rank_one_assignment(2.0 * inst.X[i], inst.Y[j], "min").value
            hi[k] = rank_one_assignment(2.0 * inst.X[i], inst.Y[j], "max").value
            k += 1
    return lo, hi


def make_cut(inst: GWInstance, vtx) -> tuple[HalfspaceCut, np.ndarray]:
    """Supporting hyperplane of the feasible image with normal ``(1, 2 W_N)``.

    Returns the cut and the maximising permutation, whose image is tight.
    """
    vtx = np.asarray(vtx, dtype=float)
    W_N = vtx[1:].reshape(inst.shape)
    cost = 4.0 * (inst.X.T @ W_N) @ inst.Y + inst.L
    res = lap_solve(cost, "max")
    return HalfspaceCut(Z=2.0 * W_N, alpha=1.0, beta=res.value), res.perm


def _is_duplicate(cover: PolytopeCover, a: np.ndarray, beta: float, tol: float) -> bool:
    tol_a = tol * (1.0 + np.abs(a))
    close = np.all(np.abs(cover.A - a) <= tol_a, axis=1) & (np.abs(cover.b - beta) <= tol * (1 + abs(beta)))
    return bool(close.any())


def solve(inst: GWInstance, cfg: SolverConfig | None = None, *, initial_perm=None,
          on_cut=None) -> SolveResult:
    """Globally minimise the GW discrepancy of ``inst``.

    ``initial_perm`` (or ``cfg.warm_start``) only seeds the upper bound; the
    lower-bound certificate is unaffected.  Cap and stall conditions are
    reported through ``result.status`` rather than raised.  ``on_cut(it, cut,
    perm)`` is called with every generated cut and its maximising permutation.
    """
    cfg = cfg or SolverConfig()
    if inst.r > cfg.r_cap:
        raise ValueError(f"r = {inst.r} exceeds r_cap = {cfg.r_cap}")
    t0 = time.perf_counter()
    trace = SolveTrace()

    upper, best = math.inf, None
    if initial_perm is None and cfg.warm_start:
        from .baselines import local_search

        rng = np.random.default_rng(cfg.seed)
        initial_perm = local_search(inst, rng.permutation(inst.n)).perm
    if initial_perm is not None:
        best = np.asarray(initial_perm, dtype=np.intp)
        upper = gw_value_lowrank(inst, best)

    lo, hi = bounding_box(inst)
    cover = init_box(lo, hi, tol_box=cfg.tol_box, r_cap=cfg.r_cap, tol_eq=cfg.tol_eq,
                     tol_feas=cfg.tol_feas, tol_merge=cfg.tol_merge, vertex_cap=cfg.vertex_cap)

    def objective(pts):
        return lowrank_objective(inst, pts)

    lower = -math.inf
    stalls = 0
    status = ITER_CAP
    for it in range(1, cfg.max_iters + 1):
        _, vtx, fval = min_concave_vertex(cover, objective)
        lower = max(lower, fval)
        cut, perm = make_cut(inst, vtx)
        if on_cut is not None:
            on_cut(it, cut, perm)
        value = gw_value_lowrank(inst, perm)
        if value < upper:
            upper, best = value, perm
        trace.records.append(IterRecord(
            iter=it, lower=lower, upper=upper, gap=upper - lower,
            rel_gap=cfg.relative_gap(upper, lower), beta=cut.beta,
            vertices=cover.nv, constraints=cover.m,
            millis=1e3 * (time.perf_counter() - t0)))
        if cfg.gap_closed(upper, lower):
            status = CONVERGED
            break
        if cfg.time_limit is not None and time.perf_counter() - t0 > cfg.time_limit:
            status = TIME_LIMIT
            break
        a = cut.normal
        if _is_duplicate(cover, a, cut.beta, cfg.tol_dedupe):
            stalls += 1
        else:
            try:
                report = add_cut(cover, cut)
            except CoverExploded:
                status = VERTEX_CAP
                break
            stalls = 0 if report.binding else stalls + 1
        if stalls >= cfg.max_stalls:
            log.warning("aborting after %d stalled iterations (gap %.3g)", stalls, upper - lower)
            status = STALLED
            break
    trace.status = status
    return SolveResult(best_perm=np.asarray(best, dtype=np.intp), value=upper, lower=lower,
                       trace=trace, elapsed=time.perf_counter() - t0)


def image_point(inst: GWInstance, perm) -> np.ndarray:
    """Packed ``(w, W)`` image of a permutation."""
    w, W = project(inst, perm)
    return pack(w, W)
