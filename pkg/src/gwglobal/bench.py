"""Experiment drivers: benchmark suites, pairwise distance matrices, landmarks.

Every run is identified by a cell ``(type, n, lx, ly, eps)``, a method and a
seed; the clouds are regenerated from those, so a stored run can be replayed.
"""

from __future__ import annotations

import csv
import json
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy

from .baselines import brute_force, multi_start
from .core import GWInstance, PointCloud, SizeMismatchError, build_instance, gw_value_lowrank
from .generators import instance_pair
from .io import SCHEMA_VERSION, fmt_float
from .solver import SolverConfig, solve

METHODS = ("global", "local", "brute")
RESULT_COLUMNS = ("type", "n", "lx", "ly", "eps", "method", "seed", "value", "lower",
                  "time_ms", "iters", "status")
DEFAULT_REPEATS = 5
DEFAULT_TIME_LIMIT = 600.0
DEFAULT_LOCAL_STARTS = 10


@dataclass
class BenchmarkRun:
    type: str
    n: int
    lx: int
    ly: int
    eps: float
    method: str
    seed: int
    value: float = math.nan
    lower: float = math.nan
    time_ms: float = 0.0
    iters: int = 0
    status: str = ""
    perm: list[int] | None = None

    @property
    def key(self) -> tuple:
        return (self.type, self.n, self.lx, self.ly, self.eps, self.method, self.seed)

    @property
    def ok(self) -> bool:
        return not self.status.startswith("error")

    def instance(self) -> GWInstance:
        x, y = instance_pair(self.type, self.n, (self.lx, self.ly), self.seed)
        return build_instance(x, y)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkRun":
        return cls(**d)


def environment() -> dict:
    return {"python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "platform": platform.platform()}


@dataclass(frozen=True)
class Cell:
    type: str
    n: int
    lx: int
    ly: int
    eps: float = 1e-8
    methods: tuple[str, ...] = ("global",)
    repeats: int = DEFAULT_REPEATS

    @classmethod
    def from_dict(cls, d: dict, defaults: dict | None = None) -> "Cell":
        d = {**(defaults or {}), **d}
        dims = d.get("dims", (d.get("lx", 2), d.get("ly", 2)))
        methods = tuple(d.get("methods", ("global",)))
        bad = [m for m in methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; expected a subset of {METHODS}")
        return cls(type=d["type"], n=int(d["n"]), lx=int(dims[0]), ly=int(dims[1]),
                   eps=float(d.get("eps", 1e-8)), methods=methods,
                   repeats=int(d.get("repeats", DEFAULT_REPEATS)))


@dataclass
class SuiteConfig:
    cells: list[Cell] = field(default_factory=list)
    seed: int = 0
    time_limit: float | None = DEFAULT_TIME_LIMIT
    local_starts: int = DEFAULT_LOCAL_STARTS
    solver: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteConfig":
        known = {"cells", "seed", "time_limit", "local_starts", "solver", "repeats", "methods", "eps"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown suite options: {sorted(unknown)}")
        defaults = {k: d[k] for k in ("repeats", "methods", "eps") if k in d}
        return cls(cells=[Cell.from_dict(c, defaults) for c in d.get("cells", [])],
                   seed=int(d.get("seed", 0)), time_limit=d.get("time_limit", DEFAULT_TIME_LIMIT),
                   local_starts=int(d.get("local_starts", DEFAULT_LOCAL_STARTS)),
                   solver=dict(d.get("solver", {})))

    def solver_config(self, eps: float) -> SolverConfig:
        opts = {"time_limit": self.time_limit, **self.solver, "epsilon": eps}
        return SolverConfig.from_dict(opts)

    def tasks(self) -> list[tuple[Cell, str, int]]:
        return [(c, m, self.seed + k) for c in self.cells for m in c.methods for k in range(c.repeats)]


def run_method(inst: GWInstance, method: str, *, cfg: SolverConfig | None = None,
               local_starts: int = DEFAULT_LOCAL_STARTS, seed: int = 0) -> dict:
    """One solve; returns value, lower, iters, status, perm and elapsed milliseconds."""
    t0 = time.perf_counter()
    if method == "global":
        res = solve(inst, cfg)
        out = {"value": res.value, "lower": res.lower, "iters": res.iterations,
               "status": res.status, "perm": res.best_perm.tolist()}
    elif method == "local":
        rep = multi_start(inst, local_starts, seed=seed,
                          time_limit=None if cfg is None else cfg.time_limit)
        out = {"value": rep.best_value, "lower": math.nan, "iters": rep.n_starts,
               "status": "ok", "perm": rep.best_perm.tolist()}
    elif method == "brute":
        perm, value = brute_force(inst)
        out = {"value": value, "lower": value, "iters": math.factorial(inst.n),
               "status": "ok", "perm": perm.tolist()}
    else:
        raise ValueError(f"unknown method {method!r}")
    out["time_ms"] = 1e3 * (time.perf_counter() - t0)
    return out


def _run_task(args) -> BenchmarkRun:
    cell, method, seed, suite = args
    run = BenchmarkRun(cell.type, cell.n, cell.lx, cell.ly, cell.eps, method, seed)
    try:
        out = run_method(run.instance(), method, cfg=suite.solver_config(cell.eps),
                         local_starts=suite.local_starts, seed=seed)
    except Exception as exc:  # recorded, the suite continues
        run.status = f"error: {exc}"
        return run
    for k, v in out.items():
        setattr(run, k, v)
    return run


def _pool_map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def bench_suite(config, workers: int = 1) -> list[BenchmarkRun]:
    """Run every (cell, method, repeat) of a suite; results sorted by run key."""
    suite = config if isinstance(config, SuiteConfig) else SuiteConfig.from_dict(config)
    runs = _pool_map(_run_task, [(c, m, s, suite) for c, m, s in suite.tasks()], workers)
    return sorted(runs, key=lambda r: r.key)


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def write_results_csv(runs, path, include_time: bool = True) -> None:
    cols = [c for c in RESULT_COLUMNS if include_time or c != "time_ms"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for run in runs:
            w.writerow([_csv_cell(getattr(run, c)) for c in cols])


def read_results_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_results_json(runs, path, config: dict | None = None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "environment": environment(),
           "config": config, "runs": [r.to_dict() for r in runs]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def read_results_json(path) -> list[BenchmarkRun]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return [BenchmarkRun.from_dict(d) for d in doc["runs"]]


def replay(run: BenchmarkRun) -> float:
    """GW value of the stored permutation, recomputed from the regenerated clouds."""
    if run.perm is None:
        raise ValueError("run has no stored permutation")
    return gw_value_lowrank(run.instance(), np.asarray(run.perm, dtype=np.intp))


def summarize(runs) -> list[dict]:
    """Mean, min and max time per (cell, method), with status counts."""
    groups: dict[tuple, list[BenchmarkRun]] = {}
    for r in runs:
        groups.setdefault(r.key[:-1], []).append(r)
    rows = []
    for key in sorted(groups):
        rs = groups[key]
        t = np.array([r.time_ms for r in rs])
        statuses = sorted({r.status for r in rs})
        rows.append({**dict(zip(RESULT_COLUMNS[:6], key)), "repeats": len(rs),
                     "mean_ms": float(t.mean()), "min_ms": float(t.min()), "max_ms": float(t.max()),
                     "statuses": ";".join(statuses)})
    return rows


def _check_same_size(clouds) -> None:
    sizes = {c.count for c in clouds}
    if len(sizes) > 1:
        raise SizeMismatchError(f"clouds have different sizes {sorted(sizes)}")


def _pair_task(args):
    x, y, method, cfg, local_starts, seed = args
    try:
        out = run_method(build_instance(x, y), method, cfg=cfg, local_starts=local_starts, seed=seed)
    except Exception as exc:
        return math.nan, f"error: {exc}"
    return out["value"], out["status"]


def pairwise_matrix(clouds: list[PointCloud], method: str = "global", config: SolverConfig | None = None,
                    *, local_starts: int = DEFAULT_LOCAL_STARTS, seed: int = 0,
                    workers: int = 1) -> tuple[np.ndarray, list[list[str]]]:
    """Symmetric GW distance matrix and per-entry statuses.

    Each unordered pair is solved once. Failed pairs are NaN with an
    ``error: ...`` status.
    """
    _check_same_size(clouds)
    k = len(clouds)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    tasks = [(clouds[i], clouds[j], method, config, local_starts, seed + p) for p, (i, j) in enumerate(pairs)]
    out = _pool_map(_pair_task, tasks, workers)
    D = np.zeros((k, k))
    status = [["diagonal" if i == j else "" for j in range(k)] for i in range(k)]
    for (i, j), (value, st) in zip(pairs, out):
        D[i, j] = D[j, i] = value
        status[i][j] = status[j][i] = st
    return D, status


@dataclass
class LandmarkResult:
    indices: list[int]
    features: np.ndarray  # features[i, j] = d(cloud i, landmark j)
    radii: list[float]  # cover radius after each selection


def greedy_subset(clouds: list[PointCloud], k: int, method: str = "global", config: SolverConfig | None = None,
                  *, first: int | None = 0, seed: int = 0, distance=None) -> LandmarkResult:
    """Greedy max-min landmark selection under the GW distance.

    ``first=None`` draws the first landmark from ``seed``.  ``distance(i, j)``
    overrides the solver, e.g. with a precomputed matrix.  Ties go to the
    lowest index.
    """
    _check_same_size(clouds)
    N = len(clouds)
    if not 1 <= k <= N:
        raise ValueError(f"k must be in 1..{N}, got {k}")
    if first is None:
        first = int(np.random.default_rng(seed).integers(N))
    if distance is None:
        def distance(i, j):
            if i == j:
                return 0.0
            return run_method(build_instance(clouds[i], clouds[j]), method, cfg=config, seed=seed)["value"]

    chosen = [first]
    cols = [np.array([distance(i, first) for i in range(N)])]
    nearest = cols[0].copy()
    radii = [float(nearest.max())]
    while len(chosen) < k:
        cand = nearest.copy()
        cand[chosen] = -np.inf
        nxt = int(np.argmax(cand))
        chosen.append(nxt)
        col = np.array([distance(i, nxt) for i in range(N)])
        cols.append(col)
        nearest = np.minimum(nearest, col)
        radii.append(float(nearest.max()))
    return LandmarkResult(indices=chosen, features=np.stack(cols, axis=1), radii=radii)
