"""Command-line front end.

Solver options are resolved as flags > config file > defaults.  Exit codes:
0 success, 2 partial failure (a run errored or did not converge), 1 invalid
invocation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import bench
from .core import build_instance
from .generators import GAUSSIAN, TYPES, GeneratorSpec, generate
from .io import fmt_float, read_cloud, write_cloud
from .solver import CONVERGED, SolverConfig, load_config_file, solve

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2

# flag dest -> SolverConfig field
SOLVER_FLAGS = {
    "epsilon": "epsilon", "gap_mode": "gap_mode", "max_iters": "max_iters",
    "vertex_cap": "vertex_cap", "r_cap": "r_cap", "time_limit": "time_limit",
    "warm_start": "warm_start", "seed": "seed",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_solver_flags(p):
    g = p.add_argument_group("solver options (override the config file)")
    g.add_argument("--config", help="JSON or TOML file with a [solver] section")
    g.add_argument("--epsilon", type=float, help="gap tolerance (default 1e-8)")
    g.add_argument("--gap-mode", choices=("absolute", "relative"), help="default relative")
    g.add_argument("--max-iters", type=int, help="iteration cap (default 10000)")
    g.add_argument("--vertex-cap", type=int, help="vertex cap of the cover (default 5000000)")
    g.add_argument("--r-cap", type=int, help="largest projected dimension accepted (default 10)")
    g.add_argument("--time-limit", type=float, help="wall-clock limit in seconds (default none)")
    g.add_argument("--warm-start", action="store_true", default=None,
                   help="seed the upper bound with one local-search run")
    g.add_argument("--seed", type=int, help="seed for warm start and local search (default 0)")


def solver_config(args) -> SolverConfig:
    opts = {}
    if getattr(args, "config", None):
        opts.update(load_config_file(args.config).get("solver", {}))
    for dest, name in SOLVER_FLAGS.items():
        v = getattr(args, dest, None)
        if v is not None:
            opts[name] = v
    return SolverConfig.from_dict(opts)


def _load_pair(args):
    x, y = read_cloud(args.x), read_cloud(args.y)
    return build_instance(x, y, dim_max=args.dim_max, center=args.center)


def _add_pair_args(p):
    p.add_argument("x", help="first cloud (.csv or .json)")
    p.add_argument("y", help="second cloud (.csv or .json)")
    p.add_argument("--dim-max", type=int, default=3, help="largest cloud dimension accepted (default 3)")
    p.add_argument("--center", action="store_true", help="translate both clouds to zero mean")


def cmd_gen(args) -> int:
    if args.cov is not None:
        spec = GeneratorSpec(GAUSSIAN, args.dim, args.n, args.seed, tuple(args.cov))
    else:
        spec = GeneratorSpec.named(args.type, args.dim, args.n, args.seed)
    write_cloud(generate(spec), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load_pair(args)
    cfg = solver_config(args)
    if args.method != "global":
        out = bench.run_method(inst, args.method, cfg=cfg, local_starts=args.starts, seed=cfg.seed)
        _emit(out, args.output)
        return EXIT_OK
    res = solve(inst, cfg)
    if args.trace:
        res.trace.write_csv(args.trace)
    doc = res.to_dict()
    if not args.full_trace:
        doc.pop("trace")
    _emit(doc, args.output)
    return EXIT_OK if res.status == CONVERGED else EXIT_PARTIAL


def _emit(doc, path):
    text = json.dumps(doc, indent=1)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_trace(args) -> int:
    res = solve(_load_pair(args), solver_config(args))
    cols = ("iter", "lower", "upper", "gap", "vertices", "millis")
    if args.output.lower().endswith(".json"):
        with open(args.output, "w") as fh:
            json.dump({"status": res.status, "columns": cols,
                       "rows": [[getattr(r, c) for c in cols] for r in res.trace.records]}, fh, indent=1)
    else:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in res.trace.records:
                w.writerow([fmt_float(getattr(r, c)) if isinstance(getattr(r, c), float) else getattr(r, c)
                            for c in cols])
    return EXIT_OK if res.status == CONVERGED else EXIT_PARTIAL


def cmd_bench(args) -> int:
    doc = load_config_file(args.suite)
    if "suite" in doc:
        doc = doc["suite"]
    suite = bench.SuiteConfig.from_dict(doc)
    runs = bench.bench_suite(suite, workers=args.workers)
    bench.write_results_csv(runs, args.out_csv, include_time=not args.no_time)
    if args.out_json:
        bench.write_results_json(runs, args.out_json, config=doc)
    bad = [r for r in runs if not r.ok or r.status not in (CONVERGED, "ok")]
    for r in bad:
        logging.warning("run %s: %s", r.key, r.status)
    return EXIT_PARTIAL if bad else EXIT_OK


def _write_matrix(path, M):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in M:
            w.writerow([fmt_float(v) for v in row])


def cmd_pairwise(args) -> int:
    clouds = [read_cloud(p) for p in args.clouds]
    D, status = bench.pairwise_matrix(clouds, args.method, solver_config(args), local_starts=args.starts,
                                      seed=args.seed or 0, workers=args.workers)
    _write_matrix(args.output, D)
    if args.status:
        with open(args.status, "w") as fh:
            json.dump(status, fh, indent=1)
    failed = np.isnan(D).any() or any(s not in (CONVERGED, "ok", "diagonal") for row in status for s in row)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_landmarks(args) -> int:
    clouds = [read_cloud(p) for p in args.clouds]
    first = None if args.random_first else args.first
    res = bench.greedy_subset(clouds, args.k, args.method, solver_config(args), first=first,
                              seed=args.seed or 0)
    doc = {"indices": res.indices, "radii": res.radii, "features": res.features.tolist()}
    _emit(doc, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gwglobal", description="Globally optimal Gromov-Wasserstein matching of point clouds.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic point cloud")
    g.add_argument("--type", choices=TYPES, default="U", help="named family (default U)")
    g.add_argument("--cov", type=float, nargs="+", help="explicit gaussian covariance diagonal")
    g.add_argument("--dim", type=int, default=2, help="default 2")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0, help="default 0")
    g.add_argument("-o", "--output", required=True, help="output .csv or .json")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="GW discrepancy between two clouds")
    _add_pair_args(s)
    s.add_argument("--method", choices=bench.METHODS, default="global", help="default global")
    s.add_argument("--starts", type=int, default=bench.DEFAULT_LOCAL_STARTS,
                   help=f"local-search starts (default {bench.DEFAULT_LOCAL_STARTS})")
    s.add_argument("--trace", help="write the iteration trace as CSV")
    s.add_argument("--full-trace", action="store_true", help="include the trace in the JSON result")
    s.add_argument("-o", "--output", help="result JSON (default stdout)")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("trace-plot-data", help="solve and write the bound trace for plotting")
    _add_pair_args(t)
    t.add_argument("-o", "--output", required=True, help="output .csv or .json")
    _add_solver_flags(t)
    t.set_defaults(func=cmd_trace)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("suite", help="suite config (JSON or TOML)")
    b.add_argument("--out-csv", default="results.csv", help="default results.csv")
    b.add_argument("--out-json", help="also write runs with stored permutations as JSON")
    b.add_argument("--no-time", action="store_true", help="omit the time_ms column")
    b.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    b.set_defaults(func=cmd_bench)

    for name, fn, hlp in (("pairwise", cmd_pairwise, "pairwise GW distance matrix"),
                          ("landmarks", cmd_landmarks, "greedy max-min landmark selection")):
        q = sub.add_parser(name, help=hlp)
        q.add_argument("clouds", nargs="+", help="cloud files of equal size")
        q.add_argument("--method", choices=bench.METHODS, default="global", help="default global")
        q.add_argument("--starts", type=int, default=bench.DEFAULT_LOCAL_STARTS,
                       help=f"local-search starts (default {bench.DEFAULT_LOCAL_STARTS})")
        q.add_argument("-o", "--output", required=name == "pairwise",
                       help="matrix CSV" if name == "pairwise" else "result JSON (default stdout)")
        _add_solver_flags(q)
        q.set_defaults(func=fn)
        if name == "pairwise":
            q.add_argument("--status", help="write per-entry statuses as JSON")
            q.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
        else:
            q.add_argument("--k", type=int, required=True, help="number of landmarks")
            q.add_argument("--first", type=int, default=0, help="first landmark index (default 0)")
            q.add_argument("--random-first", action="store_true", help="draw the first landmark from --seed")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"gwglobal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
