"""Point-cloud persistence.

CSV layout: the first line holds ``dim,n`` as two integers, followed by ``n``
rows of ``dim`` floats (one point per row).  The JSON variant stores the same
data plus free-form metadata (generator name, seed, ...).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import PointCloud

SCHEMA_VERSION = 1


def fmt_float(v: float) -> str:
    """Shortest-safe 17-significant-digit text for a float."""
    return format(float(v), ".17g")


def write_cloud_csv(cloud: PointCloud, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([cloud.dim, cloud.count])
        for p in cloud.points:
            w.writerow([fmt_float(v) for v in p])


def read_cloud_csv(path) -> PointCloud:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty point-cloud file")
    try:
        dim, n = int(rows[0][0]), int(rows[0][1])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: first line must be 'dim,n'") from exc
    pts = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    if pts.shape != (n, dim):
        raise ValueError(f"{path}: header says {n} points of dim {dim}, found shape {pts.shape}")
    return PointCloud.from_points(pts)


def cloud_to_dict(cloud: PointCloud) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": cloud.dim,
        "n": cloud.count,
        "points": cloud.points.tolist(),
        "meta": dict(cloud.meta),
    }


def cloud_from_dict(d: dict) -> PointCloud:
    pts = np.asarray(d["points"], dtype=float).reshape(int(d["n"]), int(d["dim"]))
    return PointCloud.from_points(pts, meta=d.get("meta") or {})


def write_cloud_json(cloud: PointCloud, path) -> None:
    # json emits repr() floats, which round-trip exactly
    Path(path).write_text(json.dumps(cloud_to_dict(cloud), indent=1))


def read_cloud_json(path) -> PointCloud:
    return cloud_from_dict(json.loads(Path(path).read_text()))


def read_cloud(path) -> PointCloud:
    """Dispatch on the file suffix (``.json`` or anything else as CSV)."""
    if str(path).lower().endswith(".json"):
        return read_cloud_json(path)
    return read_cloud_csv(path)


def write_cloud(cloud: PointCloud, path) -> None:
    if str(path).lower().endswith(".json"):
        write_cloud_json(cloud, path)
    else:
        write_cloud_csv(cloud, path)
