"""Seeded synthetic point clouds.

Named families: ``U`` (uniform in the unit ball), ``N1`` (standard normal),
``N2`` and ``N3`` (normal with diagonal covariance ``(1, 1, 0.1)`` and
``(1, 0.5, 0.1)``).  For clouds of lower dimension the leading entries of
the covariance are used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointCloud

UNIFORM_BALL = "uniform_ball"
GAUSSIAN = "gaussian"

NAMED_COVARIANCES = {
    "N1": (1.0, 1.0, 1.0),
    "N2": (1.0, 1.0, 0.1),
    "N3": (1.0, 0.5, 0.1),
}
TYPES = ("U",) + tuple(NAMED_COVARIANCES)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    dim: int
    n: int
    seed: int = 0
    cov_diag: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in (UNIFORM_BALL, GAUSSIAN):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == GAUSSIAN:
            cov = (1.0,) * self.dim if self.cov_diag is None else tuple(float(c) for c in self.cov_diag)
            if len(cov) != self.dim:
                raise ValueError(f"cov_diag has {len(cov)} entries for dim {self.dim}")
            if not all(c > 0 for c in cov):
                raise ValueError("cov_diag entries must be > 0")
            object.__setattr__(self, "cov_diag", cov)
        elif self.cov_diag is not None:
            raise ValueError("cov_diag only applies to gaussian clouds")

    @classmethod
    def named(cls, type_name: str, dim: int, n: int, seed: int = 0) -> "GeneratorSpec":
        """Spec for one of the named families ``U``, ``N1``, ``N2``, ``N3``."""
        if type_name == "U":
            return cls(UNIFORM_BALL, dim, n, seed)
        if type_name not in NAMED_COVARIANCES:
            raise ValueError(f"unknown cloud type {type_name!r}; expected one of {TYPES}")
        cov = NAMED_COVARIANCES[type_name]
        if dim > len(cov):
            raise ValueError(f"{type_name} is defined up to dimension {len(cov)}")
        return cls(GAUSSIAN, dim, n, seed, cov[:dim])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "n": self.n, "seed": self.seed,
                "cov_diag": None if self.cov_diag is None else list(self.cov_diag)}

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        cov = d.get("cov_diag")
        return cls(d["kind"], int(d["dim"]), int(d["n"]), int(d.get("seed", 0)),
                   None if cov is None else tuple(cov))


def uniform_ball(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    # uniform direction, radius U^(1/dim)
    d = rng.standard_normal((dim, n))
    d /= np.linalg.norm(d, axis=0, keepdims=True)
    return d * rng.random(n) ** (1.0 / dim)


def generate(spec: GeneratorSpec) -> PointCloud:
    rng = np.random.default_rng(spec.seed)
    if spec.kind == UNIFORM_BALL:
        coords = uniform_ball(spec.dim, spec.n, rng)
    else:
        sd = np.sqrt(np.asarray(spec.cov_diag))[:, None]
        coords = sd * rng.standard_normal((spec.dim, spec.n))
    return PointCloud(coords, meta={"generator": spec.to_dict()})


def instance_pair(type_name: str, n: int, dims: tuple[int, int], seed: int) -> tuple[PointCloud, PointCloud]:
    """Two independent clouds of one family, seeded ``2 seed`` and ``2 seed + 1``."""
    lx, ly = dims
    x = generate(GeneratorSpec.named(type_name, lx, n, 2 * seed))
    y = generate(GeneratorSpec.named(type_name, ly, n, 2 * seed + 1))
    return x, y
