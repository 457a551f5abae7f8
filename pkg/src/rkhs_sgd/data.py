"""Datasets of (point, label) pairs: validation, CSV round-trip, synthesis.

CSV schema is pinned: header `x_0,..,x_{d-1},y_0,..,y_{m-1}`, UTF-8,
`.` decimal, LF line endings, floats written with shortest round-trip repr
so files are byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .rng import substream

_BUMP_COUNT = 3
_BUMP_WIDTH = 0.75


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray  # (n, d)
    labels: np.ndarray  # (n, m)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        lbl = np.atleast_2d(np.asarray(self.labels, dtype=float))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lbl)
        if pts.shape[0] < 1:
            raise InputError("dataset needs at least one point")
        if pts.shape[0] != lbl.shape[0]:
            raise InputError(f"{pts.shape[0]} points but {lbl.shape[0]} labels")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def out_dim(self) -> int:
        return self.labels.shape[1]


def save_dataset(data: Dataset, path) -> None:
    d, m = data.dim, data.out_dim
    header = ",".join([f"x_{j}" for j in range(d)] + [f"y_{j}" for j in range(m)])
    lines = [header]
    for x, y in zip(data.points, data.labels):
        lines.append(",".join(repr(float(v)) for v in [*x, *y]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path) -> Dataset:
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if not rows:
        raise InputError(f"dataset file {path} is empty")
    header = rows[0].split(",")
    d = sum(1 for c in header if c.startswith("x_"))
    m = sum(1 for c in header if c.startswith("y_"))
    if d < 1 or m < 1 or d + m != len(header):
        raise InputError(f"dataset file {path} has an unrecognized header {header}")
    vals = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
    if vals.ndim != 2 or vals.shape[1] != d + m:
        raise InputError(f"dataset file {path} has ragged rows")
    return Dataset(points=vals[:, :d], labels=vals[:, d:])


def generate_dataset(n: int, d: int, m: int, noise_sd: float, seed: int) -> Dataset:
    """Synthetic smooth target: points uniform in [-1,1]^d, labels a sum of
    three Gaussian bumps with random centers/amplitudes plus optional noise.
    """
    if n < 1 or d < 1 or m < 1:
        raise InputError("n, d, m must all be >= 1")
    if noise_sd < 0:
        raise InputError("noise_sd must be >= 0")
    gen = substream(seed)
    points = gen.uniform(-1.0, 1.0, size=(n, d))
    bump_centers = gen.uniform(-1.0, 1.0, size=(_BUMP_COUNT, d))
    bump_amps = gen.uniform(-1.0, 1.0, size=(_BUMP_COUNT, m))
    diff = points[:, None, :] - bump_centers[None, :, :]
    sq = np.sum(diff * diff, axis=-1)
    weights = np.exp(-sq / (2.0 * _BUMP_WIDTH**2))  # (n, bumps)
    labels = weights @ bump_amps
    labels = labels + noise_sd * gen.standard_normal(size=(n, m))
    return Dataset(points=points, labels=labels)
