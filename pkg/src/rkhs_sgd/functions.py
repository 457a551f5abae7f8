"""Finite kernel expansions: the concrete realization of the function space.

An expansion is a list of centers with vector coefficients,
f = sum_j k(c_j, .) * a_j, a_j in R^m. The zero function has no centers.
All operations are pure; expansions are treated as immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericsError
from .kernels import KernelSpec, cross_gram

_NEG_NORM_TOL = 1e-10


@dataclass(frozen=True)
class KernelExpansion:
    spec: KernelSpec
    centers: np.ndarray  # (p, d)
    coeffs: np.ndarray   # (p, m)

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if centers.size == 0:
            centers = centers.reshape(0, self.spec.dim)
        if coeffs.size == 0:
            coeffs = coeffs.reshape(0, coeffs.shape[-1] if coeffs.ndim > 1 else 1)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coeffs", coeffs)
        if centers.shape[0] != coeffs.shape[0]:
            raise InputError(
                f"{centers.shape[0]} centers but {coeffs.shape[0]} coefficients"
            )
        if centers.shape[0] > 0 and centers.shape[1] != self.spec.dim:
            raise InputError(
                f"centers have dimension {centers.shape[1]}, kernel expects {self.spec.dim}"
            )

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    @property
    def out_dim(self) -> int:
        return self.coeffs.shape[1]


def zero(spec: KernelSpec, out_dim: int) -> KernelExpansion:
    """The zero function with the given output dimension."""
    return KernelExpansion(spec, np.zeros((0, spec.dim)), np.zeros((0, out_dim)))


def _check_compatible(f: KernelExpansion, g: KernelExpansion):
    if f.spec != g.spec:
        raise InputError("expansions use different kernels")
    if f.n_centers and g.n_centers and f.out_dim != g.out_dim:
        raise InputError(f"output dimensions differ: {f.out_dim} vs {g.out_dim}")


def evaluate(f: KernelExpansion, x) -> np.ndarray:
    """f(x) as a vector in R^m."""
    x = np.asarray(x, dtype=float)
    if x.shape != (f.spec.dim,):
        raise InputError(f"expected point of shape ({f.spec.dim},), got {x.shape}")
    if f.n_centers == 0:
        return np.zeros(f.out_dim)
    kvec = cross_gram(f.spec, f.centers, x[None, :])[:, 0]
    return kvec @ f.coeffs


def evaluate_at(f: KernelExpansion, points) -> np.ndarray:
    """f evaluated at several points at once; returns (npoints, m)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if f.n_centers == 0:
        return np.zeros((pts.shape[0], f.out_dim))
    return cross_gram(f.spec, pts, f.centers) @ f.coeffs


def representer(spec: KernelSpec, x, y) -> KernelExpansion:
    """The element of the space representing evaluation at x paired with y.

    Pairing it with any expansion phi under the inner product gives
    y . phi(x); it is linear in y.
    """
    x = np.asarray(x, dtype=float)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return KernelExpansion(spec, x[None, :], y[None, :])


def inner(f: KernelExpansion, g: KernelExpansion) -> float:
    """Hilbert-space inner product of two expansions."""
    _check_compatible(f, g)
    if f.n_centers == 0 or g.n_centers == 0:
        return 0.0
    K = cross_gram(f.spec, f.centers, g.centers)
    return float(np.sum(K * (f.coeffs @ g.coeffs.T)))


def norm_sq(f: KernelExpansion) -> float:
    """Squared Hilbert norm, clamped at zero.

    A value below -1e-10 * scale cannot come from rounding a PSD quadratic
    form and signals a broken Gram computation.
    """
    v = inner(f, f)
    scale = 1.0 + float(np.sum(f.coeffs * f.coeffs))
    if v < -_NEG_NORM_TOL * scale:
        raise NumericsError(f"norm_sq came out {v} (scale {scale}); Gram is not PSD")
    return max(v, 0.0)


def coalesce(f: KernelExpansion) -> KernelExpansion:
    """Merge coefficients at exactly coinciding centers (first-seen order)."""
    if f.n_centers == 0:
        return f
    order: dict[bytes, int] = {}
    centers = []
    coeffs = []
    for c, a in zip(f.centers, f.coeffs):
        key = c.tobytes()
        if key in order:
            coeffs[order[key]] = coeffs[order[key]] + a
        else:
            order[key] = len(centers)
            centers.append(c)
            coeffs.append(a.copy())
    return KernelExpansion(f.spec, np.array(centers), np.array(coeffs))


def combine(a: float, f: KernelExpansion, b: float, g: KernelExpansion) -> KernelExpansion:
    """a*f + b*g with coinciding centers coalesced."""
    _check_compatible(f, g)
    if f.n_centers == 0 and g.n_centers == 0:
        return zero(f.spec, max(f.out_dim, g.out_dim))
    if f.n_centers == 0:
        return KernelExpansion(g.spec, g.centers, b * g.coeffs)
    if g.n_centers == 0:
        return KernelExpansion(f.spec, f.centers, a * f.coeffs)
    merged = KernelExpansion(
        f.spec,
        np.concatenate([f.centers, g.centers]),
        np.concatenate([a * f.coeffs, b * g.coeffs]),
    )
    return coalesce(merged)


def scale(a: float, f: KernelExpansion) -> KernelExpansion:
    return KernelExpansion(f.spec, f.centers, a * f.coeffs)


def project_ball(f: KernelExpansion, radius: float) -> KernelExpansion:
    """Nearest point of the centered ball of the given radius.

    radius may be math.inf, which disables the constraint. For a point
    outside the ball the projection is the radial rescaling
    f * radius / ||f||.
    """
    if not radius > 0:
        raise InputError(f"radius must be positive (or inf), got {radius}")
    if math.isinf(radius):
        return f
    nrm = math.sqrt(norm_sq(f))
    if nrm <= radius:
        return f
    return scale(radius / nrm, f)


# ---------------------------------------------------------------------------
# serialization: CSV of centers/coefficients plus a key=value metadata sidecar
# ---------------------------------------------------------------------------

def save_expansion(f: KernelExpansion, csv_path, meta_path) -> None:
    d, m = f.spec.dim, f.out_dim
    header = ",".join(
        [f"center_{j}" for j in range(d)] + [f"coeff_{j}" for j in range(m)]
    )
    lines = [header]
    for c, a in zip(f.centers, f.coeffs):
        lines.append(",".join(repr(float(v)) for v in [*c, *a]))
    with open(csv_path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "family": f.spec.family,
        "bandwidth": repr(f.spec.bandwidth),
        "dim": d,
        "out_dim": m,
    }
    with open(meta_path, "w", newline="\n") as fh:
        for k, v in meta.items():
            fh.write(f"{k}={v}\n")


def load_expansion(csv_path, meta_path) -> KernelExpansion:
    meta = {}
    with open(meta_path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                k, _, v = line.partition("=")
                meta[k] = v
    spec = KernelSpec(meta["family"], float(meta["bandwidth"]), int(meta["dim"]))
    m = int(meta["out_dim"])
    with open(csv_path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
    if data.size == 0:
        return zero(spec, m)
    return KernelExpansion(spec, data[:, : spec.dim], data[:, spec.dim :])
