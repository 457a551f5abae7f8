"""Projected stochastic gradient descent in the kernel function space.

The iterate starts at zero and each step picks a random component index:
index 0 shrinks the iterate by (1 - eta_k), index i adds a representer at
x_i scaled by eta_k times the residual, after which the iterate is
projected onto the radius-r ball. Because every update touches only
dataset centers, the iterate is stored as an n x m coefficient table and
a whole run costs O(n) memory.

The step size follows the harmonic schedule eta_k = (s/lambda) / (b+k)
with b = 2 rho (Lambda/lambda)^2 s, which keeps the per-step contraction
factor below 1 - lambda eta_k for every k.

An optional operator mode multiplies each stochastic gradient by a random
positive scalar c with E[c] = 1; rho is then E[c^2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import functions as fn
from . import objective as obj
from .data import Dataset
from .errors import ConfigError, InputError
from .functions import KernelExpansion
from .kernels import KernelSpec, gram
from .objective import MixtureWeights, ProblemConstants
from .rng import substream

# Interval (in steps) at which the cached Gram-times-coefficients vector is
# recomputed from scratch to stop rounding drift from accumulating.
_REFRESH_EVERY = 128


@dataclass(frozen=True)
class StepSchedule:
    s: float
    lam: float
    lam_sq_lipschitz: float
    rho: float
    b: float

    def eta(self, k: int) -> float:
        return (self.s / self.lam) / (self.b + k)

    def eta_array(self, steps: int) -> np.ndarray:
        ks = np.arange(1, steps + 1, dtype=float)
        return (self.s / self.lam) / (self.b + ks)


def make_schedule(consts: ProblemConstants, rho: float, s: float) -> StepSchedule:
    if not s > 1:
        raise InputError(f"schedule requires s > 1, got {s}")
    if not rho >= 1:
        raise InputError(f"rho must be >= 1, got {rho}")
    ratio = consts.lam_sq_lipschitz / consts.lam**2
    b = 2.0 * rho * ratio * s
    return StepSchedule(s=s, lam=consts.lam, lam_sq_lipschitz=consts.lam_sq_lipschitz,
                        rho=rho, b=b)


@dataclass(frozen=True)
class OperatorMode:
    """Random scalar multiple of the identity applied to each gradient.

    Two-point mode draws c_hi with probability p_hi, else c_lo, with the
    mean pinned to 1; rho is the second moment E[c^2] >= 1.
    """

    kind: str = "identity"
    c_lo: float = 1.0
    c_hi: float = 1.0
    p_hi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("identity", "two_point_scalar"):
            raise ConfigError(f"unknown operator kind {self.kind!r}")
        if self.kind == "two_point_scalar":
            if not (self.c_lo > 0 and self.c_hi > 0):
                raise ConfigError("operator scalars must be positive")
            if not 0.0 <= self.p_hi <= 1.0:
                raise ConfigError(f"p_hi must lie in [0,1], got {self.p_hi}")
            mean = self.p_hi * self.c_hi + (1.0 - self.p_hi) * self.c_lo
            if abs(mean - 1.0) > 1e-12:
                raise ConfigError(f"operator mean must be 1, got {mean}")

    @property
    def rho(self) -> float:
        if self.kind == "identity":
            return 1.0
        return self.p_hi * self.c_hi**2 + (1.0 - self.p_hi) * self.c_lo**2


@dataclass(frozen=True)
class SgdConfig:
    weights: MixtureWeights
    steps: int
    radius: float = math.inf
    s: float = 2.0
    seed: int = 0
    operator: OperatorMode = field(default_factory=OperatorMode)
    record_every: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not self.radius > 0:
            raise ConfigError(f"radius must be positive or inf, got {self.radius}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed}")


@dataclass(frozen=True)
class Trajectory:
    ks: np.ndarray          # recorded iteration indices
    values: np.ndarray      # squared distance to oracle, or squared norm
    kind: str               # "err_sq" | "norm_sq"
    final: KernelExpansion  # iterate after the last step
    index_draws: np.ndarray
    max_norm_ratio_sq: float  # max over steps of ||F_k||^2 / r^2 (0 if r = inf)


def sample_index(gen: np.random.Generator, w: MixtureWeights) -> int:
    """One draw of the component index: 0 w.p. q, each i in 1..n w.p. (1-q)/n."""
    u = gen.random()
    if u < w.q:
        return 0
    j = int((u - w.q) / (1.0 - w.q) * w.n)
    return 1 + min(j, w.n - 1)


def sample_operator(gen: np.random.Generator, mode: OperatorMode) -> float:
    """One draw of the random gradient scaling."""
    if mode.kind == "identity":
        return 1.0
    return mode.c_hi if gen.random() < mode.p_hi else mode.c_lo


def _draw_streams(cfg: SgdConfig, trial: int):
    """All index and operator draws for one trial, in a fixed order:
    the index uniforms are consumed first, then the operator uniforms."""
    gen = substream(cfg.seed, trial)
    w = cfg.weights
    u = gen.random(cfg.steps)
    j = np.minimum(((u - w.q) / (1.0 - w.q) * w.n).astype(np.int64), w.n - 1)
    idx = np.where(u < w.q, 0, 1 + j)
    if cfg.operator.kind == "identity":
        c = np.ones(cfg.steps)
    else:
        uc = gen.random(cfg.steps)
        c = np.where(uc < cfg.operator.p_hi, cfg.operator.c_hi, cfg.operator.c_lo)
    return idx, c


def step(
    F: KernelExpansion,
    i: int,
    eta: float,
    c: float,
    data: Dataset,
    radius: float,
) -> KernelExpansion:
    """One reference-level update: gradient step on component i, then ball
    projection. With c = 1 this is exactly the two-case update: shrink by
    (1 - eta) for i = 0, otherwise add the scaled residual representer and
    divide by max(1, ||.||/r)."""
    if not eta > 0 or not c > 0:
        raise InputError("eta and c must be positive")
    g = obj.riesz_grad_component(i, F, data)
    moved = fn.combine(1.0, F, -eta * c, g)
    return fn.project_ball(moved, radius)


def record_indices(steps: int, record_every: int) -> np.ndarray:
    """Iteration indices at which the iterate is recorded: k = 1 plus every
    multiple of record_every up to the step count."""
    ks = [1] + [j * record_every for j in range(1, steps // record_every + 1)]
    return np.unique(np.array(ks, dtype=np.int64))


def run_trials(
    gram_entries: np.ndarray,
    labels: np.ndarray,
    cfg: SgdConfig,
    schedule: StepSchedule,
    trials,
    alpha_star: np.ndarray | None = None,
):
    """Simulate a batch of trials simultaneously on the coefficient table.

    Returns (records, final_alphas, max_norm_ratio_sq) where records has
    shape (ntrials, nrecords) and holds the squared distance to the oracle
    coefficients (if given) or the squared norm of the iterate.
    """
    trials = list(trials)
    T = len(trials)
    n, m = labels.shape
    K = gram_entries
    steps = cfg.steps
    r = cfg.radius
    finite_r = math.isfinite(r)
    etas = schedule.eta_array(steps)
    streams = [_draw_streams(cfg, t) for t in trials]
    idx = np.stack([s[0] for s in streams])
    cvals = np.stack([s[1] for s in streams])

    alpha = np.zeros((T, n, m))
    v = np.zeros((T, n, m))  # cached K @ alpha per trial
    rec_ks = record_indices(steps, cfg.record_every)
    records = np.empty((T, rec_ks.size))
    rec_pos = 0
    max_ratio_sq = np.zeros(T)

    def measure():
        if alpha_star is None:
            e = alpha
        else:
            e = alpha - alpha_star[None, :, :]
        ge = np.einsum("ij,tjm->tim", K, e)
        return np.sum(e * ge, axis=(1, 2))

    for k in range(1, steps + 1):
        if rec_pos < rec_ks.size and k == rec_ks[rec_pos]:
            records[:, rec_pos] = measure()
            rec_pos += 1

        eta = etas[k - 1]
        I = idx[:, k - 1]
        c = cvals[:, k - 1]
        zm = I == 0
        if zm.any():
            fac = 1.0 - eta * c[zm]
            alpha[zm] *= fac[:, None, None]
            v[zm] *= fac[:, None, None]
        if not zm.all():
            t_idx = np.nonzero(~zm)[0]
            i = I[t_idx] - 1
            fx = v[t_idx, i, :]
            delta = (eta * c[t_idx])[:, None] * (labels[i] - fx)
            alpha[t_idx, i, :] += delta
            v[t_idx] += K[i][:, :, None] * delta[:, None, :]
        if k % _REFRESH_EVERY == 0:
            v = np.einsum("ij,tjm->tim", K, alpha)
        if finite_r:
            norm2 = np.sum(alpha * v, axis=(1, 2))
            ratio_sq = norm2 / (r * r)
            over = ratio_sq > 1.0
            if over.any():
                S = np.sqrt(ratio_sq[over])
                alpha[over] /= S[:, None, None]
                v[over] /= S[:, None, None]
                norm2 = np.sum(alpha * v, axis=(1, 2))
                ratio_sq = norm2 / (r * r)
            max_ratio_sq = np.maximum(max_ratio_sq, ratio_sq)

    return records, alpha, max_ratio_sq, rec_ks, idx


def run(
    cfg: SgdConfig,
    data: Dataset,
    spec: KernelSpec,
    oracle: KernelExpansion | None = None,
) -> Trajectory:
    """One full SGD trajectory (trial index 0 of the seed's substreams)."""
    if cfg.weights.n != data.n:
        raise InputError(f"mixture n = {cfg.weights.n} but dataset has {data.n} points")
    alpha_star = None
    if oracle is not None:
        if not np.array_equal(oracle.centers, data.points):
            raise InputError("oracle expansion must be centered on the dataset points")
        alpha_star = oracle.coeffs
    K = gram(spec, data.points).entries
    consts = obj.constants(cfg.weights, spec)
    schedule = make_schedule(consts, cfg.operator.rho, cfg.s)
    records, alpha, max_ratio_sq, rec_ks, idx = run_trials(
        K, data.labels, cfg, schedule, [0], alpha_star=alpha_star
    )
    final = KernelExpansion(spec, data.points, alpha[0])
    return Trajectory(
        ks=rec_ks,
        values=records[0],
        kind="err_sq" if oracle is not None else "norm_sq",
        final=final,
        index_draws=idx[0],
        max_norm_ratio_sq=float(max_ratio_sq[0]),
    )
