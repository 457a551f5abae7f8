"""The randomized regularized least-squares objective and its gradients.

The objective mixes a norm penalty (index 0, probability q) with the n
pointwise squared losses (each with probability (1-q)/n). Gradients are
kept as elements of the function space via their Riesz images, so the dual
space never needs a concrete representation: the gradient of the penalty
is f itself and the gradient of loss i is the representer at x_i with
coefficient f(x_i) - y_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import functions as fn
from .data import Dataset
from .errors import InputError
from .functions import KernelExpansion
from .kernels import KernelSpec, evaluate as kernel_eval, sup_bound


@dataclass(frozen=True)
class MixtureWeights:
    """Sampling law of the random index: P(0) = q, P(i) = (1-q)/n."""

    q: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise InputError(f"q must lie in (0,1), got {self.q}")
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class ProblemConstants:
    """Strong-monotonicity constant, mean-square Lipschitz constant, sup bound."""

    lam: float
    lam_sq_lipschitz: float
    M: float


def _check_index(i: int, n: int):
    if not 0 <= i <= n:
        raise InputError(f"index {i} out of range 0..{n}")


def loss_component(i: int, f: KernelExpansion, data: Dataset) -> float:
    """Component i of the objective: the norm penalty for i=0, otherwise
    half the squared residual at data point i."""
    _check_index(i, data.n)
    if i == 0:
        return 0.5 * fn.norm_sq(f)
    resid = fn.evaluate(f, data.points[i - 1]) - data.labels[i - 1]
    return 0.5 * float(resid @ resid)


def loss_total(f: KernelExpansion, data: Dataset, w: MixtureWeights) -> float:
    """Exact finite expectation of the random component loss."""
    vals = fn.evaluate_at(f, data.points)
    resid_sq = np.sum((vals - data.labels) ** 2, axis=1)
    return w.q * 0.5 * fn.norm_sq(f) + (1.0 - w.q) / w.n * 0.5 * float(np.sum(resid_sq))


def riesz_grad_component(i: int, f: KernelExpansion, data: Dataset) -> KernelExpansion:
    """Riesz image of the gradient of component i at f."""
    _check_index(i, data.n)
    if i == 0:
        return f
    x = data.points[i - 1]
    resid = fn.evaluate(f, x) - data.labels[i - 1]
    return fn.representer(f.spec, x, resid)


def riesz_grad_full(f: KernelExpansion, data: Dataset, w: MixtureWeights) -> KernelExpansion:
    """Riesz image of the gradient of the full (expected) objective at f."""
    vals = fn.evaluate_at(f, data.points)
    resid = vals - data.labels
    grad_data = KernelExpansion(f.spec, data.points, (1.0 - w.q) / w.n * resid)
    if f.n_centers == 0:
        return fn.coalesce(grad_data)
    return fn.combine(w.q, f, 1.0, grad_data)


def constants(w: MixtureWeights, spec: KernelSpec) -> ProblemConstants:
    """Problem constants for this mixture and kernel: lambda = q and
    Lambda^2 = q + (1-q) M^4 with M the kernel sup bound."""
    M = sup_bound(spec)
    return ProblemConstants(lam=w.q, lam_sq_lipschitz=w.q + (1.0 - w.q) * M**4, M=M)


def bound_term(fstar: KernelExpansion, data: Dataset, w: MixtureWeights) -> float:
    """Expected squared dual norm of the random gradient at the minimizer:
    q ||f*||^2 + (1-q)/n sum_i ||f*(x_i) - y_i||^2 k(x_i, x_i)."""
    vals = fn.evaluate_at(fstar, data.points)
    resid_sq = np.sum((vals - data.labels) ** 2, axis=1)
    diag = np.array([kernel_eval(fstar.spec, p, p) for p in data.points])
    return w.q * fn.norm_sq(fstar) + (1.0 - w.q) / w.n * float(np.sum(resid_sq * diag))
