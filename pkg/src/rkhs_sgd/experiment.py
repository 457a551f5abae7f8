"""Monte-Carlo convergence study: many independent SGD trials against the
exact oracle, a log-log slope fit on the tail of the mean error curve, and
the computable scale factor of the theoretical bound.

Trials are processed in fixed-size chunks; the chunk size never depends on
the thread count, so outputs are byte-identical for any --threads value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import exact
from . import objective as obj
from .data import Dataset
from .errors import ConfigError, NumericsError
from .functions import KernelExpansion
from .kernels import KernelSpec, gram
from .objective import MixtureWeights
from .sgd import SgdConfig, make_schedule, run_trials

_CHUNK = 64


@dataclass(frozen=True)
class StudyConfig:
    sgd: SgdConfig
    trials: int
    tail_fraction: float = 0.5

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 < self.tail_fraction < 1.0:
            raise ConfigError(f"tail_fraction must lie in (0,1), got {self.tail_fraction}")


@dataclass(frozen=True)
class ConvergenceRecord:
    ks: np.ndarray
    mean_err_sq: np.ndarray
    stderr: np.ndarray
    slope: float
    slope_ci: float
    intercept: float
    bound_scale: float
    max_norm_ratio_sq: float
    oracle: exact.OracleSolution


def fit_rate(ks, means, tail_fraction: float):
    """OLS of log(mean error) on log(k) over the trailing fraction of the
    recorded curve. Returns (slope, intercept, ci) with ci the 95% interval
    half-width from the residual variance."""
    ks = np.asarray(ks, dtype=float)
    means = np.asarray(means, dtype=float)
    ntail = int(math.ceil(ks.size * tail_fraction))
    if ntail < 10:
        raise ConfigError(f"slope fit needs >= 10 tail points, got {ntail}")
    x = ks[-ntail:]
    y = means[-ntail:]
    if np.any(y <= 0):
        raise NumericsError("nonpositive mean error in fit tail; run diverged?")
    lx = np.log(x)
    ly = np.log(y)
    lxc = lx - lx.mean()
    sxx = float(lxc @ lxc)
    slope = float(lxc @ ly) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    dof = ntail - 2
    sigma_sq = float(resid @ resid) / dof
    se = math.sqrt(sigma_sq / sxx)
    ci = float(stats.t.ppf(0.975, dof)) * se
    return slope, intercept, ci


def bound_report(fstar: KernelExpansion, data: Dataset, w: MixtureWeights) -> float:
    """k-free factor of the theoretical error bound: the expected squared
    dual gradient norm at the minimizer divided by q^2."""
    return obj.bound_term(fstar, data, w) / w.q**2


def run_study(
    cfg: StudyConfig,
    data: Dataset,
    spec: KernelSpec,
    threads: int | None = None,
) -> ConvergenceRecord:
    scfg = cfg.sgd
    w = scfg.weights
    oracle = exact.solve(spec, data, w, radius=scfg.radius)
    if math.isfinite(scfg.radius) and not oracle.constrained_ok:
        raise ConfigError(
            f"exact minimizer norm exceeds the ball radius {scfg.radius}; "
            "increase radius or set it to inf so the oracle is the constrained minimizer"
        )
    K = gram(spec, data.points).entries
    consts = obj.constants(w, spec)
    schedule = make_schedule(consts, scfg.operator.rho, scfg.s)
    alpha_star = oracle.fstar.coeffs

    chunks = [(lo, min(lo + _CHUNK, cfg.trials)) for lo in range(0, cfg.trials, _CHUNK)]
    nrec = None
    err = None
    max_ratio = np.zeros(cfg.trials)

    def work(bounds):
        lo, hi = bounds
        recs, _, ratios, rec_ks, _ = run_trials(
            K, data.labels, scfg, schedule, range(lo, hi), alpha_star=alpha_star
        )
        return lo, hi, recs, ratios, rec_ks

    with ThreadPoolExecutor(max_workers=threads) as pool:
        for lo, hi, recs, ratios, rec_ks in pool.map(work, chunks):
            if err is None:
                nrec = rec_ks.size
                err = np.empty((cfg.trials, nrec))
                ks = rec_ks
            err[lo:hi] = recs
            max_ratio[lo:hi] = ratios

    mean = err.mean(axis=0)
    if cfg.trials > 1:
        stderr = err.std(axis=0, ddof=1) / math.sqrt(cfg.trials)
    else:
        stderr = np.zeros(nrec)
    slope, intercept, ci = fit_rate(ks, mean, cfg.tail_fraction)
    return ConvergenceRecord(
        ks=ks,
        mean_err_sq=mean,
        stderr=stderr,
        slope=slope,
        slope_ci=ci,
        intercept=intercept,
        bound_scale=bound_report(oracle.fstar, data, w),
        max_norm_ratio_sq=float(max_ratio.max()),
        oracle=oracle,
    )


def write_curve_csv(record: ConvergenceRecord, path) -> None:
    lines = ["k,mean_err_sq,stderr"]
    for k, m, s in zip(record.ks, record.mean_err_sq, record.stderr):
        lines.append(f"{int(k)},{float(m)!r},{float(s)!r}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_summary(record: ConvergenceRecord, path, extra: dict | None = None) -> None:
    info = {
        "slope": repr(record.slope),
        "slope_ci": repr(record.slope_ci),
        "intercept": repr(record.intercept),
        "bound_scale": repr(record.bound_scale),
        "oracle_residual_norm": repr(record.oracle.residual_norm),
    }
    if extra:
        info.update({k: str(v) for k, v in extra.items()})
    with open(path, "w", newline="\n") as fh:
        for k, v in info.items():
            fh.write(f"{k}={v}\n")
