import math

import numpy as np
import pytest

from rkhs_sgd import exact, functions as fn, objective as obj, sgd
from rkhs_sgd.errors import ConfigError, InputError
from rkhs_sgd.kernels import KernelSpec, gram
from rkhs_sgd.objective import MixtureWeights, ProblemConstants
from rkhs_sgd.rng import substream


def make_consts(q):
    return ProblemConstants(lam=q, lam_sq_lipschitz=q + (1 - q), M=1.0)


def make_cfg(ref_weights, **kw):
    defaults = dict(weights=ref_weights, steps=100, seed=0, record_every=10)
    defaults.update(kw)
    return sgd.SgdConfig(**defaults)


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------

def test_schedule_example_q_half():
    sched = sgd.make_schedule(make_consts(0.5), rho=1.0, s=2.0)
    assert sched.b == pytest.approx(16.0, rel=1e-14)
    assert sched.eta(1) == pytest.approx(4.0 / 17.0, rel=1e-14)


def test_schedule_example_q_point3():
    sched = sgd.make_schedule(make_consts(0.3), rho=1.0, s=2.0)
    assert sched.b == pytest.approx(2 * (1 / 0.09) * 2, rel=1e-12)
    assert sched.eta(1) == pytest.approx((2 / 0.3) / (sched.b + 1), rel=1e-14)


def test_schedule_rejects_small_s():
    with pytest.raises(InputError):
        sgd.make_schedule(make_consts(0.5), rho=1.0, s=1.0)
    with pytest.raises(InputError):
        sgd.make_schedule(make_consts(0.5), rho=0.5, s=2.0)


def test_schedule_contraction_inequality_scan():
    for q in (0.1, 0.5, 0.9):
        for rho in (1.0, 1.25):
            sched = sgd.make_schedule(make_consts(q), rho=rho, s=2.0)
            etas = sched.eta_array(10**6)
            lam, Lsq = sched.lam, sched.lam_sq_lipschitz
            lhs = 1 - 2 * lam * etas + 2 * Lsq * rho * etas**2
            assert np.all(lhs <= 1 - lam * etas)
            assert np.all(etas <= lam / (2 * Lsq * rho))


def test_schedule_harmonic_decrease():
    sched = sgd.make_schedule(make_consts(0.3), rho=1.0, s=2.0)
    ks = np.arange(1, 1000)
    etas = sched.eta_array(999)
    prod = etas * (sched.b + ks)
    assert np.allclose(prod, prod[0], rtol=1e-12)
    assert np.all(np.diff(etas) < 0)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_index_near_degenerate():
    gen = substream(1)
    w = MixtureWeights(q=0.999999, n=4)
    draws = [sgd.sample_index(gen, w) for _ in range(10)]
    assert draws == [0] * 10


def test_sample_index_frequencies():
    w = MixtureWeights(q=0.3, n=5)
    cfg = sgd.SgdConfig(weights=w, steps=10**6, seed=123)
    idx, _ = sgd._draw_streams(cfg, 0)
    freq0 = np.mean(idx == 0)
    sigma = math.sqrt(0.3 * 0.7 / 10**6)
    assert abs(freq0 - 0.3) <= 3 * sigma
    p = (1 - 0.3) / 5
    sig_i = math.sqrt(p * (1 - p) / 10**6)
    for i in range(1, 6):
        assert abs(np.mean(idx == i) - p) <= 3 * sig_i


def test_scalar_sampler_matches_batch_stream():
    w = MixtureWeights(q=0.3, n=7)
    cfg = sgd.SgdConfig(weights=w, steps=1000, seed=9)
    idx, _ = sgd._draw_streams(cfg, 3)
    gen = substream(9, 3)
    scalar = [sgd.sample_index(gen, w) for _ in range(1000)]
    assert np.array_equal(idx, np.array(scalar))


def test_sample_operator():
    gen = substream(5)
    ident = sgd.OperatorMode()
    assert all(sgd.sample_operator(gen, ident) == 1.0 for _ in range(10))
    mode = sgd.OperatorMode(kind="two_point_scalar", c_lo=0.5, c_hi=1.5, p_hi=0.5)
    assert mode.rho == pytest.approx(1.25, rel=1e-14)
    draws = np.array([sgd.sample_operator(gen, mode) for _ in range(10**5)])
    assert set(np.unique(draws)) == {0.5, 1.5}
    assert abs(draws.mean() - 1.0) <= 3 * 0.5 / math.sqrt(10**5)


def test_operator_mode_validation():
    with pytest.raises(ConfigError):
        sgd.OperatorMode(kind="gaussian_scalar")
    with pytest.raises(ConfigError):
        sgd.OperatorMode(kind="two_point_scalar", c_lo=0.5, c_hi=1.2, p_hi=0.5)
    with pytest.raises(ConfigError):
        sgd.OperatorMode(kind="two_point_scalar", c_lo=-0.5, c_hi=1.5, p_hi=0.5)


# ---------------------------------------------------------------------------
# single step
# ---------------------------------------------------------------------------

def test_step_zero_index_shrinks(ref_data, ref_spec):
    gen = np.random.default_rng(3)
    from conftest import random_expansion

    F = random_expansion(gen, ref_spec, n_centers=4, scale=0.3)
    eta = 0.1
    out = sgd.step(F, 0, eta, 1.0, ref_data, math.inf)
    assert np.allclose(out.coeffs, (1 - eta) * F.coeffs, rtol=1e-14)


def test_step_from_zero_adds_representer(ref_data, ref_spec):
    z = fn.zero(ref_spec, 1)
    eta = 0.2
    out = sgd.step(z, 3, eta, 1.0, ref_data, math.inf)
    assert out.n_centers == 1
    assert np.array_equal(out.centers[0], ref_data.points[2])
    assert np.allclose(out.coeffs[0], eta * ref_data.labels[2])


def test_step_projection_halves_norm(ref_data, ref_spec):
    # build an iterate whose post-move norm is exactly measured, then pick r
    # so the scaling factor is 2
    z = fn.zero(ref_spec, 1)
    moved = sgd.step(z, 1, 0.5, 1.0, ref_data, math.inf)
    nrm = math.sqrt(fn.norm_sq(moved))
    r = nrm / 2
    projected = sgd.step(z, 1, 0.5, 1.0, ref_data, r)
    assert math.sqrt(fn.norm_sq(projected)) == pytest.approx(r, rel=1e-12)
    assert np.allclose(projected.coeffs, 0.5 * moved.coeffs, rtol=1e-12)


def test_fast_path_matches_reference_step(ref_data, ref_spec, ref_weights):
    # one batch step against the expansion-level update, both branches
    K = gram(ref_spec, ref_data.points).entries
    consts = obj.constants(ref_weights, ref_spec)
    sched = sgd.make_schedule(consts, 1.0, 2.0)
    cfg = make_cfg(ref_weights, steps=1, seed=4)
    _, alpha, _, _, idx = sgd.run_trials(K, ref_data.labels, cfg, sched, [0])
    z = fn.zero(ref_spec, 1)
    ref_next = sgd.step(z, int(idx[0, 0]), sched.eta(1), 1.0, ref_data, math.inf)
    fast_next = fn.coalesce(fn.KernelExpansion(ref_spec, ref_data.points, alpha[0]))
    assert exact.distance_sq(ref_next, fast_next) <= 1e-24


def test_multi_step_fast_path_matches_reference(ref_data, ref_spec, ref_weights):
    K = gram(ref_spec, ref_data.points).entries
    consts = obj.constants(ref_weights, ref_spec)
    sched = sgd.make_schedule(consts, 1.0, 2.0)
    cfg = make_cfg(ref_weights, steps=30, seed=11, radius=0.15)
    _, alpha, _, _, idx = sgd.run_trials(K, ref_data.labels, cfg, sched, [0])
    F = fn.zero(ref_spec, 1)
    for k in range(1, 31):
        F = sgd.step(F, int(idx[0, k - 1]), sched.eta(k), 1.0, ref_data, cfg.radius)
    fast = fn.KernelExpansion(ref_spec, ref_data.points, alpha[0])
    assert exact.distance_sq(F, fast) <= 1e-18


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

def test_run_single_step_trajectory(ref_data, ref_spec, ref_weights):
    cfg = make_cfg(ref_weights, steps=1, record_every=1)
    traj = sgd.run(cfg, ref_data, ref_spec)
    assert traj.ks.tolist() == [1]
    assert traj.values[0] == 0.0  # F_1 = 0


def test_run_deterministic(ref_data, ref_spec, ref_weights):
    cfg = make_cfg(ref_weights, steps=500, seed=77, record_every=50)
    t1 = sgd.run(cfg, ref_data, ref_spec)
    t2 = sgd.run(cfg, ref_data, ref_spec)
    assert np.array_equal(t1.values, t2.values)
    assert np.array_equal(t1.index_draws, t2.index_draws)


def test_run_feasibility_under_projection(ref_data, ref_spec, ref_weights):
    sol = exact.solve(ref_spec, ref_data, ref_weights)
    r = 1.1 * math.sqrt(fn.norm_sq(sol.fstar))
    cfg = make_cfg(ref_weights, steps=2000, seed=5, radius=r, record_every=100)
    traj = sgd.run(cfg, ref_data, ref_spec, oracle=sol.fstar)
    assert traj.max_norm_ratio_sq <= (1 + 1e-12) ** 2


def test_run_center_structure(ref_data, ref_spec, ref_weights):
    cfg = make_cfg(ref_weights, steps=300, seed=8)
    traj = sgd.run(cfg, ref_data, ref_spec)
    assert traj.final.n_centers <= ref_data.n
    assert np.array_equal(traj.final.centers, ref_data.points)


def test_run_error_decays(ref_data, ref_spec, ref_weights):
    sol = exact.solve(ref_spec, ref_data, ref_weights)
    cfg = make_cfg(ref_weights, steps=20000, seed=2, record_every=100)
    n_trials = 30
    K = gram(ref_spec, ref_data.points).entries
    consts = obj.constants(ref_weights, ref_spec)
    sched = sgd.make_schedule(consts, 1.0, 2.0)
    recs, _, _, rec_ks, _ = sgd.run_trials(
        K, ref_data.labels, cfg, sched, range(n_trials), alpha_star=sol.fstar.coeffs
    )
    mean = recs.mean(axis=0)
    at_2000 = mean[rec_ks.tolist().index(2000)]
    at_20000 = mean[-1]
    assert at_20000 * 5 <= at_2000


def test_run_rejects_mismatched_n(ref_data, ref_spec):
    cfg = make_cfg(MixtureWeights(q=0.3, n=7), steps=10)
    with pytest.raises(InputError):
        sgd.run(cfg, ref_data, ref_spec)


def test_config_validation(ref_weights):
    with pytest.raises(ConfigError):
        make_cfg(ref_weights, steps=0)
    with pytest.raises(ConfigError):
        make_cfg(ref_weights, radius=0.0)
    with pytest.raises(ConfigError):
        make_cfg(ref_weights, record_every=0)
