"""Command-line entry point.

Subcommands: gen-data, exact, sgd, study. A TOML config supplies the run
parameters; flags override individual values. Exit codes: 0 success,
1 validation/config error, 2 numerical/acceptance failure, 3 I/O error.
"""

from __future__ import annotations

import dataclasses
import math
import os
import sys
from pathlib import Path

import click

from . import config as cfgmod
from . import exact, experiment, functions as fn, objective as obj, sgd as sgdmod
from .data import generate_dataset, load_dataset, save_dataset
from .errors import AcceptanceError, ConfigError, InputError, NumericsError

RESIDUAL_TOL = 1e-8


def _load(config_path) -> cfgmod.RunConfig:
    if config_path is None:
        return cfgmod.RunConfig()
    return cfgmod.load_config(config_path)


def _dataset(cfg: cfgmod.RunConfig):
    path = cfg.io.data_path
    if not path:
        raise ConfigError("no dataset: set io.data_path in the config")
    if not Path(path).exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    return load_dataset(path)


def _out_dir(cfg: cfgmod.RunConfig, out_flag) -> Path:
    out = Path(out_flag) if out_flag else Path(cfg.io.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _threads(flag) -> int:
    if flag is not None:
        return int(flag)
    env = os.environ.get("RKHS_SGD_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


@click.group()
def cli():
    """Kernel-space projected SGD: exact oracle and convergence studies."""


@cli.command("gen-data")
@click.option("--n", type=int, required=True, help="number of data points")
@click.option("--d", type=int, required=True, help="input dimension")
@click.option("--m", type=int, default=1, show_default=True, help="output dimension")
@click.option("--noise-sd", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="output CSV path")
def cmd_gen_data(n, d, m, noise_sd, seed, out):
    """Generate a synthetic dataset CSV."""
    data = generate_dataset(n, d, m, noise_sd, seed)
    save_dataset(data, out)
    click.echo(f"wrote {data.n} rows (d={d}, m={m}) to {out}")


@cli.command("exact")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None, help="output directory")
def cmd_exact(config_path, out):
    """Solve for the exact minimizer and write it as an expansion CSV."""
    cfg = _load(config_path)
    data = _dataset(cfg)
    spec = cfgmod.kernel_spec(cfg, data.dim)
    w = obj.MixtureWeights(q=cfg.problem.q, n=data.n)
    sol = exact.solve(spec, data, w, radius=cfg.problem.radius)
    out_dir = _out_dir(cfg, out)
    fn.save_expansion(sol.fstar, out_dir / "fstar.csv", out_dir / "fstar.meta")
    fstar_norm = math.sqrt(fn.norm_sq(sol.fstar))
    click.echo(f"residual_norm={sol.residual_norm!r}")
    click.echo(f"fstar_norm={fstar_norm!r}")
    click.echo(f"loss_total={obj.loss_total(sol.fstar, data, w)!r}")
    click.echo(f"bound_term={obj.bound_term(sol.fstar, data, w)!r}")
    click.echo(f"constrained_ok={sol.constrained_ok}")
    with open(out_dir / "fstar.meta", "a", newline="\n") as fh:
        fh.write(f"residual_norm={sol.residual_norm!r}\n")
        fh.write(f"constrained_ok={sol.constrained_ok}\n")
    tol = RESIDUAL_TOL * (1.0 + float(max(abs(data.labels).max(), 0.0)))
    if sol.residual_norm > tol:
        raise NumericsError(
            f"oracle residual {sol.residual_norm} above tolerance {tol}"
        )


@cli.command("sgd")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--oracle", "oracle_path", type=click.Path(), default=None,
              help="expansion CSV of the exact minimizer (.meta sidecar expected)")
@click.option("--out", type=click.Path(), default=None, help="output directory")
def cmd_sgd(config_path, seed, steps, oracle_path, out):
    """Run a single SGD trajectory and write it as CSV."""
    cfg = _load(config_path)
    data = _dataset(cfg)
    spec = cfgmod.kernel_spec(cfg, data.dim)
    scfg = cfgmod.sgd_config(cfg, data.n)
    if seed is not None:
        scfg = dataclasses.replace(scfg, seed=seed)
    if steps is not None:
        scfg = dataclasses.replace(scfg, steps=steps)
    oracle = None
    if oracle_path:
        meta = Path(oracle_path).with_suffix(".meta")
        oracle = fn.load_expansion(oracle_path, meta)
    consts = obj.constants(scfg.weights, spec)
    schedule = sgdmod.make_schedule(consts, scfg.operator.rho, scfg.s)
    click.echo(f"b={schedule.b!r}")
    click.echo(f"eta_1={schedule.eta(1)!r}")
    traj = sgdmod.run(scfg, data, spec, oracle=oracle)
    out_dir = _out_dir(cfg, out)
    col = traj.kind
    lines = [f"k,{col}"]
    for k, val in zip(traj.ks, traj.values):
        lines.append(f"{int(k)},{float(val)!r}")
    path = out_dir / "trajectory.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    click.echo(f"wrote {path}")


@cli.command("study")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="output directory")
def cmd_study(config_path, seed, steps, trials, threads, out):
    """Monte-Carlo convergence study against the exact minimizer."""
    cfg = _load(config_path)
    data = _dataset(cfg)
    spec = cfgmod.kernel_spec(cfg, data.dim)
    scfg = cfgmod.sgd_config(cfg, data.n)
    if seed is not None:
        scfg = dataclasses.replace(scfg, seed=seed)
    if steps is not None:
        scfg = dataclasses.replace(scfg, steps=steps)
    study_cfg = experiment.StudyConfig(
        sgd=scfg,
        trials=trials if trials is not None else cfg.study.trials,
        tail_fraction=cfg.study.tail_fraction,
    )
    record = experiment.run_study(study_cfg, data, spec, threads=_threads(threads))
    out_dir = _out_dir(cfg, out)
    experiment.write_curve_csv(record, out_dir / "study.csv")
    experiment.write_summary(
        record,
        out_dir / "summary.txt",
        extra={
            "seed": scfg.seed,
            "trials": study_cfg.trials,
            "steps": scfg.steps,
            "q": scfg.weights.q,
            "radius": scfg.radius,
            "s": scfg.s,
            "operator": scfg.operator.kind,
            "kernel": f"{spec.family}:{spec.bandwidth}",
        },
    )
    click.echo(f"slope={record.slope!r} ci={record.slope_ci!r}")
    click.echo(f"bound_scale={record.bound_scale!r}")
    click.echo(f"wrote {out_dir / 'study.csv'} and {out_dir / 'summary.txt'}")
    if not cfg.study.slope_min <= record.slope <= cfg.study.slope_max:
        raise AcceptanceError(
            f"fitted slope {record.slope} outside "
            f"[{cfg.study.slope_min}, {cfg.study.slope_max}]"
        )


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except (InputError, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except (NumericsError, AcceptanceError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
