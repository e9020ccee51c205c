"""Command line driver for forward solves, trace sums, inversion and sweeps."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from spectrace.experiments import (
    EXAMPLES,
    ExperimentConfig,
    reproduce as run_reproduce,
    run_forward,
    run_invert,
    run_table,
    run_traces,
)
from spectrace.forward import NoiseModel
from spectrace.inversion import l2_error


def _common_options(f):
    opts = [
        click.option("--config", type=click.Path(exists=True), default=None,
                     help="JSON experiment configuration."),
        click.option("--example", type=click.Choice(sorted(EXAMPLES) + ["custom"]),
                     default=None, help="Stock damping profile."),
        click.option("--seed", type=int, default=None, help="Noise RNG seed."),
        click.option("--out", type=click.Path(), default=None,
                     help="Output directory."),
        click.option("--k", type=int, default=None, help="Measured pairs K."),
        click.option("--m", type=int, default=None, help="Cosine modes M."),
        click.option("--j", type=int, default=None, help="Modal truncation J."),
        click.option("--n", type=int, default=None, help="Polynomial degree N."),
        click.option("--k1", type=int, default=None, help="Tail pairs K1."),
        click.option("--delta", type=float, default=None, help="Noise level."),
        click.option("--no-plots", is_flag=True, help="Skip figure rendering."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _build_config(config, example, seed, out, k, m, j, n, k1, delta, no_plots):
    if config is not None:
        cfg = ExperimentConfig.from_json(config)
        if example is not None:
            raise click.UsageError("--example conflicts with --config")
    else:
        cfg = ExperimentConfig(example_id=example or "ex1")

    gn = cfg.gn
    if k is not None:
        gn = replace(gn, k_meas=k)
    if m is not None:
        gn = replace(gn, m_modes=m)
    if j is not None:
        gn = replace(gn, j_trunc=j)
    if n is not None:
        gn = replace(gn, n_polys=n)
    if k1 is not None:
        gn = replace(gn, k_tail=k1)
    cfg.gn = gn

    noise = cfg.noise
    if delta is not None:
        noise = replace(noise, delta=delta)
    if seed is not None:
        noise = replace(noise, seed=seed)
    cfg.noise = noise

    if out is not None:
        cfg.output_dir = Path(out)
    if no_plots:
        cfg.emit_plots = False
    return cfg


@click.group()
def main():
    """Recover a wave-equation damping coefficient from its complex spectrum."""


@main.command()
@_common_options
def forward(**kw):
    """Solve the forward eigenproblem and write the spectrum CSV."""
    cfg = _build_config(**kw)
    path = run_forward(cfg)
    click.echo(f"wrote {path}")


@main.command()
@_common_options
def traces(**kw):
    """Write stabilized trace sums of the (noisy) spectrum as JSON."""
    cfg = _build_config(**kw)
    path = run_traces(cfg)
    click.echo(f"wrote {path}")


@main.command()
@click.option("--spectrum", "spectrum_csv", type=click.Path(exists=True),
              default=None, help="Reuse a previously written spectrum CSV.")
@_common_options
def invert(spectrum_csv, **kw):
    """Recover cosine coefficients; write run JSON, plot CSV and figures."""
    cfg = _build_config(**kw)
    run = run_invert(cfg, spectrum_csv=spectrum_csv)
    err = l2_error(run.final, cfg.alpha_true)
    status = "converged" if run.converged else "not converged"
    click.echo(
        f"{status} in {len(run.residual_norms) - 1} iterations, "
        f"residual {run.residual_norms[-1]:.3e}, L2 error {err:.3e}"
    )
    click.echo(f"coefficients: {np.array2string(run.final.coeffs, precision=5)}")


@main.command()
@click.option("--m-values", default="3,4,5,6,7,8", show_default=True,
              help="Comma-separated list of mode counts M.")
@click.option("--k1-values", default="25,50,100,150", show_default=True,
              help="Comma-separated list of K1=J=N values.")
@click.option("--workers", type=int, default=4, show_default=True)
@_common_options
def table(m_values, k1_values, workers, **kw):
    """Sweep (M, K1=J=N) and write the error table CSV."""
    cfg = _build_config(**kw)
    ms = [int(v) for v in m_values.split(",")]
    k1s = [int(v) for v in k1_values.split(",")]
    rows = run_table(cfg, ms, k1s, max_workers=workers)
    for row in rows:
        click.echo(
            f"M={row['M']:3d} K1={row['K1']:4d} "
            f"l2_error={row['l2_error']:.3e} iters={row['iterations']}"
        )
    click.echo(f"wrote {cfg.output_dir / 'table.csv'}")


@main.command()
@click.argument("example", type=click.Choice(sorted(EXAMPLES)))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Output directory (default: ./<example>).")
def reproduce(example, seed, out):
    """Run a stock example end to end with its preset parameters."""
    out_dir = Path(out) if out is not None else Path(example)
    run = run_reproduce(example, out_dir, seed=seed)
    click.echo(
        f"{example}: {'converged' if run.converged else 'not converged'} "
        f"in {len(run.residual_norms) - 1} iterations, "
        f"residual {run.residual_norms[-1]:.3e}"
    )
    click.echo(f"outputs in {out_dir}")


if __name__ == "__main__":
    main()
