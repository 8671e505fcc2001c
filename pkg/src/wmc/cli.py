"""Command line interface.

    mc run <experiment> [--config cfg.toml] [--preset desk|paper] [--seed N] [--out results.csv]
    mc certify --pattern omega.pat [--weight w.json] [--json]

Exit codes: 0 success, 2 config error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .errors import CapacityError, ConfigError, NumericalError, WmcError
from .harness import load_config_file, make_config, run_certify, run_experiment

_RUNNABLE = ("real_pattern", "sample_w", "spectral_gap", "proportional")


def _exit_code(exc) -> int:
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, (NumericalError, CapacityError)):
        return 4
    return 3  # remaining toolkit errors and I/O problems are data errors


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (WmcError, OSError, FileNotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code(exc))

    return wrapper


@click.group()
def main():
    """Weighted matrix completion experiments and pattern certification."""


@main.command()
@click.argument("experiment", type=click.Choice(_RUNNABLE))
@click.option("--config", "config_path", type=click.Path(), help="flat TOML config file")
@click.option("--preset", type=click.Choice(["desk", "paper"]), default=None)
@click.option("--seed", type=int, default=None, help="master seed override")
@click.option("--out", type=click.Path(), default=None, help="output CSV path")
@_guarded
def run(experiment, config_path, preset, seed, out):
    """Run one seeded experiment and write its CSV."""
    overrides = {}
    if config_path:
        overrides.update(load_config_file(config_path))
    if seed is not None:
        overrides["master_seed"] = seed
    if out is not None:
        overrides["out"] = out
    cfg = make_config(experiment, preset=preset, **overrides)
    rows = run_experiment(cfg)
    click.echo(f"wrote {len(rows)} rows to {cfg.out}")


@main.command()
@click.option("--pattern", "pattern_path", required=True, type=click.Path(),
              help="native pattern file ('d1 d2 nnz' header then 'i j' pairs)")
@click.option("--weight", "weight_path", type=click.Path(), default=None,
              help="JSON rank-1 weight {left: [...], right: [...]}; default best rank-1 fit")
@click.option("--json", "as_json", is_flag=True, help="print the record as JSON")
@click.option("--rank", type=int, default=1, show_default=True, help="r for the plug-in bounds")
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--sigma", type=float, default=0.0, show_default=True)
@_guarded
def certify(pattern_path, weight_path, as_json, rank, beta, sigma):
    """Compute lambda/mu diagnostics and plug-in bounds for a stored pattern."""
    cfg = make_config(
        "certify",
        pattern_path=pattern_path,
        weight_path=weight_path,
        bound_rank=rank,
        bound_beta=beta,
        bound_sigma=sigma,
    )
    record = run_certify(cfg)
    if as_json:
        click.echo(json.dumps(record, sort_keys=True))
    else:
        for key in sorted(record):
            click.echo(f"{key}: {record[key]}")


if __name__ == "__main__":
    main()
