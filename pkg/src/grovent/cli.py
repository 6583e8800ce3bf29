"""Command-line experiment runner.

One TOML config per experiment; artifacts are written as CSV (optionally
with an SVG line chart).  Exit codes: 0 success, 1 invalid configuration,
2 golden-table failure.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import __version__
from .errors import GroventError, InvalidConfig
from .experiments import (
    load_config,
    peak_artifact,
    run_classify,
    run_delta_curve,
    run_gme_experiment,
    run_nrd,
    run_simulate,
    run_tables,
)

EXIT_OK = 0
EXIT_BAD_CONFIG = 1
EXIT_GOLDEN_FAILURE = 2


def _common(command):
    @functools.wraps(command)
    def guarded(*args, **kwargs):
        # domain errors (bad format, impossible marked set, ...) are
        # configuration problems from the CLI's point of view
        try:
            return command(*args, **kwargs)
        except GroventError as exc:
            click.echo(f"invalid config: {exc}", err=True)
            sys.exit(EXIT_BAD_CONFIG)

    fn = guarded
    fn = click.option(
        "--config",
        "config_path",
        required=True,
        type=click.Path(exists=False),
        help="TOML experiment description",
    )(fn)
    fn = click.option("--out", "out_dir", default=".", help="output directory")(fn)
    fn = click.option("--seed", type=int, default=None, help="override config seed")(fn)
    fn = click.option(
        "--format",
        "out_format",
        type=click.Choice(["csv", "csv+svg"]),
        default=None,
        help="override artifact format",
    )(fn)
    return fn


def _load(config_path, kind, seed, out_format):
    try:
        cfg = load_config(config_path)
        if cfg.kind != kind:
            raise InvalidConfig(
                f"config kind {cfg.kind!r} does not match subcommand {kind!r}"
            )
        updates = {}
        if seed is not None:
            updates["seed"] = seed
        if out_format is not None:
            updates["out_format"] = out_format
        if updates:
            from dataclasses import replace

            cfg = replace(cfg, **updates)
        return cfg
    except InvalidConfig as exc:
        click.echo(f"invalid config: {exc}", err=True)
        sys.exit(EXIT_BAD_CONFIG)


def _basename(config_path) -> str:
    return Path(config_path).stem


@click.group()
@click.version_option(version=__version__, prog_name="grovent")
def main():
    """Grover entanglement experiments."""


@main.command()
@_common
def simulate(config_path, out_dir, seed, out_format):
    """Closed-form Grover coefficients over an iteration range."""
    cfg = _load(config_path, "simulate", seed, out_format)
    artifact = run_simulate(cfg)
    for path in artifact.write(out_dir, _basename(config_path), cfg.out_format):
        click.echo(str(path))


@main.command()
@_common
def classify(config_path, out_dir, seed, out_format):
    """Per-iteration orbit classification plus the generic family orbit."""
    cfg = _load(config_path, "classify", seed, out_format)
    artifact = run_classify(cfg)
    for path in artifact.write(out_dir, _basename(config_path), cfg.out_format):
        click.echo(str(path))


@main.command("delta-curve")
@_common
def delta_curve(config_path, out_dir, seed, out_format):
    """|Delta(psi_k)| (scale-normalised) over an iteration range."""
    cfg = _load(config_path, "delta-curve", seed, out_format)
    artifact = run_delta_curve(cfg)
    for path in artifact.write(out_dir, _basename(config_path), cfg.out_format):
        click.echo(str(path))


@main.command("gme-curve")
@_common
def gme_curve_cmd(config_path, out_dir, seed, out_format):
    """Geometric measure of entanglement E_q(psi_k) over k."""
    cfg = _load(config_path, "gme-curve", seed, out_format)
    artifact, _ = run_gme_experiment(cfg)
    for path in artifact.write(out_dir, _basename(config_path), cfg.out_format):
        click.echo(str(path))


@main.command("peak-scan")
@_common
def peak_scan(config_path, out_dir, seed, out_format):
    """GME curve over 0..k_opt plus peak location and prediction."""
    cfg = _load(config_path, "peak-scan", seed, out_format)
    artifact, peak = run_gme_experiment(cfg)
    base = _basename(config_path)
    paths = artifact.write(out_dir, base, cfg.out_format)
    paths += peak_artifact(cfg, peak).write(out_dir, f"{base}_peak", "csv")
    for path in paths:
        click.echo(str(path))


@main.command()
@_common
def nrd(config_path, out_dir, seed, out_format):
    """Normalised relative dimension of the first secant variety over n."""
    cfg = _load(config_path, "nrd", seed, out_format)
    artifact = run_nrd(cfg.n_max, cfg)
    for path in artifact.write(out_dir, _basename(config_path), cfg.out_format):
        click.echo(str(path))


@main.command()
@_common
def tables(config_path, out_dir, seed, out_format):
    """Reproduce the marked-set/orbit tables and impossibility claims."""
    cfg = _load(config_path, "tables", seed, out_format)
    artifact = run_tables(cfg.table_format, cfg)
    for path in artifact.write(out_dir, _basename(config_path), "csv"):
        click.echo(str(path))
    failures = artifact.metadata.get("failures", 0)
    if failures:
        click.echo(f"{failures} golden-table failures", err=True)
        sys.exit(EXIT_GOLDEN_FAILURE)


if __name__ == "__main__":
    main()
