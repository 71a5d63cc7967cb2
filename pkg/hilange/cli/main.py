"""Hilange command line.

Exit codes: 0 success, 1 error, 2 success with warnings (unstable system,
growing truncation error, failed verification entries).
"""
import json
import logging
import os

import click

from hilange.assembler import check_stability
from hilange.cli.config import load_config
from hilange.constants import configure_logging
from hilange.exceptions import HilangeException
from hilange.models import build_model
from hilange.spectral import output_spectra
from hilange.timedomain import SdeRun, integrate_sde, truncation_convergence
from hilange.utilities import encode_complex, parse_assignment
from hilange.verify import run_verification
from hilange.version import version

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNING = 2

_logger = logging.getLogger(__name__)


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2, default=str)
        handle.write("\n")


def _stability_payload(report):
    return {
        "eigenvalues": encode_complex(report.eigenvalues),
        "max_real": report.max_real,
        "tolerance": report.tolerance,
        "stable": report.stable,
    }


def _load(ctx):
    options = ctx.obj
    tolerances = [parse_assignment(text) for text in options["tolerance"]]
    config = load_config(options["config"], options["seed"], options["out"], tolerances)
    os.makedirs(config.out, exist_ok=True)
    return config


def _run(ctx, action):
    """Run an action and leave with its exit code."""
    try:
        code = action(_load(ctx))
    except HilangeException as exc:
        click.echo(str(exc), err=True)
        code = EXIT_ERROR
    except OSError as exc:
        click.echo(f"Hilange Error: [Output] {exc}", err=True)
        code = EXIT_ERROR
    ctx.exit(code)


def run_options(func):
    """Attach the options shared by every command."""
    func = click.option(
        "--tolerance",
        multiple=True,
        metavar="K=V",
        help="Override an entry of the tolerance section",
    )(func)
    func = click.option("--seed", type=int, default=None, help="Override the config seed")(func)
    func = click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory")(func)
    func = click.option("--config", type=click.Path(dir_okay=False), default=None, help="JSON run document")(func)
    return func


def _store(ctx, config, out, seed, tolerance):
    ctx.obj.update({"config": config, "out": out, "seed": seed, "tolerance": tolerance})


@click.group("hilange")
@click.version_option(version.short(), prog_name="hilange")
@click.option("--verbose", is_flag=True, help="Run with debug logs enabled for hilange")
@click.pass_context
def cli(ctx, verbose):
    """Higher-order operator truncation of quantum Langevin equations."""
    configure_logging(verbose)
    ctx.obj = {"verbose": verbose}


@cli.command("spectrum")
@run_options
@click.pass_context
def spectrum(ctx, config, out, seed, tolerance):
    """Write the output spectra of a catalog model."""
    _store(ctx, config, out, seed, tolerance)

    def action(cfg):
        system = build_model(cfg.model, cfg.params)
        report = check_stability(system, cfg.tolerance.get("stability"))
        result = output_spectra(report.system, cfg.catalog(), cfg.grid)
        result.to_csv(os.path.join(cfg.out, "spectrum.csv"))
        metadata = dict(result.metadata, seed=cfg.seed, stable=report.stable, config=cfg.document)
        _write_json(os.path.join(cfg.out, "spectrum.json"), metadata)
        _write_json(os.path.join(cfg.out, "stability.json"), _stability_payload(report))
        with open(os.path.join(cfg.out, "system.json"), "w", encoding="utf-8") as handle:
            handle.write(report.system.to_json())
            handle.write("\n")
        click.echo(f"{cfg.model}: {system.size} elements on {cfg.grid.count} points -> {cfg.out}")
        if not report.stable:
            click.echo(f"warning: unstable system, max Re(eig) = {report.max_real:.3e}", err=True)
            return EXIT_WARNING
        return EXIT_OK

    _run(ctx, action)


@cli.command("timeseries")
@run_options
@click.pass_context
def timeseries(ctx, config, out, seed, tolerance):
    """Integrate a stochastic ensemble or the diode convergence study."""
    _store(ctx, config, out, seed, tolerance)

    def action(cfg):
        diode = cfg.diode
        if diode["orders"]:
            table = truncation_convergence(
                diode["orders"],
                cfg.params,
                waveform=diode["waveform"],
                dt=diode["dt"],
                horizon=diode["horizon"],
                coupling=diode["coupling"],
            )
            table.to_csv(os.path.join(cfg.out, "convergence.csv"))
            payload = dict(table.metadata, coupling=table.coupling, non_increasing=table.is_non_increasing())
            _write_json(os.path.join(cfg.out, "convergence.json"), payload)
            click.echo(f"diode orders {list(table.orders)} -> {cfg.out}")
            if not table.is_non_increasing():
                click.echo("warning: truncation error grows with the order", err=True)
                return EXIT_WARNING
            return EXIT_OK
        sde = cfg.sde
        system = build_model(cfg.model, cfg.params)
        report = check_stability(system, cfg.tolerance.get("stability"))
        run = SdeRun(
            report.system,
            sde["dt"],
            sde["horizon"],
            trajectories=sde["trajectories"],
            seed=cfg.seed,
            noise_scale=sde["noise_scale"],
            waveform=sde["waveform"],
        )
        result = integrate_sde(run)
        result.to_csv(os.path.join(cfg.out, "timeseries.csv"))
        _write_json(os.path.join(cfg.out, "timeseries.json"), dict(result.metadata, stable=report.stable))
        _write_json(os.path.join(cfg.out, "stability.json"), _stability_payload(report))
        click.echo(f"{cfg.model}: {run.trajectories} trajectories over {run.steps} steps -> {cfg.out}")
        if not report.stable:
            click.echo(f"warning: unstable system, max Re(eig) = {report.max_real:.3e}", err=True)
            return EXIT_WARNING
        return EXIT_OK

    _run(ctx, action)


@cli.command("verify")
@run_options
@click.pass_context
def verify(ctx, config, out, seed, tolerance):
    """Check the golden tables, closure scans and spectral identities."""
    _store(ctx, config, out, seed, tolerance)

    def action(cfg):
        report = run_verification(cfg.tolerance)
        with open(os.path.join(cfg.out, "verify.json"), "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
            handle.write("\n")
        counts = report.counts()
        click.echo(" ".join(f"{status}={count}" for status, count in counts.items()))
        for entry in report.deviations:
            click.echo(f"deviates {entry.table} {entry.name}: engine {entry.engine}")
        for entry in report.failures:
            click.echo(f"fail {entry.table} {entry.name}: {entry.detail or entry.engine}", err=True)
        return EXIT_WARNING if report.failures else EXIT_OK

    _run(ctx, action)


def main():
    """Run the console script."""
    cli(obj={})  # pylint: disable=no-value-for-parameter


if __name__ == "__main__":
    main()
