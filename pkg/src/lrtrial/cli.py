"""Operator command line: design calibration, simulation, conversion,
terminal monitoring, and the HTTP service.

All randomized subcommands default to the fixed seed DEFAULT_SEED rather
than wall-clock entropy, so repeated runs with the same flags produce
byte-identical output.

Monitor exit codes: 10 stop-high, 11 stop-low, 12 stop-max-n,
3 input ended before the trial stopped.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from .engine import (
    DesignError,
    StopKind,
    TrialDesign,
    TrialStatus,
    add_observation,
    confidence_interval,
    new_trial,
)
from .evidence import directional_lr
from .reports import (
    design_report,
    design_to_table,
    format_lr,
    summary_to_csv,
    summary_to_json_dict,
    summary_to_table,
    sweep_to_csv,
)
from .simulate import (
    NormalEffect,
    PointMassEffect,
    SimulationConfig,
    run_batch,
    sweep_mean_n,
)

DEFAULT_SEED = 1729

EXIT_STOP_HIGH = 10
EXIT_STOP_LOW = 11
EXIT_STOP_MAX_N = 12
EXIT_INCOMPLETE = 3

_MONITOR_EXIT_CODES = {
    TrialStatus.STOPPED_HIGH: EXIT_STOP_HIGH,
    TrialStatus.STOPPED_LOW: EXIT_STOP_LOW,
    TrialStatus.STOPPED_MAX_N: EXIT_STOP_MAX_N,
}


def _build_design(delta: float, z_crit: float, lr_upper: float, lr_lower: float) -> TrialDesign:
    try:
        return TrialDesign(delta=delta, lr_upper=lr_upper, lr_lower=lr_lower, z_crit=z_crit)
    except DesignError as exc:
        raise click.UsageError(str(exc))


def _design_options(fn):
    fn = click.option("--lr-lower", type=float, default=0.05, show_default=True,
                      help="Lower stopping threshold on the directional LR.")(fn)
    fn = click.option("--lr-upper", type=float, default=20.0, show_default=True,
                      help="Upper stopping threshold on the directional LR.")(fn)
    fn = click.option("--z-crit", type=float, default=1.96, show_default=True,
                      help="Critical value for the confidence-interval calibration.")(fn)
    fn = click.option("--delta", type=float, required=True,
                      help="Minimum clinically significant effect size (standardized).")(fn)
    return fn


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


@click.group()
def main() -> None:
    """Sequential likelihood-ratio trial toolkit."""


@main.command("design")
@_design_options
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def cmd_design(delta: float, z_crit: float, lr_upper: float, lr_lower: float, fmt: str) -> None:
    """Calibrate a design: sample-size bounds and stop-threshold equivalents."""
    design = _build_design(delta, z_crit, lr_upper, lr_lower)
    if fmt == "json":
        click.echo(json.dumps(design_report(design), indent=2, sort_keys=True))
    else:
        click.echo(design_to_table(design))


@main.command("simulate")
@_design_options
@click.option("--effect", type=click.Choice(["normal", "point"]), default="normal",
              show_default=True, help="True-effect distribution across trials.")
@click.option("--effect-mean", type=float, default=0.0, show_default=True)
@click.option("--effect-sd", type=float, default=1.0, show_default=True)
@click.option("--effect-theta", type=float, default=0.5,
              help="True effect for --effect point.", show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=10000, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker threads; the summary is identical at any count.")
@click.option("--format", "fmt", type=click.Choice(["table", "json", "csv"]),
              default="table", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the report to a file instead of stdout.")
def cmd_simulate(delta, z_crit, lr_upper, lr_lower, effect, effect_mean, effect_sd,
                 effect_theta, trials, seed, workers, fmt, out) -> None:
    """Monte Carlo run: outcome incidences, folded-LR means, mean sample size."""
    design = _build_design(delta, z_crit, lr_upper, lr_lower)
    if effect == "normal":
        effect_dist = NormalEffect(mean=effect_mean, sd=effect_sd)
    else:
        effect_dist = PointMassEffect(theta=effect_theta)
    config = SimulationConfig(
        design=design, effect_dist=effect_dist, n_trials=trials, master_seed=seed
    )
    summary = run_batch(config, workers=workers)
    if fmt == "json":
        _emit(json.dumps(summary_to_json_dict(summary), indent=2, sort_keys=True), out)
    elif fmt == "csv":
        _emit(summary_to_csv(summary), out)
    else:
        _emit(summary_to_table(summary), out)


@main.command("sweep")
@_design_options
@click.option("--theta-min", type=float, required=True)
@click.option("--theta-max", type=float, required=True)
@click.option("--step", type=float, required=True)
@click.option("--reps", type=click.IntRange(min=1), default=1000, show_default=True,
              help="Replications per grid point.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
def cmd_sweep(delta, z_crit, lr_upper, lr_lower, theta_min, theta_max, step, reps,
              seed, workers, out) -> None:
    """CSV of mean sample size at termination over a grid of true effects."""
    if step <= 0:
        raise click.UsageError("--step must be positive")
    if theta_max < theta_min:
        raise click.UsageError("--theta-max must be >= --theta-min")
    count = int(round((theta_max - theta_min) / step)) + 1
    grid = [theta_min + i * step for i in range(count)]
    if not grid:
        raise click.UsageError("empty theta grid")
    design = _build_design(delta, z_crit, lr_upper, lr_lower)
    points = sweep_mean_n(grid, design, reps, seed, workers=workers)
    _emit(sweep_to_csv(points), out)


@main.command("convert")
@click.option("--z", type=float, default=None,
              help="Standardized effect size (use with --delta-std).")
@click.option("--delta-std", type=float, default=None,
              help="Dividing value in the same standard-error units as --z.")
@click.option("--estimate", type=float, default=None,
              help="Effect estimate (use with --se and --delta).")
@click.option("--se", type=float, default=None, help="Standard error of the estimate.")
@click.option("--delta", type=float, default=None, help="Dividing value for --estimate.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def cmd_convert(z, delta_std, estimate, se, delta, fmt) -> None:
    """Directional LR for a completed (fixed-size) analysis.

    Provide either --z with --delta-std, or --estimate with --se and --delta.
    """
    z_group = [v is not None for v in (z, delta_std)]
    est_group = [v is not None for v in (estimate, se, delta)]
    if all(z_group) and not any(est_group):
        z_val, d_val = z, delta_std
        se_val = 1.0
    elif all(est_group) and not any(z_group):
        if se <= 0:
            raise click.UsageError("--se must be positive")
        z_val, d_val, se_val = estimate, delta, se
    else:
        raise click.UsageError(
            "provide either --z and --delta-std, or --estimate, --se and --delta"
        )
    try:
        lr = directional_lr(z_val, d_val, se_val)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if lr.log_value > 0:
        verdict = "evidence favors a clinically significant effect (above the dividing value)"
    elif lr.log_value < 0:
        verdict = "evidence favors no clinically significant effect (below the dividing value)"
    else:
        verdict = "evidence is neutral between the two sides"
    if fmt == "json":
        click.echo(json.dumps(
            {
                "log_lr": lr.log_value,
                "lr": lr.value,
                "standardized_z": (z_val - d_val) / se_val,
                "interpretation": verdict,
            },
            indent=2, sort_keys=True,
        ))
    else:
        click.echo(f"LR = {format_lr(lr.value)}  (log LR = {lr.log_value:.6f})")
        click.echo(verdict)


@main.command("monitor")
@_design_options
def cmd_monitor(delta, z_crit, lr_upper, lr_lower) -> None:
    """Interactive loop: one observation per stdin line, state after each.

    Exits 10/11/12 for stop-high / stop-low / stop-at-max-n, or 3 when the
    input ends while the trial is still open.  Non-numeric lines are
    skipped with a warning.
    """
    design = _build_design(delta, z_crit, lr_upper, lr_lower)
    click.echo(
        f"monitoring: delta={design.delta:g} thresholds=({design.lr_lower:g}, "
        f"{design.lr_upper:g}) n_min={design.n_min} n_max={design.n_max}"
    )
    state = new_trial(design)
    skipped = 0
    for line_no, line in enumerate(sys.stdin, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            skipped += 1
            click.echo(f"warning: skipping non-numeric line {line_no}: {text!r}", err=True)
            continue
        state = add_observation(state, value)
        assert state.lr is not None
        ci_low, ci_high = confidence_interval(state)
        click.echo(
            f"n={state.n} theta_obs={state.theta_obs:.6g} lr={format_lr(state.lr.value)} "
            f"ci=({ci_low:.6g}, {ci_high:.6g}) status={state.status.value}"
        )
        if state.status in _MONITOR_EXIT_CODES:
            click.echo(f"stopped: {state.status.value} at n={state.n}, "
                       f"final LR {format_lr(state.lr.value)}")
            if skipped:
                click.echo(f"warning: {skipped} non-numeric line(s) skipped", err=True)
            sys.exit(_MONITOR_EXIT_CODES[state.status])
    if skipped:
        click.echo(f"warning: {skipped} non-numeric line(s) skipped", err=True)
    click.echo(f"input ended before stopping: n={state.n} status={state.status.value}")
    sys.exit(EXIT_INCOMPLETE)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True, envvar="LRTRIAL_HOST")
@click.option("--port", type=int, default=8723, show_default=True, envvar="LRTRIAL_PORT")
@click.option("--data-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("./lrtrial-data"), show_default=True, envvar="LRTRIAL_DATA_DIR")
def cmd_serve(host: str, port: int, data_dir: Path) -> None:
    """Run the session HTTP service (event logs under --data-dir)."""
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}")
    finally:
        probe.close()

    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
