import functools
import sys
from typing import Optional

import click

import fblmimo.core._cli.cli_service as service
from fblmimo.constants import MC_TARGET, SWEEP_METHOD, SWEEP_QUANTITY, SWEEP_VARIABLES
from fblmimo.core._cli.utils import print_success, print_err, print_fail, print_warning, print_info
from fblmimo.core._config.config import get_setting
from fblmimo.core._config.constants import DEFAULT_CONFIG_FILE_PATH
from fblmimo.core._config.presets import FIGURES, PRESET_NAMES, from_preset
from fblmimo.dispersion import (
    dispersion_mean,
    dispersion_mean_bound,
    dispersion_mean_highsnr,
    dispersion_variance,
)
from fblmimo.encoder import KeyValueEncoder
from fblmimo.exceptions.config_error import ConfigError
from fblmimo.exceptions.contract_error import ContractError
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.exceptions.numeric_error import NumericError
from fblmimo.exceptions.validity_error import ValidityError
from fblmimo.mc import compare, estimate
from fblmimo.randmat import AntennaConfig
from fblmimo.rate import LinkParams, avg_rate_bound, highsnr_capacity_mean, highsnr_rate_bound, min_blocklength
from fblmimo.specfun import q_inv
from fblmimo.sweep import SweepSpec

SWEEP_SNR_DB = 10.0


@click.group()
@click.option("--config", "config_path", default=DEFAULT_CONFIG_FILE_PATH, show_default=True,
              help="Config file holding the [DEFAULT] settings")
@click.pass_context
def main(ctx: click.Context, config_path: str):
    ctx.obj = {"config": config_path}


def print_result(success_msg: str, success: Optional[bool], err_msg: str) -> Optional[bool]:
    if success:
        print_success(success_msg)
    elif success is None:
        print_err(err_msg)
    else:
        print_fail(err_msg)

    return success


def echo_row(row: dict):
    click.echo(KeyValueEncoder().encode_line(row))


def exits_on_error(func):
    """Domain, validity, contract, config and I/O errors exit with 2, numeric failures with 1"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (DomainError, ValidityError, ContractError, ConfigError, OSError) as e:
            print_err(str(e), error_name=type(e).__name__)
            sys.exit(2)
        except NumericError as e:
            print_fail(str(e), failure_name=type(e).__name__)
            sys.exit(1)

    return wrapper


def settings(ctx: click.Context, **flags) -> dict:
    return {key: get_setting(key, flag, ctx.obj["config"]) for key, flag in flags.items()}


def snr_options(func):
    func = click.option("--snr-linear", type=float, default=None, help="Linear SNR rho")(func)
    func = click.option("--snr-db", type=float, default=None, help="SNR in dB")(func)
    return func


def antenna_options(func):
    func = click.option("--N", "rx", type=int, required=True, help="Receive antennas")(func)
    func = click.option("--M", "tx", type=int, required=True, help="Transmit antennas")(func)
    return func


def mc_options(func):
    func = click.option("--log", is_flag=True, default=False, help="Log Monte-Carlo progress")(func)
    func = click.option("--workers", type=int, default=None)(func)
    func = click.option("--seed", type=int, default=None)(func)
    func = click.option("--trials", type=int, default=None)(func)
    return func


@main.command()
@click.argument("folder", default=".")
def init(folder: str):
    """Write a config.ini with the default settings"""
    print_result("Your fblmimo config is ready to go!", *service.make_init(folder))


@main.command(name="q-inv")
@click.option("--epsilon", type=float, required=True)
@exits_on_error
def q_inv_command(epsilon: float):
    """Inverse Gaussian tail function"""
    echo_row({"x": q_inv(epsilon)})


@main.command()
@antenna_options
@snr_options
@click.option("--stat", type=click.Choice(["mean", "var", "bound"]), default="mean", show_default=True)
@click.option("--method", type=click.Choice(["closed", "high-snr", "mc"]), default="closed", show_default=True)
@click.option("--psi", type=float, default=None)
@click.option("--xi", type=float, default=None)
@click.option("--square-convention", is_flag=True, default=False,
              help="Use E{sum 1/lambda} = M - 1 for M = N in the lower-bound mean")
@mc_options
@click.pass_context
@exits_on_error
def dispersion(ctx, tx, rx, snr_db, snr_linear, stat, method, psi, xi, square_convention, trials, seed, workers, log):
    """Mean or variance of the channel dispersion"""
    cfg = AntennaConfig(M=tx, N=rx)
    rho = service.resolve_rho(snr_db, snr_linear)
    em = service.resolve_emendation(psi, xi)

    if method == "mc":
        run = settings(ctx, trials=trials, seed=seed, workers=workers)
        est = estimate(MC_TARGET.DISPERSION, cfg, rho, run["trials"], run["seed"], workers=run["workers"], log=log)
        row = {"mean": est.mean, "std_error": est.std_error}
        if stat == "var":
            row = {"variance": est.variance}
        echo_row({**row, "method": "monte-carlo", "trials": est.trials, "seed": est.seed})
        return

    if stat == "var":
        DomainError.check(method == "closed", "the variance has a closed form only")
        stats = dispersion_variance(cfg, rho, em)
    elif stat == "bound":
        DomainError.check(method == "closed", "the lower-bound mean has a closed form only")
        if square_convention and cfg.square:
            print_warning(f"M = N = {cfg.M}: using E{{sum 1/lambda}} = M - 1, the bound may go negative")
        stats = dispersion_mean_bound(cfg, rho, square_convention)
    elif method == "high-snr":
        stats = dispersion_mean_highsnr(cfg, rho)
    else:
        stats = dispersion_mean(cfg, rho)

    if not stats.valid:
        print_warning(stats.validity)
    row = stats.as_row()
    del row["validity"]
    echo_row(row)


@main.command()
@antenna_options
@snr_options
@click.option("--epsilon", type=float, default=None)
@click.option("--n", "blocklength", type=int, default=None)
@click.option("--method", type=click.Choice(["normal", "high-snr"]), default="normal", show_default=True)
@mc_options
@click.pass_context
@exits_on_error
def rate(ctx, tx, rx, snr_db, snr_linear, epsilon, blocklength, method, trials, seed, workers, log):
    """
    Average maximal achievable rate bound.

    The normal method takes E[V] from the refined closed form and E[C] from Monte-Carlo.
    """
    cfg = AntennaConfig(M=tx, N=rx)
    run = settings(ctx, epsilon=epsilon, blocklength=blocklength)
    link = LinkParams(rho=service.resolve_rho(snr_db, snr_linear), epsilon=run["epsilon"], n=run["blocklength"])

    if method == "high-snr":
        echo_row(highsnr_rate_bound(cfg, link).as_row())
        return

    disp = dispersion_mean(cfg, link.rho)
    if not disp.valid:
        print_warning(disp.validity)
    mc_run = settings(ctx, trials=trials, seed=seed, workers=workers)
    cap = estimate(MC_TARGET.CAPACITY, cfg, link.rho, mc_run["trials"], mc_run["seed"],
                   workers=mc_run["workers"], log=log)
    bound = avg_rate_bound(cfg, link, disp, cap.mean)
    echo_row({**bound.as_row(), "cap_mean": cap.mean, "cap_std_error": cap.std_error, "dispersion_mean": disp.mean})


@main.command()
@click.option("--m", "dof", type=int, required=True, help="Spatial degrees of freedom min(M, N)")
@snr_options
@click.option("--epsilon", type=float, default=None)
@click.option("--rate-fraction", type=float, default=None, help="Target rate as a fraction of m log2(1 + rho)")
@click.option("--rate", "r_bar", type=float, default=None, help="Target rate in bits per channel use")
@click.pass_context
@exits_on_error
def blocklength(ctx, dof, snr_db, snr_linear, epsilon, rate_fraction, r_bar):
    """Smallest blocklength reaching a target rate at high SNR"""
    rho = service.resolve_rho(snr_db, snr_linear)
    DomainError.check(dof >= 1, f"m must be >= 1, got {dof}")
    DomainError.check(rate_fraction is None or r_bar is None, "pass at most one of --rate-fraction and --rate")
    run = settings(ctx, epsilon=epsilon, rate_fraction=rate_fraction)
    if r_bar is None:
        r_bar = run["rate_fraction"] * highsnr_capacity_mean(AntennaConfig(M=dof, N=dof), rho)
    echo_row(min_blocklength(dof, rho, run["epsilon"], r_bar).as_row())


@main.command()
@click.option("--figure", type=click.IntRange(1, len(FIGURES)), default=None, help="Numbered preset sweep")
@click.option("--preset", type=click.Choice(PRESET_NAMES), default=None, help="Named sweep, same as --figure")
@click.option("--var", "variable", type=click.Choice(SWEEP_VARIABLES), default=None)
@click.option("--from", "start", type=float, default=None)
@click.option("--to", "stop", type=float, default=None)
@click.option("--step", type=float, default=1.0, show_default=True)
@click.option("--quantity", type=click.Choice([q.value for q in SWEEP_QUANTITY]), default=None)
@click.option("--method", type=click.Choice([m.value for m in SWEEP_METHOD]), default="both", show_default=True)
@click.option("--M", "tx", type=int, default=8, show_default=True)
@click.option("--N", "rx", type=int, default=4, show_default=True)
@snr_options
@click.option("--n", "blocklength", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--rate-fraction", type=float, default=None)
@click.option("--psi", type=float, default=None)
@click.option("--xi", type=float, default=None)
@click.option("--square-convention", is_flag=True, default=False)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="CSV file, stdout if omitted")
@mc_options
@click.pass_context
@exits_on_error
def sweep(ctx, figure, preset, variable, start, stop, step, quantity, method, tx, rx, snr_db, snr_linear, blocklength,
          epsilon, rate_fraction, psi, xi, square_convention, out, trials, seed, workers, log):
    """Sweep one parameter and write the results as CSV"""
    run = settings(ctx, trials=trials, seed=seed, workers=workers, epsilon=epsilon,
                   blocklength=blocklength, rate_fraction=rate_fraction)
    common = dict(trials=run["trials"], seed=run["seed"], workers=run["workers"], rate_fraction=run["rate_fraction"])

    if figure is not None:
        DomainError.check(preset is None or preset == FIGURES[figure],
                          f"--figure {figure} is the preset {FIGURES[figure]!r}, got --preset {preset}")
        preset = FIGURES[figure]

    if preset is not None:
        specs = from_preset(preset, **common)
    else:
        DomainError.check(
            None not in (variable, start, stop, quantity),
            "a free sweep needs --var, --from, --to and --quantity (or use --figure or --preset)",
        )
        specs = [SweepSpec(
            SWEEP_QUANTITY(quantity),
            SWEEP_METHOD(method),
            variable=variable,
            start=start,
            stop=stop,
            step=step,
            M=tx,
            N=rx,
            rho_db=service.resolve_rho_db(snr_db, snr_linear, SWEEP_SNR_DB),
            n=run["blocklength"],
            epsilon=run["epsilon"],
            psi=psi,
            xi=xi,
            square_convention=square_convention,
            **common,
        )]

    success, msg = service.run_sweep(specs, out, log)
    if out is not None:
        print_result(msg, success, msg)


@main.command()
@click.option("--target", type=click.Choice([t.value for t in MC_TARGET]), required=True)
@antenna_options
@snr_options
@click.option("--compare", "with_closed", is_flag=True, default=False,
              help="Print the closed form next to the estimate and whether they agree")
@click.option("--psi", type=float, default=None)
@click.option("--xi", type=float, default=None)
@click.option("--square-convention", is_flag=True, default=False)
@mc_options
@click.pass_context
@exits_on_error
def mc(ctx, target, tx, rx, snr_db, snr_linear, with_closed, psi, xi, square_convention, trials, seed, workers, log):
    """Monte-Carlo estimate of a channel functional"""
    cfg = AntennaConfig(M=tx, N=rx)
    rho = service.resolve_rho(snr_db, snr_linear)
    target = MC_TARGET(target)
    run = settings(ctx, trials=trials, seed=seed, workers=workers)
    est = estimate(target, cfg, rho, run["trials"], run["seed"], workers=run["workers"], log=log)

    if not est.valid:
        print_warning(f"{est.rejection_rate:.2%} of the draws were rejected, the estimate is not reliable")
    if est.heavy_tailed:
        print_warning(f"{target.value} has no finite mean for M = N, the estimate is heavy-tailed")

    row = est.as_row()
    if with_closed:
        closed = service.closed_value(target, cfg, rho, service.resolve_emendation(psi, xi), square_convention)
        if closed is None:
            print_info(f"{target.value} has no closed form to compare with")
        else:
            check = compare(closed, est)
            row.update(closed=check.closed, agrees=check.agrees, closed_below=check.closed_below)
    echo_row(row)
