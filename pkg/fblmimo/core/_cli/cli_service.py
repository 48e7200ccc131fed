import io
import math
import os
import sys
from typing import List, Optional

from fblmimo.constants import MC_TARGET
from fblmimo.core._config.config import config_init
from fblmimo.core._config.constants import CONFIG_FILE_NAME
from fblmimo.dispersion import (
    EmendationParams,
    dispersion_mean,
    emendation_defaults,
    inv_eigen_sum_mean,
    variance_terms,
)
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.randmat import AntennaConfig, mp_stieltjes_mean
from fblmimo.rate import highsnr_capacity_mean
from fblmimo.sweep import SweepSpec, write_csv


def make_init(folder: str):
    """Makes the config.ini"""
    os.makedirs(folder, exist_ok=True)
    path = f"{folder}/{CONFIG_FILE_NAME}"
    if os.path.exists(path):
        return False, "Config file already exists"
    try:
        config_init(path)
    except (ValueError, OSError) as e:
        return None, f"Could not create config file: {e!r}"
    return True, None


def resolve_rho(snr_db: Optional[float], snr_linear: Optional[float]) -> float:
    """Linear SNR from exactly one of the dB and linear flags"""
    DomainError.check(
        (snr_db is None) != (snr_linear is None),
        "pass exactly one of --snr-db and --snr-linear",
    )
    if snr_linear is not None:
        rho = snr_linear
    else:
        DomainError.check(math.isfinite(snr_db), f"--snr-db must be finite, got {snr_db!r}")
        rho = 10.0 ** (snr_db / 10.0)
    DomainError.check(rho > 0 and math.isfinite(rho), f"SNR must be a positive finite number, got rho={rho!r}")
    return rho


def resolve_rho_db(snr_db: Optional[float], snr_linear: Optional[float], default_db: float) -> float:
    """SNR in dB for sweep specs, `default_db` when neither flag is passed"""
    if snr_db is None and snr_linear is None:
        snr_db = default_db
    rho = resolve_rho(snr_db, snr_linear)
    return snr_db if snr_db is not None else 10.0 * math.log10(rho)


def resolve_emendation(psi: Optional[float], xi: Optional[float]) -> Optional[EmendationParams]:
    DomainError.check((psi is None) == (xi is None), "psi and xi go together, pass both or neither")
    if psi is None:
        return None
    return EmendationParams(psi=psi, xi=xi)


def closed_value(
        target: MC_TARGET,
        cfg: AntennaConfig,
        rho: float,
        em: Optional[EmendationParams] = None,
        square_convention: bool = False,
) -> Optional[float]:
    """Analytic counterpart of a Monte-Carlo target, None when there is none"""
    if target is MC_TARGET.SHIFTED_INV_SUM:
        return mp_stieltjes_mean(cfg, rho)
    if target is MC_TARGET.DISPERSION:
        return dispersion_mean(cfg, rho).mean
    if target is MC_TARGET.INV_EIGEN_SUM:
        return inv_eigen_sum_mean(cfg, square_convention)
    if target is MC_TARGET.CAPACITY:
        return highsnr_capacity_mean(cfg, rho)
    if target in (MC_TARGET.G1, MC_TARGET.G2, MC_TARGET.G3, MC_TARGET.G4):
        if em is None:
            # G1 and G3 do not depend on the emendation parameters
            needs_em = target in (MC_TARGET.G2, MC_TARGET.G4)
            em = emendation_defaults(rho) if needs_em else EmendationParams(psi=1.0, xi=1.0)
        return getattr(variance_terms(cfg, rho, em), target.value)
    return None


def run_sweep(specs: List[SweepSpec], out: Optional[str], log: bool = False):
    """Write the sweep to `out` (stdout when None), nothing is written unless every row is computed"""
    for spec in specs:
        spec.validate()
    buffer = io.StringIO(newline="")
    count = write_csv(specs, buffer, log)
    if out is None:
        sys.stdout.write(buffer.getvalue())
        return True, f"{count} rows written"
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(buffer.getvalue())
    return True, f"{count} rows written to {out!r}"
