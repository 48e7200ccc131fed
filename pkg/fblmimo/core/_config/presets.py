from typing import List

from fblmimo.constants import SWEEP_METHOD, SWEEP_QUANTITY, EMENDATION_TABLE
from fblmimo.sweep import SweepSpec

RHO_DB_AXIS = dict(variable="rho_db", start=0.0, stop=20.0, step=2.0)
AXIS_NOTE = "axis range chosen by fblmimo, no reference values exist for it"


def shifted_sum_wide(**common) -> List[SweepSpec]:
    return [SweepSpec(SWEEP_QUANTITY.SHIFTED_INV_SUM, SWEEP_METHOD.BOTH, M=8, N=16, **RHO_DB_AXIS, **common)]


def shifted_sum_tall(**common) -> List[SweepSpec]:
    return [SweepSpec(SWEEP_QUANTITY.SHIFTED_INV_SUM, SWEEP_METHOD.BOTH, M=16, N=8, **RHO_DB_AXIS, **common)]


def bound_mean_wide(**common) -> List[SweepSpec]:
    return [SweepSpec(SWEEP_QUANTITY.DISPERSION_BOUND, SWEEP_METHOD.BOTH, M=8, N=16, **RHO_DB_AXIS, **common)]


def dispersion_wide(**common) -> List[SweepSpec]:
    return [SweepSpec(SWEEP_QUANTITY.DISPERSION_MEAN, SWEEP_METHOD.BOTH, M=8, N=16, **RHO_DB_AXIS, **common)]


def dispersion_tall(**common) -> List[SweepSpec]:
    return [SweepSpec(SWEEP_QUANTITY.DISPERSION_MEAN, SWEEP_METHOD.BOTH, M=16, N=8, **RHO_DB_AXIS, **common)]


def dispersion_var(**common) -> List[SweepSpec]:
    """One series per calibrated SNR, each with its calibrated (psi, xi)"""
    return [
        SweepSpec(
            SWEEP_QUANTITY.DISPERSION_VAR,
            SWEEP_METHOD.BOTH,
            variable="M",
            start=6,
            stop=128,
            step=2,
            N=4,
            rho_db=snr_db,
            psi=psi,
            xi=xi,
            **common,
        )
        for snr_db, (psi, xi) in EMENDATION_TABLE.items()
    ]


def blocklength_dof(**common) -> List[SweepSpec]:
    return [
        SweepSpec(
            SWEEP_QUANTITY.BLOCKLENGTH,
            SWEEP_METHOD.HIGH_SNR,
            variable="m",
            start=1,
            stop=64,
            step=1,
            rho_db=15.0,
            epsilon=1e-7,
            **common,
        )
    ]


__presets = {
    "shifted-sum-wide": shifted_sum_wide,
    "shifted-sum-tall": shifted_sum_tall,
    "bound-mean-wide": bound_mean_wide,
    "dispersion-wide": dispersion_wide,
    "dispersion-tall": dispersion_tall,
    "dispersion-var": dispersion_var,
    "blocklength-dof": blocklength_dof,
}

PRESET_NAMES = tuple(__presets)
# --figure numbers, in preset order
FIGURES = dict(enumerate(PRESET_NAMES, start=1))


def from_preset(preset_name: str, **common) -> List[SweepSpec]:
    """
    Sweep specs of a named preset. `common` carries the run settings
    (trials, seed, workers, rate_fraction) shared by every spec.
    """
    if preset_name not in __presets:
        raise ValueError(f"Unknown preset {preset_name}")
    specs = __presets[preset_name](**common)
    for spec in specs:
        spec.preset = preset_name
        if spec.variable != "m" and spec.quantity is not SWEEP_QUANTITY.DISPERSION_VAR:
            spec.notes.append(AXIS_NOTE)
    if preset_name == "dispersion-var":
        specs[0].notes.append("M range 6..128 chosen by fblmimo; N=4, calibrated psi and xi per SNR")
    return specs
