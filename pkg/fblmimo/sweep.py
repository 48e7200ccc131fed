"""
Parameter sweeps written as CSV.

A sweep varies one of M, N, m, rho_db or n over an inclusive range and evaluates
one quantity with one or more methods per row. Monte-Carlo cells of row i use the
seed `seed + i`, so every row is reproducible on its own.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, TextIO, Tuple

from fblmimo import __version__
from fblmimo.constants import (
    MC_TARGET,
    SWEEP_METHOD,
    SWEEP_QUANTITY,
    SWEEP_VARIABLES,
    AGREEMENT_REL_TOL,
    VARIANCE_REL_TOL,
    CONFIDENCE_SE,
)
from fblmimo.core._cli.utils import print_log
from fblmimo.dispersion import (
    DispersionStats,
    EmendationParams,
    dispersion_mean,
    dispersion_mean_bound,
    dispersion_mean_highsnr,
    dispersion_variance,
)
from fblmimo.encoder import CsvEncoder
from fblmimo.exceptions.contract_error import ContractError
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.exceptions.validity_error import ValidityError
from fblmimo.mc import McEstimate, estimate
from fblmimo.randmat import AntennaConfig, mp_stieltjes_mean
from fblmimo.rate import (
    LinkParams,
    avg_rate_bound,
    highsnr_capacity_mean,
    highsnr_rate_bound,
    min_blocklength,
)

SUPPORTED_METHODS: Dict[SWEEP_QUANTITY, Tuple[SWEEP_METHOD, ...]] = {
    SWEEP_QUANTITY.SHIFTED_INV_SUM: (SWEEP_METHOD.CLOSED, SWEEP_METHOD.MC),
    SWEEP_QUANTITY.DISPERSION_BOUND: (SWEEP_METHOD.CLOSED, SWEEP_METHOD.MC),
    SWEEP_QUANTITY.DISPERSION_MEAN: (SWEEP_METHOD.CLOSED, SWEEP_METHOD.HIGH_SNR, SWEEP_METHOD.MC),
    SWEEP_QUANTITY.DISPERSION_VAR: (SWEEP_METHOD.CLOSED, SWEEP_METHOD.MC),
    SWEEP_QUANTITY.CAPACITY_MEAN: (SWEEP_METHOD.HIGH_SNR, SWEEP_METHOD.MC),
    SWEEP_QUANTITY.RATE_BOUND: (SWEEP_METHOD.CLOSED, SWEEP_METHOD.HIGH_SNR, SWEEP_METHOD.MC),
    SWEEP_QUANTITY.BLOCKLENGTH: (SWEEP_METHOD.HIGH_SNR,),
}

_INTEGER_VARIABLES = ("M", "N", "m", "n")

FIXED_COLUMNS = ["row", "M", "N", "m", "rho_db", "n", "epsilon"]
TRAILING_COLUMNS = ["validity", "reason", "seed"]


def _column(method: SWEEP_METHOD) -> str:
    return method.value.replace("-", "_")


@dataclass
class SweepSpec:
    quantity: SWEEP_QUANTITY
    method: SWEEP_METHOD
    variable: str
    start: float
    stop: float
    step: float = 1.0
    M: int = 8
    N: int = 4
    rho_db: float = 10.0
    n: int = 200
    epsilon: float = 1e-7
    rate_fraction: float = 0.8
    psi: Optional[float] = None
    xi: Optional[float] = None
    square_convention: bool = False
    trials: int = 100000
    seed: int = 42
    workers: int = 1
    preset: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def validate(self) -> SweepSpec:
        DomainError.check(
            self.variable in SWEEP_VARIABLES,
            f"sweep variable must be one of {', '.join(SWEEP_VARIABLES)}, got {self.variable!r}",
        )
        DomainError.check(self.step > 0, f"sweep step must be positive, got {self.step!r}")
        DomainError.check(
            self.stop >= self.start,
            f"empty sweep range: from {self.start!r} to {self.stop!r}",
        )
        if self.variable in _INTEGER_VARIABLES:
            DomainError.check(
                float(self.start).is_integer() and float(self.step).is_integer(),
                f"{self.variable} takes integer values, got from={self.start!r} step={self.step!r}",
            )
        DomainError.check(
            self.method is SWEEP_METHOD.BOTH or self.method in SUPPORTED_METHODS[self.quantity],
            f"method {self.method.value} is not available for {self.quantity.value} "
            f"(available: {', '.join(m.value for m in SUPPORTED_METHODS[self.quantity])}, both)",
        )
        DomainError.check(0.0 < self.rate_fraction < 1.0, f"rate fraction must lie in (0, 1), got {self.rate_fraction!r}")
        DomainError.check(
            (self.psi is None) == (self.xi is None),
            "psi and xi go together, pass both or neither",
        )
        DomainError.check(self.trials >= 2, f"trials must be >= 2, got {self.trials!r}")
        return self

    @property
    def methods(self) -> Tuple[SWEEP_METHOD, ...]:
        if self.method is not SWEEP_METHOD.BOTH:
            return (self.method,)
        return SUPPORTED_METHODS[self.quantity]

    def values(self) -> List[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        values = [round(self.start + i * self.step, 12) for i in range(count)]
        if self.variable in _INTEGER_VARIABLES:
            return [int(v) for v in values]
        return values

    def point(self, value) -> Dict[str, float]:
        """Parameters of the row at `value`; sweeping m sets M = N = m"""
        params = {"M": self.M, "N": self.N, "rho_db": self.rho_db, "n": self.n}
        if self.variable == "m":
            params["M"] = params["N"] = value
        else:
            params[self.variable] = value
        return params

    def header(self) -> str:
        parts = [
            f"quantity={self.quantity.value}",
            f"method={self.method.value}",
            f"variable={self.variable}",
            f"from={self.start:g}",
            f"to={self.stop:g}",
            f"step={self.step:g}",
            f"M={self.M}",
            f"N={self.N}",
            f"rho_db={self.rho_db:g}",
            f"n={self.n}",
            f"epsilon={self.epsilon:g}",
            f"rate_fraction={self.rate_fraction:g}",
        ]
        if self.psi is not None:
            parts += [f"psi={self.psi:g}", f"xi={self.xi:g}"]
        if self.square_convention:
            parts.append("square_convention=true")
        parts += [f"trials={self.trials}", f"seed={self.seed}"]
        if self.preset:
            parts.append(f"preset={self.preset}")
        return " ".join(parts)


@dataclass
class Cell:
    value: Optional[float] = None
    std_error: Optional[float] = None
    reason: Optional[str] = None
    extra: Dict[str, float] = field(default_factory=dict)


class _Row:
    """Everything one row needs, Monte-Carlo estimates computed at most once"""

    def __init__(self, spec: SweepSpec, index: int, params: Dict[str, float]):
        self.spec = spec
        self.index = index
        self.params = params
        self.cfg = AntennaConfig(M=int(params["M"]), N=int(params["N"]))
        self.rho = 10.0 ** (params["rho_db"] / 10.0)
        self.link = LinkParams(rho=self.rho, epsilon=spec.epsilon, n=int(params["n"]))
        self.seed = spec.seed + index
        self.__estimates: Dict[MC_TARGET, McEstimate] = {}

    def estimate(self, target: MC_TARGET) -> McEstimate:
        if target not in self.__estimates:
            self.__estimates[target] = estimate(
                target, self.cfg, self.rho, self.spec.trials, self.seed, workers=self.spec.workers
            )
        return self.__estimates[target]

    def mc_cell(self, target: MC_TARGET) -> Cell:
        est = self.estimate(target)
        reason = None
        if not est.valid:
            reason = f"{est.rejection_rate:.2%} of the draws rejected"
        elif est.heavy_tailed:
            reason = "heavy-tailed estimate, the mean does not exist for M = N"
        return Cell(value=est.mean, std_error=est.std_error, reason=reason)

    @property
    def emendation(self) -> Optional[EmendationParams]:
        if self.spec.psi is None:
            return None
        return EmendationParams(psi=self.spec.psi, xi=self.spec.xi)


def _stats_cell(stats) -> Cell:
    return Cell(value=stats.mean, reason=None if stats.valid else stats.validity)


def _closed(row: _Row) -> Cell:
    quantity, cfg, rho = row.spec.quantity, row.cfg, row.rho
    if quantity is SWEEP_QUANTITY.SHIFTED_INV_SUM:
        return Cell(value=mp_stieltjes_mean(cfg, rho))
    if quantity is SWEEP_QUANTITY.DISPERSION_BOUND:
        return _stats_cell(dispersion_mean_bound(cfg, rho, row.spec.square_convention))
    if quantity is SWEEP_QUANTITY.DISPERSION_MEAN:
        return _stats_cell(dispersion_mean(cfg, rho))
    if quantity is SWEEP_QUANTITY.DISPERSION_VAR:
        stats = dispersion_variance(cfg, rho, row.emendation)
        return Cell(value=stats.variance, reason=None if stats.valid else stats.validity)
    if quantity is SWEEP_QUANTITY.RATE_BOUND:
        # the only finite-M mean capacity is the simulated one
        disp = dispersion_mean(cfg, rho)
        bound = avg_rate_bound(cfg, row.link, disp, row.estimate(MC_TARGET.CAPACITY).mean)
        return Cell(value=bound.r_bar, reason=None if disp.valid else disp.validity)
    raise DomainError(f"no closed form for {quantity.value}")


def _high_snr(row: _Row) -> Cell:
    quantity, cfg, rho = row.spec.quantity, row.cfg, row.rho
    if quantity is SWEEP_QUANTITY.DISPERSION_MEAN:
        return _stats_cell(dispersion_mean_highsnr(cfg, rho))
    if quantity is SWEEP_QUANTITY.CAPACITY_MEAN:
        return Cell(value=highsnr_capacity_mean(cfg, rho))
    if quantity is SWEEP_QUANTITY.RATE_BOUND:
        return Cell(value=highsnr_rate_bound(cfg, row.link).r_bar)
    if quantity is SWEEP_QUANTITY.BLOCKLENGTH:
        r_bar = row.spec.rate_fraction * highsnr_capacity_mean(cfg, rho)
        solution = min_blocklength(cfg.m, rho, row.spec.epsilon, r_bar)
        return Cell(value=solution.n, extra={"n_real": solution.n_real, "r_bar": r_bar})
    raise DomainError(f"no high-SNR form for {quantity.value}")


def _mc(row: _Row) -> Cell:
    quantity = row.spec.quantity
    if quantity is SWEEP_QUANTITY.SHIFTED_INV_SUM:
        return row.mc_cell(MC_TARGET.SHIFTED_INV_SUM)
    if quantity in (SWEEP_QUANTITY.DISPERSION_BOUND, SWEEP_QUANTITY.DISPERSION_MEAN):
        return row.mc_cell(MC_TARGET.DISPERSION)
    if quantity is SWEEP_QUANTITY.DISPERSION_VAR:
        return Cell(value=row.estimate(MC_TARGET.DISPERSION).variance)
    if quantity is SWEEP_QUANTITY.CAPACITY_MEAN:
        return row.mc_cell(MC_TARGET.CAPACITY)
    if quantity is SWEEP_QUANTITY.RATE_BOUND:
        disp = row.estimate(MC_TARGET.DISPERSION)
        cap = row.estimate(MC_TARGET.CAPACITY)
        bound = avg_rate_bound(row.cfg, row.link, DispersionStats(mean=disp.mean), cap.mean)
        return Cell(value=bound.r_bar)
    raise DomainError(f"no Monte-Carlo estimate for {quantity.value}")


_COMPUTE = {
    SWEEP_METHOD.CLOSED: _closed,
    SWEEP_METHOD.HIGH_SNR: _high_snr,
    SWEEP_METHOD.MC: _mc,
}


def _evaluate(row: _Row, method: SWEEP_METHOD) -> Cell:
    try:
        return _COMPUTE[method](row)
    except ValidityError as e:
        return Cell(reason=str(e))


def _agrees(analytic: Cell, mc: Cell, rel_tol: float) -> Optional[bool]:
    if analytic.value is None or mc.value is None:
        return None
    tolerance = max(rel_tol * abs(analytic.value), CONFIDENCE_SE * (mc.std_error or 0.0))
    return abs(analytic.value - mc.value) <= tolerance


def columns(spec: SweepSpec) -> List[str]:
    names = list(FIXED_COLUMNS)
    for method in spec.methods:
        names.append(_column(method))
        if method is SWEEP_METHOD.MC and spec.quantity is not SWEEP_QUANTITY.DISPERSION_VAR:
            names.append("mc_std_error")
    if spec.quantity is SWEEP_QUANTITY.BLOCKLENGTH:
        names += ["n_real", "r_bar"]
    if SWEEP_METHOD.MC in spec.methods:
        names += [f"{_column(method)}_agrees" for method in spec.methods if method is not SWEEP_METHOD.MC]
    return names + TRAILING_COLUMNS


def _row(spec: SweepSpec, index: int, value) -> dict:
    params = spec.point(value)
    row = _Row(spec, index, params)
    out = {
        "row": index,
        "M": row.cfg.M,
        "N": row.cfg.N,
        "m": row.cfg.m,
        "rho_db": params["rho_db"],
        "n": row.link.n,
        "epsilon": spec.epsilon,
    }
    cells = {method: _evaluate(row, method) for method in spec.methods}
    for method, cell in cells.items():
        out[_column(method)] = cell.value
        if method is SWEEP_METHOD.MC and spec.quantity is not SWEEP_QUANTITY.DISPERSION_VAR:
            out["mc_std_error"] = cell.std_error
        out.update(cell.extra)

    if SWEEP_METHOD.MC in cells:
        rel_tol = VARIANCE_REL_TOL if spec.quantity is SWEEP_QUANTITY.DISPERSION_VAR else AGREEMENT_REL_TOL
        for method, cell in cells.items():
            if method is not SWEEP_METHOD.MC:
                out[f"{_column(method)}_agrees"] = _agrees(cell, cells[SWEEP_METHOD.MC], rel_tol)

    reasons = [f"{method.value}: {cell.reason}" for method, cell in cells.items() if cell.reason]
    out["validity"] = "invalid" if reasons else "ok"
    out["reason"] = "; ".join(reasons) or None
    out["seed"] = row.seed if SWEEP_METHOD.MC in cells or spec.quantity is SWEEP_QUANTITY.RATE_BOUND else None
    return out


def rows(specs: Iterable[SweepSpec], log: bool = False) -> Iterator[dict]:
    """Rows of all specs in sweep order, numbered across specs"""
    index = 0
    for spec in specs:
        spec.validate()
        for value in spec.values():
            result = _row(spec, index, value)
            if log:
                print_log(f"[sweep {spec.quantity.value}] row {index}: {spec.variable}={value} {result['validity']}")
            yield result
            index += 1


def write_csv(specs: List[SweepSpec], out: TextIO, log: bool = False) -> int:
    """Write the sweep to `out`; returns the number of data rows"""
    DomainError.check(len(specs) > 0, "nothing to sweep")
    for spec in specs:
        spec.validate()
    first = specs[0]
    ContractError.check(
        all((s.quantity, s.methods) == (first.quantity, first.methods) for s in specs),
        "specs written to one file must share quantity and methods",
    )
    header = columns(first)
    encoder = CsvEncoder()

    out.write(f"# fblmimo {__version__} sweep\n")
    for spec in specs:
        out.write(f"# {spec.header()}\n")
        for note in spec.notes:
            out.write(f"# note: {note}\n")

    writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    count = 0
    for row in rows(specs, log):
        writer.writerow(encoder.encode_row(row))
        count += 1
    return count
