"""
Closed-form statistics of the channel dispersion V(H) = m - sum_j 1/(1 + rho*lambda_j/M)^2.

Every closed form here is evaluated term by term as derived; ranges are checked but
never clamped. A value outside [0, m] comes back with `valid=False` and a reason,
a configuration outside the derivation's assumptions raises ValidityError.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from fblmimo.constants import STAT_METHOD, EMENDATION_TABLE, EMENDATION_DB_TOL
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.exceptions.validity_error import ValidityError
from fblmimo.randmat import AntennaConfig, mp_stieltjes_mean
from fblmimo.state import Record

MC_ADVICE = "use the Monte-Carlo method instead"


@dataclass(frozen=True)
class EmendationParams(Record):
    psi: float
    xi: float
    snr_db_anchor: Optional[float] = None

    def __post_init__(self):
        DomainError.check(self.psi > 0 and self.xi > 0, f"psi and xi must be positive, got {self.psi}, {self.xi}")


@dataclass(frozen=True)
class VarianceTerms(Record):
    g1: float
    g2: float
    g3: float
    g4: float

    @property
    def second_moment(self) -> float:
        return self.g1 - 2.0 * self.g2 + self.g3 + self.g4


@dataclass
class DispersionStats(Record):
    mean: float
    variance: Optional[float] = None
    method: STAT_METHOD = STAT_METHOD.CLOSED_FORM
    valid: bool = True
    validity: str = "ok"
    terms: Optional[VarianceTerms] = field(default=None, metadata={"as_row": False})


def _range_checked(cfg: AntennaConfig, mean: float, method: STAT_METHOD, requires: str) -> DispersionStats:
    if 0.0 <= mean <= cfg.m:
        return DispersionStats(mean=mean, method=method, validity=requires)
    return DispersionStats(
        mean=mean,
        method=method,
        valid=False,
        validity=f"mean {mean:.6g} outside [0, m={cfg.m}]; {requires}",
    )


def _check_rho(rho: float):
    DomainError.check(rho > 0 and math.isfinite(rho), f"rho must be a positive finite number, got {rho!r}")


def snr_db(rho: float) -> float:
    return 10.0 * math.log10(rho)


def emendation_defaults(rho: float) -> EmendationParams:
    """Calibrated (psi, xi); only the calibration SNRs have defaults"""
    _check_rho(rho)
    db = snr_db(rho)
    for anchor, (psi, xi) in EMENDATION_TABLE.items():
        if abs(db - anchor) <= EMENDATION_DB_TOL:
            return EmendationParams(psi=psi, xi=xi, snr_db_anchor=anchor)
    calibrated = ", ".join(f"{anchor:g} dB" for anchor in EMENDATION_TABLE)
    raise ValidityError(
        f"emendation_defaults: no calibrated emendation parameters at {db:.4g} dB (calibrated at {calibrated})",
        advice="pass psi and xi explicitly",
    )


def inv_eigen_sum_mean(cfg: AntennaConfig, square_convention: bool = False) -> float:
    """E{sum_i 1/lambda_i}: N/(M-N) for M > N, M/(N-M) for M < N, M-1 for M = N under the extra-antenna convention"""
    if cfg.M > cfg.N:
        return cfg.N / (cfg.M - cfg.N)
    if cfg.M < cfg.N:
        return cfg.M / (cfg.N - cfg.M)
    if not square_convention:
        raise ValidityError(
            f"inv_eigen_sum_mean: E{{sum 1/lambda}} = N / (M - N) has no finite value for M = N = {cfg.M}",
            advice="opt in to the M - 1 convention or use Monte-Carlo",
        )
    return float(cfg.M - 1)


def dispersion_mean_bound(cfg: AntennaConfig, rho: float, square_convention: bool = False) -> DispersionStats:
    """
    Assembled lower bound m - (M/2rho) E{sum 1/lambda} + (M/2rho) E{sum 1/(2M/rho + lambda)},
    i.e. the expectation after dropping the 1 in every denominator.
    """
    _check_rho(rho)
    half = cfg.M / (2.0 * rho)
    mean = cfg.m - half * inv_eigen_sum_mean(cfg, square_convention) + half * mp_stieltjes_mean(cfg, rho)
    requires = "M != N"
    if cfg.square:
        requires = "M = N under the M - 1 convention, may go negative for large M"
    return _range_checked(cfg, mean, STAT_METHOD.LOWER_BOUND, requires)


def dispersion_mean(cfg: AntennaConfig, rho: float) -> DispersionStats:
    """Refined closed form of E[V(H)], one branch for N > M and one for N <= M"""
    _check_rho(rho)
    if cfg.square:
        raise ValidityError(
            f"dispersion_mean: the refined closed form divides by M - N and is undefined for M = N = {cfg.M}",
            advice=MC_ADVICE,
        )
    M, N = float(cfg.M), float(cfg.N)
    cross = math.sqrt(8.0 * rho) * N * M
    if cfg.N > cfg.M:
        root = math.hypot(rho * N * N - rho * M * N + 2.0 * M * N, cross)
        inner = rho * (N * M - N * N) / (4.0 * M * M) - N / (2.0 * M) + root / (4.0 * M * M)
        mean = M - M * M / (2.0 * rho * (N - M)) + M * M / (2.0 * rho * N) * inner
    else:
        root = math.hypot(rho * M * M - rho * M * N + 2.0 * M * N, cross)
        inner = rho * (N * M - M * M) / (4.0 * N * N) - M / (2.0 * N) + root / (4.0 * N * N)
        mean = N - M * N / (2.0 * rho * (M - N)) + N / (2.0 * rho) * inner
    return _range_checked(cfg, mean, STAT_METHOD.CLOSED_FORM, "requires M != N")


def highsnr_correction_ratio(M: int, m: int) -> float:
    """M^3 / ((M-m)^3 - (M-m)), the factor that the high-SNR mean divides by rho^2"""
    d = M - m
    denominator = d ** 3 - d
    DomainError.check(denominator != 0, f"|M - m| must be >= 2, got M={M} m={m}")
    return M ** 3 / denominator


def dispersion_mean_highsnr(cfg: AntennaConfig, rho: float) -> DispersionStats:
    """m - (M^2/rho^2) * NM / ((M-N)^3 - (M-N)); E[V] tends to m as rho grows"""
    _check_rho(rho)
    d = cfg.M - cfg.N
    if abs(d) <= 1:
        raise ValidityError(
            f"dispersion_mean_highsnr: the correction divides by (M - N)^3 - (M - N), "
            f"which vanishes for |M - N| <= 1, got M={cfg.M} N={cfg.N}",
            advice=MC_ADVICE,
        )
    mean = cfg.m - (cfg.M / rho) ** 2 * cfg.N * cfg.M / (d ** 3 - d)
    return _range_checked(cfg, mean, STAT_METHOD.HIGH_SNR, "requires |M - N| >= 2 and rho >> 1")


def _check_variance_region(cfg: AntennaConfig):
    if cfg.M <= cfg.N + 1:
        raise ValidityError(
            f"variance_terms: G1 to G4 need M > N + 1, got M={cfg.M} N={cfg.N}",
            advice=MC_ADVICE,
        )


def variance_terms(cfg: AntennaConfig, rho: float, em: EmendationParams) -> VarianceTerms:
    _check_rho(rho)
    _check_variance_region(cfg)
    M, N = float(cfg.M), float(cfg.N)
    d = M - N
    scale = (M / (2.0 * rho)) ** 2
    root = math.hypot(d + 2.0 * N / rho, math.sqrt(8.0 / rho) * N)
    zeta = 1.0 / (em.psi * N)

    terms = VarianceTerms(
        g1=scale * M * N / (d ** 3 - d),
        g2=zeta * scale * N * N / d * ((N - M) / (4.0 * rho * N) - 0.5 + rho * root / (4.0 * N)),
        g3=scale * N * (N - 1.0) / (d * (d + 1.0)),
        g4=em.xi * (M * (N - M) / (8.0 * N) - M / (4.0 * rho) + M * root / (8.0 * N)) ** 2,
    )
    negative = [name for name, value in terms.as_row().items() if value < 0]
    if negative:
        raise ValidityError(
            f"variance_terms: {', '.join(negative)} are negative at rho={rho:.6g}",
            advice=MC_ADVICE,
            terms=terms,
        )
    return terms


def dispersion_variance(cfg: AntennaConfig, rho: float, em: Optional[EmendationParams] = None) -> DispersionStats:
    """
    sigma_V^2 = (G1 - 2 G2 + G3 + G4) - (m - E[V])^2, with E[V] from the refined mean.

    em defaults to the calibrated parameters, which exist only at 5 dB and 7 dB.
    """
    _check_rho(rho)
    _check_variance_region(cfg)
    if em is None:
        em = emendation_defaults(rho)
    terms = variance_terms(cfg, rho, em)
    mean = dispersion_mean(cfg, rho)
    variance = terms.second_moment - (cfg.m - mean.mean) ** 2
    if variance < 0:
        raise ValidityError(
            f"dispersion_variance: assembled variance {variance:.6g} is negative: emendation parameters "
            f"psi={em.psi:g} xi={em.xi:g} do not apply at rho={rho:.6g}",
            advice=MC_ADVICE,
            terms=terms,
        )
    return DispersionStats(
        mean=mean.mean,
        variance=variance,
        method=STAT_METHOD.CLOSED_FORM,
        valid=mean.valid,
        validity="requires M > N + 1" if mean.valid else mean.validity,
        terms=terms,
    )


@dataclass
class BoundReport(Record):
    passed: bool
    max_ratio: float
    at_M: int
    at_m: int
    checked: int


def correction_ratio_bound_check(M_max: int, limit: float = 13.0) -> BoundReport:
    """
    Check M^3/((M-m)^3 - (M-m)) < limit for every even M in [4, M_max] and m in [1, M/2]
    (whenever the denominator is positive), the bound that keeps the high-SNR correction below 1.
    """
    DomainError.check(M_max >= 4 and M_max % 2 == 0, f"M_max must be an even integer >= 4, got {M_max!r}")
    best, at_M, at_m, checked = -math.inf, 0, 0, 0
    for M in range(4, M_max + 1, 2):
        for m in range(1, M // 2 + 1):
            d = M - m
            if d ** 3 - d <= 0:
                continue
            ratio = highsnr_correction_ratio(M, m)
            checked += 1
            if ratio > best:
                best, at_M, at_m = ratio, M, m
    return BoundReport(passed=best < limit, max_ratio=best, at_M=at_M, at_m=at_m, checked=checked)
