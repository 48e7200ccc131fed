"""
Finite-blocklength rates of one channel realization and of the ensemble.

All rates are in bits per channel use. The normal approximation
R* = C - sqrt(V/n) Q^-1(eps) drops its O(log n / n) remainder, so it is an
approximation of the maximal achievable rate, not a bound on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from fblmimo.constants import RATE_METHOD
from fblmimo.dispersion import DispersionStats
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.exceptions.validity_error import ValidityError
from fblmimo.randmat import AntennaConfig, EigenSample
from fblmimo.specfun import q_inv
from fblmimo.state import Record

_LN2 = math.log(2.0)

Lambdas = Union[EigenSample, np.ndarray]


@dataclass(frozen=True)
class LinkParams(Record):
    rho: float
    epsilon: float
    n: int

    def __post_init__(self):
        DomainError.check(self.rho > 0 and math.isfinite(self.rho), f"rho must be a positive finite number, got {self.rho!r}")
        DomainError.check(0.0 < self.epsilon < 1.0, f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        DomainError.check(int(self.n) == self.n and self.n >= 1, f"blocklength must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


@dataclass
class RealizationMetrics(Record):
    capacity: float
    dispersion: float
    rate_star: float


@dataclass
class RateBound(Record):
    r_bar: float
    method: RATE_METHOD
    m: int = field(metadata={"as_row": False})

    @property
    def normalized(self) -> float:
        return self.r_bar / self.m

    def as_row(self, prefix: str = ""):
        row = super().as_row(prefix)
        row[f"{prefix}normalized"] = self.normalized
        return row


@dataclass
class BlocklengthSolution(Record):
    n: int
    n_real: float


def _as_array(lambdas: Lambdas) -> np.ndarray:
    if isinstance(lambdas, EigenSample):
        return lambdas.lambdas
    return np.asarray(lambdas, dtype=float)


def _scalar_or_array(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def capacity_of(lambdas: Lambdas, cfg: AntennaConfig, rho: float):
    """
    C(H) = sum_j log2(1 + rho lambda_j / M).

    Works on one draw (shape (m,)) or on a batch (shape (count, m)), the sum
    runs over the last axis.
    """
    values = np.sum(np.log1p(rho / cfg.M * _as_array(lambdas)), axis=-1) / _LN2
    return _scalar_or_array(values)


def dispersion_of(lambdas: Lambdas, cfg: AntennaConfig, rho: float):
    """V(H) = m - sum_j 1 / (1 + rho lambda_j / M)^2, same shapes as `capacity_of`"""
    lambdas = _as_array(lambdas)
    values = lambdas.shape[-1] - np.sum((1.0 + rho / cfg.M * lambdas) ** -2, axis=-1)
    return _scalar_or_array(values)


def rate_star(capacity: float, dispersion: float, link: LinkParams) -> float:
    DomainError.check(dispersion >= 0, f"dispersion must be >= 0, got {dispersion!r}")
    return capacity - math.sqrt(dispersion / link.n) * q_inv(link.epsilon)


def realization_metrics(lambdas: Lambdas, cfg: AntennaConfig, link: LinkParams) -> RealizationMetrics:
    capacity = capacity_of(lambdas, cfg, link.rho)
    dispersion = dispersion_of(lambdas, cfg, link.rho)
    return RealizationMetrics(
        capacity=capacity,
        dispersion=dispersion,
        rate_star=rate_star(capacity, dispersion, link),
    )


def highsnr_capacity_mean(cfg: AntennaConfig, rho: float) -> float:
    DomainError.check(rho > 0, f"rho must be positive, got {rho!r}")
    return cfg.m * math.log2(1.0 + rho)


def avg_rate_bound(cfg: AntennaConfig, link: LinkParams, disp: DispersionStats, cap_mean: float) -> RateBound:
    """E[C] - sqrt(E[V]/n) Q^-1(eps), with E[C] supplied by the caller (Monte-Carlo or high-SNR)"""
    DomainError.check(cap_mean >= 0, f"mean capacity must be >= 0, got {cap_mean!r}")
    if disp.mean < 0:
        raise ValidityError(
            f"avg_rate_bound: sqrt(E[V] / n) needs E[V] >= 0, got {disp.mean:.6g} ({disp.validity})",
            advice="use the Monte-Carlo dispersion mean",
        )
    r_bar = cap_mean - math.sqrt(disp.mean / link.n) * q_inv(link.epsilon)
    return RateBound(r_bar=r_bar, method=RATE_METHOD.NORMAL_APPROX, m=cfg.m)


def highsnr_rate_bound(cfg: AntennaConfig, link: LinkParams) -> RateBound:
    """m log2(1 + rho) - sqrt(m/n) Q^-1(eps); R/m depends on m and n only through mn"""
    r_bar = highsnr_capacity_mean(cfg, link.rho) - math.sqrt(cfg.m / link.n) * q_inv(link.epsilon)
    return RateBound(r_bar=r_bar, method=RATE_METHOD.HIGH_SNR, m=cfg.m)


def min_blocklength(m: int, rho: float, epsilon: float, r_bar: float) -> BlocklengthSolution:
    """
    Smallest n with m log2(1 + rho) - sqrt(m/n) Q^-1(eps) >= r_bar.

    The real threshold is m Q^-1(eps)^2 / (m log2(1 + rho) - r_bar)^2; with r_bar a fixed
    fraction of m log2(1 + rho) it falls like 1/m.
    """
    DomainError.check(int(m) == m and m >= 1, f"m must be an integer >= 1, got {m!r}")
    DomainError.check(rho > 0 and math.isfinite(rho), f"rho must be a positive finite number, got {rho!r}")
    DomainError.check(r_bar > 0, f"target rate must be positive, got {r_bar!r}")
    DomainError.check(
        0.0 < epsilon < 0.5,
        f"min_blocklength: m Q^-1(eps)^2 / (m log2(1 + rho) - r_bar)^2 needs epsilon in (0, 0.5), got {epsilon!r}",
    )
    capacity = m * math.log2(1.0 + rho)
    if capacity <= r_bar:
        raise ValidityError(
            f"min_blocklength: target rate {r_bar:.6g} is not below m log2(1 + rho) = {capacity:.6g}, "
            f"no finite blocklength reaches it",
            advice="lower the rate or raise m or the SNR",
        )
    n_real = m * q_inv(epsilon) ** 2 / (capacity - r_bar) ** 2
    return BlocklengthSolution(n=max(1, math.ceil(n_real)), n_real=n_real)
