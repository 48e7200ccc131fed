"""
Seeded Monte-Carlo oracle for the channel functionals.

Trial k of a run lives in RNG block k // BLOCK_SIZE. Each block (or the part of it
a run covers) is reduced to (count, mean, M2) on its own and the blocks are merged
in block order, so an estimate depends only on (seed, start, trials), never on the
number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, List, Tuple, Union

import numpy as np

from fblmimo.constants import (
    MC_TARGET,
    INVERSE_TARGETS,
    BLOCK_SIZE,
    CHUNK_ENTRIES,
    REJECTION_RATIO,
    MAX_REJECTION_RATE,
    CONFIDENCE_SE,
    AGREEMENT_REL_TOL,
)
from fblmimo.core._cli.utils import print_log
from fblmimo.exceptions.contract_error import ContractError
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.randmat import AntennaConfig, ChannelStream, sample_channels, gram_eigenvalues_batch
from fblmimo.rate import capacity_of, dispersion_of
from fblmimo.state import Record

Segment = Tuple[int, int, int]


@dataclass(frozen=True)
class McEstimate(Record):
    target: MC_TARGET
    M: int
    N: int
    rho: float
    seed: int
    trials: int
    count: int
    mean: float
    m2: float = field(metadata={"as_row": False})

    @classmethod
    def empty(cls, target: MC_TARGET, cfg: AntennaConfig, rho: float, seed: int) -> McEstimate:
        return cls(target=target, M=cfg.M, N=cfg.N, rho=rho, seed=seed, trials=0, count=0, mean=0.0, m2=0.0)

    @property
    def rejected(self) -> int:
        return self.trials - self.count

    @property
    def variance(self) -> float:
        if self.count < 2:
            return math.nan
        return self.m2 / (self.count - 1)

    @property
    def std_error(self) -> float:
        if self.count < 2:
            return math.nan
        return math.sqrt(self.variance / self.count)

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.trials if self.trials else 0.0

    @property
    def heavy_tailed(self) -> bool:
        """Inverse functionals of square channels have no finite mean"""
        return self.target in INVERSE_TARGETS and self.M == self.N

    @property
    def valid(self) -> bool:
        return self.count >= 2 and self.rejection_rate <= MAX_REJECTION_RATE

    def as_row(self, prefix: str = ""):
        row = super().as_row(prefix)
        for name in ("variance", "std_error", "rejected", "rejection_rate", "valid", "heavy_tailed"):
            row[f"{prefix}{name}"] = getattr(self, name)
        return row


def merge(a: McEstimate, b: McEstimate) -> McEstimate:
    """Pairwise merge of two estimates over disjoint trials of the same run"""
    ContractError.check(
        (a.target, a.M, a.N, a.rho, a.seed) == (b.target, b.M, b.N, b.rho, b.seed),
        f"cannot merge an estimate of {b.target.value} (M={b.M} N={b.N} rho={b.rho} seed={b.seed}) "
        f"into one of {a.target.value} (M={a.M} N={a.N} rho={a.rho} seed={a.seed})",
    )
    if b.trials == 0:
        return a
    if a.trials == 0:
        return b
    count = a.count + b.count
    if count == 0:
        return replace(a, trials=a.trials + b.trials)
    delta = b.mean - a.mean
    return replace(
        a,
        trials=a.trials + b.trials,
        count=count,
        mean=(a.count * a.mean + b.count * b.mean) / count,
        m2=a.m2 + b.m2 + delta * delta * a.count * b.count / count,
    )


def _inverse_sums(lambdas: np.ndarray, shift: float = 0.0) -> np.ndarray:
    return np.sum(1.0 / (shift + lambdas), axis=-1)


def evaluate(target: MC_TARGET, lambdas: np.ndarray, cfg: AntennaConfig, rho: float) -> np.ndarray:
    """The functional of every draw; lambdas has shape (count, m), descending"""
    shift = 2.0 * cfg.M / rho
    scale = (cfg.M / (2.0 * rho)) ** 2

    if target is MC_TARGET.CAPACITY:
        return capacity_of(lambdas, cfg, rho)
    if target is MC_TARGET.DISPERSION:
        return dispersion_of(lambdas, cfg, rho)
    if target is MC_TARGET.SQRT_DISPERSION:
        return np.sqrt(np.maximum(dispersion_of(lambdas, cfg, rho), 0.0))
    if target is MC_TARGET.DISPERSION_SECOND_MOMENT:
        return np.sum((1.0 + rho / cfg.M * lambdas) ** -2, axis=-1) ** 2
    if target is MC_TARGET.SHIFTED_INV_SUM:
        return _inverse_sums(lambdas, shift)
    if target is MC_TARGET.G4:
        return scale * _inverse_sums(lambdas, shift) ** 2

    inv = _inverse_sums(lambdas)
    inv_sq = np.sum(lambdas ** -2.0, axis=-1)
    if target is MC_TARGET.INV_EIGEN_SUM:
        return inv
    if target is MC_TARGET.INV_EIGEN_SQ_SUM:
        return inv_sq
    if target is MC_TARGET.INV_EIGEN_CROSS_SUM:
        return inv ** 2 - inv_sq
    if target is MC_TARGET.G1:
        return scale * inv_sq
    if target is MC_TARGET.G2:
        return scale * inv * _inverse_sums(lambdas, shift)
    if target is MC_TARGET.G3:
        return scale * (inv ** 2 - inv_sq)
    raise DomainError(f"unknown Monte-Carlo target {target!r}")


def _accepted(target: MC_TARGET, lambdas: np.ndarray) -> np.ndarray:
    if target not in INVERSE_TARGETS:
        return np.ones(len(lambdas), dtype=bool)
    smallest, largest = lambdas[:, -1], lambdas[:, 0]
    return (smallest > 0) & (smallest >= REJECTION_RATIO * largest)


def _chunks(total: int, size: int) -> Iterator[int]:
    while total > 0:
        yield min(size, total)
        total -= size


def _reduce_segment(target: MC_TARGET, cfg: AntennaConfig, rho: float, seed: int, segment: Segment) -> McEstimate:
    block, lo, hi = segment
    stream = ChannelStream(seed, block)
    chunk = max(1, CHUNK_ENTRIES // (cfg.M * cfg.N))
    for size in _chunks(lo, chunk):
        stream.normal(size, (cfg.N, cfg.M, 2))

    result = McEstimate.empty(target, cfg, rho, seed)
    for size in _chunks(hi - lo, chunk):
        lineage = stream.lineage
        lambdas = gram_eigenvalues_batch(sample_channels(cfg, stream, size), lineage)
        keep = _accepted(target, lambdas)
        values = evaluate(target, lambdas[keep], cfg, rho)
        mean = float(np.mean(values)) if len(values) else 0.0
        part = replace(
            result,
            trials=size,
            count=len(values),
            mean=mean,
            m2=float(np.sum((values - mean) ** 2)),
        )
        result = merge(result, part)
    return result


def _segments(start: int, trials: int) -> List[Segment]:
    segments = []
    k, end = start, start + trials
    while k < end:
        block = k // BLOCK_SIZE
        stop = min((block + 1) * BLOCK_SIZE, end)
        segments.append((block, k - block * BLOCK_SIZE, stop - block * BLOCK_SIZE))
        k = stop
    return segments


def estimate(
        target: Union[MC_TARGET, str],
        cfg: AntennaConfig,
        rho: float,
        trials: int,
        seed: int,
        *,
        workers: int = 1,
        start: int = 0,
        log: bool = False,
) -> McEstimate:
    """
    Estimate E[target] over trials start .. start + trials - 1 of the run keyed by `seed`.

    Inverse functionals reject draws with lambda_min < REJECTION_RATIO * lambda_max; the
    rejected draws are counted and more than MAX_REJECTION_RATE of them make the estimate invalid.
    """
    try:
        target = MC_TARGET(target)
    except ValueError:
        raise DomainError(f"unknown Monte-Carlo target {target!r}") from None
    DomainError.check(rho > 0 and math.isfinite(rho), f"rho must be a positive finite number, got {rho!r}")
    DomainError.check(trials >= 2, f"trials must be >= 2, got {trials!r}")
    DomainError.check(start >= 0, f"start must be >= 0, got {start!r}")
    DomainError.check(workers >= 1, f"workers must be >= 1, got {workers!r}")

    segments = _segments(start, trials)
    result = McEstimate.empty(target, cfg, rho, seed)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda segment: _reduce_segment(target, cfg, rho, seed, segment), segments)
        for segment, part in zip(segments, parts):
            result = merge(result, part)
            if log:
                print_log(
                    f"[mc {target.value}] block {segment[0]} done, "
                    f"{result.trials}/{trials} trials, mean={result.mean:.6g}"
                )
    return result


@dataclass
class OracleCheck(Record):
    closed: float
    mc_mean: float
    std_error: float
    difference: float
    tolerance: float
    agrees: bool
    closed_below: bool


def compare(
        closed_value: float,
        est: McEstimate,
        rel_tol: float = AGREEMENT_REL_TOL,
        n_se: float = CONFIDENCE_SE,
) -> OracleCheck:
    """A closed form agrees when it is within max(rel_tol * |closed|, n_se * std_error) of the estimate"""
    tolerance = max(rel_tol * abs(closed_value), n_se * est.std_error)
    difference = closed_value - est.mean
    return OracleCheck(
        closed=closed_value,
        mc_mean=est.mean,
        std_error=est.std_error,
        difference=difference,
        tolerance=tolerance,
        agrees=bool(abs(difference) <= tolerance),
        closed_below=bool(closed_value <= est.mean + n_se * est.std_error),
    )


@dataclass
class JensenCheck(Record):
    mean_sqrt: float
    sqrt_mean: float
    std_error: float
    holds: bool


def jensen_check(cfg: AntennaConfig, rho: float, trials: int, seed: int, *, workers: int = 1) -> JensenCheck:
    """E[sqrt V] against sqrt(E[V]), both estimated on the same draws"""
    mean_sqrt = estimate(MC_TARGET.SQRT_DISPERSION, cfg, rho, trials, seed, workers=workers)
    mean = estimate(MC_TARGET.DISPERSION, cfg, rho, trials, seed, workers=workers)
    sqrt_mean = math.sqrt(max(mean.mean, 0.0))
    return JensenCheck(
        mean_sqrt=mean_sqrt.mean,
        sqrt_mean=sqrt_mean,
        std_error=mean_sqrt.std_error,
        holds=mean_sqrt.mean <= sqrt_mean + CONFIDENCE_SE * mean_sqrt.std_error,
    )
