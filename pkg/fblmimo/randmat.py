"""
Rayleigh channel sampling, Gram-matrix eigenvalues and the Marcenko-Pastur
Stieltjes transform.

Channels are N x M matrices (N receive, M transmit antennas) with i.i.d.
CN(0, 1) entries. Eigenvalues always come from the smaller Gram matrix
(HH^H when M >= N, H^H H otherwise), so there are exactly m = min(M, N) of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from fblmimo.constants import NEGATIVE_EIGEN_TOL
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.exceptions.numeric_error import NumericError
from fblmimo.state import Record

_SQRT1_2 = math.sqrt(0.5)

Lineage = Tuple[int, int, int]


@dataclass(frozen=True)
class AntennaConfig(Record):
    M: int
    N: int
    m: int = field(init=False)

    def __post_init__(self):
        DomainError.check(
            isinstance(self.M, (int, np.integer)) and isinstance(self.N, (int, np.integer)),
            f"antenna counts must be integers, got M={self.M!r} N={self.N!r}",
        )
        DomainError.check(self.M >= 1 and self.N >= 1, f"antenna counts must be >= 1, got M={self.M} N={self.N}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "m", min(self.M, self.N))

    @property
    def square(self) -> bool:
        return self.M == self.N


@dataclass(frozen=True)
class MpParams(Record):
    """Marcenko-Pastur parameters of a configuration: aspect ratio, scaling constant and Stieltjes argument"""
    c: float
    a: float
    z: float

    def __post_init__(self):
        DomainError.check(self.c > 0 and self.a > 0, f"c and a must be positive, got c={self.c} a={self.a}")
        DomainError.check(self.z < 0, f"the Stieltjes argument must be negative, got z={self.z}")


def mp_params(cfg: AntennaConfig, rho: float) -> MpParams:
    DomainError.check(rho > 0, f"rho must be positive, got {rho!r}")
    c = cfg.N / cfg.M
    a = c / cfg.M if cfg.N > cfg.M else (1.0 / c) / cfg.M
    return MpParams(c=c, a=a, z=-2.0 * cfg.M / rho)


class ChannelStream:
    """
    Counter-based random stream for one block of trials.

    The block's generator is Philox keyed by SeedSequence(seed, spawn_key=(block,)),
    so any block can be regenerated on its own, in any order, on any worker.
    """

    def __init__(self, seed: int, block: int = 0):
        DomainError.check(seed >= 0 and block >= 0, f"seed and block must be >= 0, got {seed}, {block}")
        self.__seed = int(seed)
        self.__block = int(block)
        self.__generator = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(self.__seed, spawn_key=(self.__block,)))
        )
        self.__drawn = 0

    @property
    def seed(self):
        return self.__seed

    @property
    def block(self):
        return self.__block

    @property
    def lineage(self) -> Lineage:
        """(seed, block, index of the next draw)"""
        return self.__seed, self.__block, self.__drawn

    def normal(self, count: int, shape: Tuple[int, ...]) -> np.ndarray:
        values = self.__generator.standard_normal((count,) + shape)
        self.__drawn += count
        return values


@dataclass
class ChannelDraw(Record):
    entries: np.ndarray = field(metadata={"as_row": False})
    lineage: Optional[Lineage] = None

    @property
    def frobenius_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))


@dataclass
class EigenSample(Record):
    lambdas: np.ndarray = field(metadata={"as_row": False})

    def __len__(self):
        return len(self.lambdas)


def sample_channels(cfg: AntennaConfig, stream: ChannelStream, count: int) -> np.ndarray:
    """`count` consecutive draws of the stream, shape (count, N, M)"""
    z = stream.normal(count, (cfg.N, cfg.M, 2))
    return (z[..., 0] + 1j * z[..., 1]) * _SQRT1_2


def sample_channel(cfg: AntennaConfig, stream: ChannelStream) -> ChannelDraw:
    lineage = stream.lineage
    return ChannelDraw(entries=sample_channels(cfg, stream, 1)[0], lineage=lineage)


def _gram(entries: np.ndarray) -> np.ndarray:
    n_rows, n_cols = entries.shape[-2:]
    hermitian = entries.conj().swapaxes(-1, -2)
    if n_rows <= n_cols:
        return entries @ hermitian
    return hermitian @ entries


def gram_eigenvalues_batch(entries: np.ndarray, lineage: Optional[Lineage] = None) -> np.ndarray:
    """
    Descending, nonnegative eigenvalues of the smaller Gram matrix of every draw.

    entries has shape (count, N, M); the result has shape (count, m). Round-off
    negatives are clamped to 0 when above -NEGATIVE_EIGEN_TOL * lambda_max, anything
    more negative raises a NumericError carrying the lineage of the offending draw.
    """
    try:
        lambdas = np.linalg.eigvalsh(_gram(entries))[..., ::-1]
    except np.linalg.LinAlgError as e:
        raise NumericError(f"Hermitian eigensolver did not converge: {e}", lineage) from e

    floor = -NEGATIVE_EIGEN_TOL * np.maximum(lambdas[..., :1], 0.0)
    bad = np.any(lambdas < floor, axis=-1)
    if np.any(bad):
        index = int(np.argmax(bad))
        offending = None if lineage is None else (lineage[0], lineage[1], lineage[2] + index)
        raise NumericError(
            f"eigenvalue {lambdas[index].min():.3e} is too negative to be round-off "
            f"(lambda_max={lambdas[index, 0]:.3e})",
            offending,
        )
    return np.clip(lambdas, 0.0, None)


def gram_eigenvalues(h: ChannelDraw) -> EigenSample:
    return EigenSample(lambdas=gram_eigenvalues_batch(h.entries[np.newaxis], h.lineage)[0])


def mp_stieltjes_raw(c: float, z: float) -> float:
    """Marcenko-Pastur Stieltjes transform (unit-variance entries, aspect ratio c) on the negative axis"""
    DomainError.check(c > 0, f"aspect ratio must be positive, got c={c!r}")
    DomainError.check(z < 0, f"only the negative real axis is supported, got z={z!r}")
    root = math.sqrt((1.0 - c - z) ** 2 - 4.0 * c * z)
    return (1.0 - c) / (2.0 * c * z) - 1.0 / (2.0 * c) - root / (2.0 * c * z)


def mp_stieltjes_scaled(c: float, z: float, a: float) -> float:
    """Stieltjes transform of the law scaled by a, from mu_{aR}(az) = mu_R(z) / a"""
    DomainError.check(a > 0, f"scaling constant must be positive, got a={a!r}")
    return mp_stieltjes_raw(c, z / a) / a


def mp_stieltjes_mean(cfg: AntennaConfig, rho: float) -> float:
    """
    Closed form of E{sum_i 1/(2M/rho + lambda_i)}, one branch for N > M and one
    for N <= M. Square configurations reduce to (sqrt(1 + 2 rho) - 1) / 2.
    """
    DomainError.check(rho > 0, f"rho must be positive, got {rho!r}")
    M, N = float(cfg.M), float(cfg.N)
    cross = math.sqrt(8.0 * rho) * N * M
    if cfg.N > cfg.M:
        root = math.hypot(rho * M * M - rho * M * N + 2.0 * M * N, cross)
        return N / M * (rho * (N * M - M * M) / (4.0 * N * N) - M / (2.0 * N) + root / (4.0 * N * N))
    root = math.hypot(rho * N * N - rho * M * N + 2.0 * M * N, cross)
    return rho * (N * M - N * N) / (4.0 * M * M) - N / (2.0 * M) + root / (4.0 * M * M)


def mp_stieltjes_mean_scaled(cfg: AntennaConfig, rho: float) -> float:
    """
    Large-system limit of E{sum_i 1/(2M/rho + lambda_i)} through the transform itself.

    The Gram matrix is a * R with a = max(M, N) and R following the unit
    Marcenko-Pastur law of ratio m / a, so the sum is m * mu_{aR}(-2M/rho).
    """
    params = mp_params(cfg, rho)
    # ratio of the smaller to the larger dimension
    c = params.c if cfg.N <= cfg.M else 1.0 / params.c
    return cfg.m * mp_stieltjes_scaled(c, params.z, float(max(cfg.M, cfg.N)))
