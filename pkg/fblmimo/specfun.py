"""
Gaussian tail function and its inverse.

`q_func(x)` is the probability that a standard normal variable exceeds `x`;
`q_inv(p)` is the `x` with `q_func(x) == p`. Both are used by every rate bound,
where block error targets go down to 1e-7 and below, so the tail must be
accurate in relative terms.
"""
import math

from scipy import special

from fblmimo.exceptions.domain_error import DomainError

_SQRT1_2 = math.sqrt(0.5)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def q_func(x: float) -> float:
    """Gaussian tail probability, computed through erfc so that the far tail keeps its relative accuracy"""
    DomainError.check(math.isfinite(x), f"q_func needs a finite argument, got {x!r}")
    return float(0.5 * special.erfc(x * _SQRT1_2))


def q_inv(p: float) -> float:
    """Inverse of `q_func` on the open interval (0, 1)"""
    DomainError.check(
        0.0 < p < 1.0,
        f"q_inv: Q(x) = p has a finite solution only for p strictly between 0 and 1, got {p!r}",
    )
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # 1 - p is exact for p in [0.5, 1)
        return -q_inv(1.0 - p)

    x = -float(special.ndtri(p))
    # one Newton step on the tail function, whose derivative is -pdf(x)
    return x + (q_func(x) - p) / _pdf(x)
