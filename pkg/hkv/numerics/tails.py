# tails.py
# =============================================================================
# 截断尾项的确证上界。 / Certified bounds for truncated tails.
#
# 所有上界都基于 |a(m)| ≤ d_n(m)：
#   Σ_{m>M} d_n(m) m^{-σ} ≤ σ ∫_M^∞ (1 + log x)^{n-1} x^{-σ} dx
#                        = σ e^{σ-1} Γ(n, (σ-1)(1 + log M)) / (σ-1)^n
# （由 Σ_{m≤x} d_n(m) ≤ x(1 + log x)^{n-1} 与分部求和得到）。
# / All bounds rest on |a(m)| ≤ d_n(m) and the integral majorant above
#   (partial summation against Σ_{m≤x} d_n(m) ≤ x(1 + log x)^{n-1}).
# =============================================================================

from __future__ import annotations

import logging
import math
from typing import Callable, Sequence

import numpy as np
from scipy import special

from hkv.numerics.sieve import divisor_table
from hkv.numerics.summation import rsum

logger = logging.getLogger(__name__)

_EXACT_TAIL_MAX_M = 2_000_000


def _log_upper_incomplete_gamma_int(n: int, x: float) -> float:
    """log Γ(n, x)，n 为正整数。 / log Γ(n, x) for a positive integer n.

    Γ(n, x) = (n-1)! e^{-x} Σ_{k<n} x^k / k!，在对数域求值避免下溢。
    / Evaluated in log space so large x never underflows.
    """
    if x <= 0:
        return math.lgamma(n)
    log_terms = [k * math.log(x) - math.lgamma(k + 1) for k in range(n)]
    top = max(log_terms)
    log_series = top + math.log(math.fsum(math.exp(t - top) for t in log_terms))
    return math.lgamma(n) - x + log_series


def log_dn_tail_majorant(M: float, sigma: float, n: int) -> float:
    if sigma <= 1.0:
        return math.inf
    M = max(float(M), 1.0)
    a = sigma - 1.0
    x = a * (1.0 + math.log(M))
    return math.log(sigma) + a + _log_upper_incomplete_gamma_int(n, x) - n * math.log(a)


def dn_tail_majorant(M: float, sigma: float, n: int) -> float:
    """积分上界。 / Integral majorant for Σ_{m>M} d_n(m) m^{-σ}."""
    return math.exp(log_dn_tail_majorant(M, sigma, n))


def dn_tail_exact(M: int, sigma: float, n: int) -> tuple[float, float]:
    """ζ(σ)^n − Σ_{m≤M} d_n(m) m^{-σ} 及其舍入误差。 / Exact tail and its rounding error."""
    if sigma <= 1.0:
        return math.inf, 0.0
    table = divisor_table(int(M), n)
    m = np.arange(1, int(M) + 1, dtype=np.float64)
    partial = rsum(table[1:] * m ** (-sigma))
    total = float(special.zeta(sigma, 1.0)) ** n
    rounding = 8.0 * np.finfo(float).eps * total
    return total - partial, rounding


def dn_tail(M: int, sigma: float, n: int) -> float:
    """两种上界中较小的有效值。 / The smaller of the two valid certificates."""
    bound = dn_tail_majorant(M, sigma, n)
    if M <= _EXACT_TAIL_MAX_M and sigma <= 4.0:
        exact, rounding = dn_tail_exact(M, sigma, n)
        if exact > rounding:
            bound = min(bound, exact + rounding)
    return bound


def weighted_tail_bound(
    abs_weight: Callable[[np.ndarray], np.ndarray],
    M: float,
    n: int,
    *,
    sigmas: Sequence[float] = (1.5, 2.0, 4.0, 8.0, 16.0, 32.0),
    decades: float = 10.0,
    density: int = 48,
) -> float:
    """Σ_{m>M} d_n(m)|w(m)| 的上界。 / Bound for Σ_{m>M} d_n(m)|w(m)|.

    对每个 σ 取 B_σ = sup_{y≥M} |w(y)| y^σ（在几何网格上估计），返回
    min_σ B_σ · dn_tail_majorant(M, σ, n)。要求 w 在网格以外单调衰减。
    / For each σ take B_σ = sup_{y≥M} |w(y)| y^σ on a geometric grid and
    return the minimum of B_σ times the d_n majorant. Assumes w keeps
    decaying beyond the grid.
    """
    grid = float(M) * np.logspace(0.0, decades, int(decades * density) + 1)
    with np.errstate(divide="ignore"):
        log_w = np.log(np.abs(np.asarray(abs_weight(grid), dtype=np.float64)))
    log_y = np.log(grid)
    best = math.inf
    for sigma in sigmas:
        log_b = float(np.max(log_w + sigma * log_y))
        if not math.isfinite(log_b):
            if log_b < 0:
                return 0.0
            continue
        candidate = log_b + log_dn_tail_majorant(M, sigma, n)
        best = min(best, candidate)
    bound = math.exp(best) if math.isfinite(best) else math.inf
    logger.debug("weighted tail bound M=%s n=%s -> %.3e", M, n, bound)
    return bound


__all__ = [
    "dn_tail",
    "dn_tail_exact",
    "dn_tail_majorant",
    "log_dn_tail_majorant",
    "weighted_tail_bound",
]
