# quadrature.py
# =============================================================================
# 竖直线积分 (1/2πi)∫_{(σ)} g(s) y^{±s} ds 的梯形求积。
# / Trapezoid quadrature of vertical-line integrals (1/2πi)∫_{(σ)} g(s) y^{±s} ds.
#
# 被积函数以对数形式 log g(s) 给出，与 ±s·log y 合并后再取指数，远离原点的
# 横坐标也不会溢出。截断高度 T 取在 |g| 相对峰值降到 tail_tol 以下处；尾项
# 上界为 (h/2π) Σ_{T<|t|≤2T} |g(σ+it)| · y^{±σ}。
# / The integrand is supplied as log g(s) and combined with ±s·log y before
#   exponentiation. T is where |g| falls below tail_tol of its peak; the tail
#   certificate sums |g| over T < |t| ≤ 2T.
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from hkv.errors import InvalidArgument, TailBoundExceedsTolerance
from hkv.numerics.summation import csum_rows

logger = logging.getLogger(__name__)

LogIntegrand = Callable[[np.ndarray], np.ndarray]

DEFAULT_STEP = 0.05
DEFAULT_TAIL_TOL = 1e-12
T_MAX = 400.0
_CHUNK = 4096


@dataclass
class LineIntegral:
    """一次竖直线求积的描述与结果。 / Descriptor and result of one line quadrature."""

    sigma: float
    T: float
    h: float
    value: complex
    tail_bound: float
    rule: str = "trapezoid"

    def to_dict(self) -> dict[str, object]:
        return {
            "sigma": self.sigma,
            "T": self.T,
            "h": self.h,
            "value": self.value,
            "tail_bound": self.tail_bound,
            "rule": self.rule,
        }


def _magnitude(log_g: LogIntegrand, sigma: float, t: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.real(log_g(sigma + 1j * t))
    return np.where(np.isfinite(vals), vals, -np.inf)


def choose_height(log_g: LogIntegrand, sigma: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """截断高度：|g(σ+it)| ≤ tail_tol · max|g| 对所有 |t| ≥ T 成立。
    / Height beyond which |g| stays below tail_tol times its peak.
    """
    t = np.arange(0.0, T_MAX + 0.25, 0.25)
    both = np.maximum(_magnitude(log_g, sigma, t), _magnitude(log_g, sigma, -t))
    peak = float(np.max(both))
    if not math.isfinite(peak):
        raise InvalidArgument(f"integrand vanishes identically on the line sigma={sigma}")
    threshold = peak + math.log(tail_tol)
    suffix_max = np.maximum.accumulate(both[::-1])[::-1]
    below = np.nonzero(suffix_max < threshold)[0]
    if below.size == 0:
        raise TailBoundExceedsTolerance(f"integrand does not decay below {tail_tol:g} of its peak by |t| = {T_MAX}")
    return float(t[below[0]]) + 1.0


def integrate_line(
    log_g: LogIntegrand,
    sigma: float,
    log_y: np.ndarray,
    *,
    sign: int,
    h: float = DEFAULT_STEP,
    T: Optional[float] = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> tuple[np.ndarray, np.ndarray, float]:
    """对一组 y 在同一横坐标上求积。返回 (值, 尾项上界, T)。
    / Integrate on one abscissa for a batch of y; returns (values, tail bounds, T).
    """
    if T is None:
        T = choose_height(log_g, sigma, tail_tol)
    K = int(math.ceil(T / h))
    t = np.arange(-K, K + 1, dtype=np.float64) * h
    s = sigma + 1j * t
    with np.errstate(over="ignore", invalid="ignore"):
        log_nodes = log_g(s)
    log_nodes = np.where(np.isfinite(log_nodes.real), log_nodes, complex(-np.inf, 0.0))

    t_tail = np.arange(K + 1, 2 * K + 1, dtype=np.float64) * h
    tail_mag = np.exp(_magnitude(log_g, sigma, t_tail)) + np.exp(_magnitude(log_g, sigma, -t_tail))
    tail_sum = float(np.sum(tail_mag)) * h / (2.0 * math.pi)

    log_y = np.asarray(log_y, dtype=np.float64).ravel()
    values = np.empty(log_y.size, dtype=np.complex128)
    for start in range(0, log_y.size, _CHUNK):
        ly = log_y[start : start + _CHUNK]
        with np.errstate(under="ignore"):
            block = np.exp(log_nodes[None, :] + sign * np.outer(ly, s))
        values[start : start + _CHUNK] = csum_rows(block.T) * (h / (2.0 * math.pi))
    tails = tail_sum * np.exp(sign * sigma * log_y)
    return values, tails, float(T)


def saddle_abscissae(
    log_g: LogIntegrand,
    log_y: np.ndarray,
    *,
    sign: int,
    lo: float,
    hi: float,
    points: int = 161,
) -> np.ndarray:
    """对每个 y 取使 log|g(σ)| ± σ log y 最小的 σ ∈ [lo, hi]（网格取值）。
    / Per-y abscissa minimizing log|g(σ)| ± σ log y over a grid on [lo, hi].
    """
    if not lo < hi:
        raise InvalidArgument(f"empty abscissa strip [{lo}, {hi}]")
    grid = np.linspace(lo, hi, points)
    # 取 Im s = 0.5 避开实轴上的零点。 / Im s = 0.5 keeps clear of real zeros.
    with np.errstate(over="ignore", invalid="ignore"):
        on_axis = np.real(log_g(grid + 0.5j))
    on_axis = np.where(np.isfinite(on_axis), on_axis, np.inf)
    cost = on_axis[None, :] + sign * np.outer(np.asarray(log_y, dtype=np.float64), grid)
    return grid[np.argmin(cost, axis=1)]


def evaluate_line(
    log_g: LogIntegrand,
    log_y: np.ndarray,
    *,
    sign: int,
    strip: tuple[float, float],
    sigma: Optional[float] = None,
    h: float = DEFAULT_STEP,
    T: Optional[float] = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
    abscissa: str = "saddle",
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """按横坐标分组求积。返回 (值, 尾项, σ, T)，均与 y 对齐。
    / Group the y values by abscissa and integrate; returns arrays aligned with y.
    """
    log_y = np.atleast_1d(np.asarray(log_y, dtype=np.float64))
    lo, hi = strip
    if sigma is not None:
        if not lo <= sigma <= hi:
            raise InvalidArgument(f"sigma={sigma} lies outside the legal strip ({lo}, {hi})")
        sigmas = np.full(log_y.size, float(sigma))
    elif abscissa == "fixed":
        mid = 0.5 * (lo + hi) if math.isfinite(hi - lo) else (lo + 1.0 if math.isfinite(lo) else hi - 1.0)
        sigmas = np.full(log_y.size, mid)
    else:
        sigmas = saddle_abscissae(log_g, log_y, sign=sign, lo=lo, hi=hi)

    values = np.empty(log_y.size, dtype=np.complex128)
    tails = np.empty(log_y.size, dtype=np.float64)
    heights = np.empty(log_y.size, dtype=np.float64)
    for sig in np.unique(sigmas):
        mask = sigmas == sig
        v, tb, used_T = integrate_line(log_g, float(sig), log_y[mask], sign=sign, h=h, T=T, tail_tol=tail_tol)
        values[mask] = v
        tails[mask] = tb
        heights[mask] = used_T
    logger.debug(
        "line quadrature: %d points, %d abscissae, h=%s, T in [%.1f, %.1f]",
        log_y.size,
        np.unique(sigmas).size,
        h,
        float(heights.min(initial=0.0)),
        float(heights.max(initial=0.0)),
    )
    return values, tails, sigmas, heights


__all__ = [
    "DEFAULT_STEP",
    "DEFAULT_TAIL_TOL",
    "LineIntegral",
    "choose_height",
    "evaluate_line",
    "integrate_line",
    "saddle_abscissae",
]
