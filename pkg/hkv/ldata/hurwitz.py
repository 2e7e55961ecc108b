# hurwitz.py
# =============================================================================
# Hurwitz ζ 的 Euler–Maclaurin 求值与周期系数 Dirichlet 级数。
# / Hurwitz zeta by Euler–Maclaurin, and Dirichlet series with periodic
#   coefficients built on it.
#
#   ζ(s, a) = Σ_{k<N} (k+a)^{−s} + (N+a)^{1−s}/(s−1) + (N+a)^{−s}/2
#           + Σ_{j=1}^{J} B_{2j}/(2j)! · (s)_{2j−1} · (N+a)^{−s−2j+1} + R
#   |R| ≤ 4 |(s)_{2J}| / (2π)^{2J} · (N+a)^{−σ−2J+1} / (σ+2J−1)
#
# 周期为 Q 的系数 c：Σ_m c(m) m^{−s} = Q^{−s} Σ_{r=1}^{Q} c(r) ζ(s, r/Q)，
# 只要 Σ c = 0 即为整函数。
# / For Q-periodic c the series is Q^{−s} Σ_r c(r) ζ(s, r/Q), entire when Σ c = 0.
# =============================================================================

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import special

from hkv.errors import PoleHit, TrivialCharacter

logger = logging.getLogger(__name__)

EM_TERMS = 25
_BERNOULLI = special.bernoulli(2 * EM_TERMS)
_EPS = np.finfo(float).eps


def _rising(s: complex, k: int) -> complex:
    out = 1 + 0j
    for i in range(k):
        out *= s + i
    return out


def hurwitz_zeta(s: complex, a: np.ndarray | float, *, terms: int = EM_TERMS) -> tuple[np.ndarray, float]:
    """ζ(s, a)，0 < a ≤ 1，按 a 向量化。返回 (值, 余项上界)。
    / ζ(s, a) for 0 < a ≤ 1, vectorized over a; returns values and a remainder bound.
    """
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleHit("the Hurwitz zeta function has a pole at s = 1")
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    sigma = s.real
    N = 20 + int(math.ceil(abs(s)))
    J = terms
    while sigma + 2 * J - 1 <= 0:
        J += 1
    k = np.arange(N, dtype=np.float64)
    base = a[:, None] + k[None, :]
    direct = np.exp(-s * np.log(base)).sum(axis=1)
    x = a + N
    log_x = np.log(x)
    out = direct + np.exp((1.0 - s) * log_x) / (s - 1.0) + 0.5 * np.exp(-s * log_x)
    bern = _BERNOULLI if J <= EM_TERMS else special.bernoulli(2 * J)
    rising = s
    for j in range(1, J + 1):
        # rising = (s)_{2j−1}
        coef = bern[2 * j] / math.factorial(2 * j) * rising
        out = out + coef * np.exp((-s - 2 * j + 1) * log_x)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    log_bound = (
        math.log(4.0)
        + math.log(abs(_rising(s, 2 * J)) or 1e-300)
        - 2 * J * math.log(2.0 * math.pi)
        + (-sigma - 2 * J + 1) * math.log(N)
        - math.log(sigma + 2 * J - 1)
    )
    bound = math.exp(log_bound) + 16.0 * _EPS * float(np.max(np.abs(out)))
    return out, bound


@lru_cache(maxsize=128)
def _column(s_re: float, s_im: float, Q: int) -> tuple[np.ndarray, float]:
    s = complex(s_re, s_im)
    a = np.arange(1, Q + 1, dtype=np.float64) / Q
    values, bound = hurwitz_zeta(s, a)
    # 第 r 个元素对应剩余类 r mod Q（r = Q 记为 0）。 / Entry r holds residue r mod Q.
    column = np.roll(values, 1)
    column.setflags(write=False)
    logger.debug("Hurwitz column Q=%d s=%s remainder %.2e", Q, s, bound)
    return column, bound


def hurwitz_column(s: complex, Q: int) -> tuple[np.ndarray, float]:
    """ζ(s, r/Q)（r = Q 时放在下标 0）与余项上界。 / ζ(s, r/Q) indexed by residue r, with remainder bound."""
    s = complex(s)
    return _column(s.real, s.imag, int(Q))


def periodic_series(coeffs: np.ndarray, s: complex) -> tuple[complex, float]:
    """Σ_{m≥1} c(m) m^{−s}，c 以 Q 为周期（按剩余类给出）。返回 (值, 误差上界)。
    / Σ c(m) m^{−s} for Q-periodic c given by residue; returns value and error bar.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    Q = coeffs.size
    column, bound = hurwitz_column(s, Q)
    scale = np.exp(-complex(s) * math.log(Q))
    terms = coeffs * column
    value = complex(scale * (terms.real.sum() + 1j * terms.imag.sum()))
    bar = abs(scale) * (float(np.abs(coeffs).sum()) * bound + 8.0 * _EPS * float(np.abs(terms).sum()))
    return value, bar


def class_series(coeffs: np.ndarray, s: complex, q: int) -> tuple[np.ndarray, float]:
    """按模 q 的剩余类拆开：B[u] = Σ_{m ≡ u (q)} c(m) m^{−s}，q | Q。
    / Split the periodic series by residue class u mod q (q must divide Q).
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    Q = coeffs.size
    column, bound = hurwitz_column(s, Q)
    scale = np.exp(-complex(s) * math.log(Q))
    terms = coeffs * column * scale
    classes = np.arange(Q, dtype=np.int64) % q
    out = np.bincount(classes, weights=terms.real, minlength=q) + 1j * np.bincount(
        classes, weights=terms.imag, minlength=q
    )
    bar = abs(scale) * float(np.abs(coeffs).max(initial=0.0)) * bound * (Q // q)
    bar += 8.0 * _EPS * float(np.abs(terms).sum())
    return out, bar


def dirichlet_L(xi, s: complex) -> complex:
    """L(s, ξ)，ξ 为非平凡特征（DirichletCharacter 或 CharacterProduct）。
    / L(s, ξ) for a nontrivial character.
    """
    return dirichlet_L_with_bar(xi, s)[0]


def dirichlet_L_with_bar(xi, s: complex) -> tuple[complex, float]:
    if xi.is_trivial:
        raise TrivialCharacter("L(s, xi) for the trivial character has a pole at s = 1")
    return periodic_series(xi.values(), s)


__all__ = [
    "EM_TERMS",
    "class_series",
    "dirichlet_L",
    "dirichlet_L_with_bar",
    "hurwitz_column",
    "hurwitz_zeta",
    "periodic_series",
]
