# progression.py
# =============================================================================
# 按剩余类加权的 Dirichlet 级数 Σ_{(m,p)=1} a(m) K(m mod p^β) m^{−w}。
# / Dirichlet series weighted by a function of m mod p^β.
#
# 两种求值：
#   hurwitz: 每个分量 ξ_i 的类级数 B_i[u] = Σ_{m≡u} ξ_i(m) m^{−w}（Hurwitz ζ），
#              在单位群上做 n 重乘法卷积（dlog 坐标中的 FFT 循环卷积），再与 K 配对；
#              对全部 w ≠ 1 成立（即解析延拓）。
#   direct : 截断到 M 的直接和，尾项由 d_n 上界确证，需 Re w > 1。
# / Two evaluations: class series per component convolved over the unit
#   group (valid for every w ≠ 1), or direct truncation with a d_n tail.
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import InvalidArgument, TailBoundExceedsTolerance
from hkv.ldata.datum import LData, character_from_spec, coeff_range
from hkv.ldata.twisted import MAX_TERMS, component_class_series
from hkv.numerics.summation import csum
from hkv.numerics.tails import dn_tail

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


class ProgressionMode(str, Enum):
    HURWITZ = "hurwitz"
    DIRECT = "direct"


@dataclass(frozen=True)
class ClassSeries:
    """C[k] = Σ_{(m,p)=1, m ≡ g^k} a(m) m^{−w}（dlog 坐标）。 / The datum's series split by unit class."""

    modulus: PrimePowerModulus
    w: complex
    by_log: np.ndarray
    bar_l1: float

    def by_residue(self) -> np.ndarray:
        group = build_unit_group(self.modulus)
        out = np.zeros(group.q, dtype=np.complex128)
        out[group.powers] = self.by_log
        return out

    def weighted(self, weights: np.ndarray) -> tuple[complex, float]:
        """Σ_u K(u) C(u)，K 按剩余类给出。 / Pair the class series with a residue-class weight."""
        group = build_unit_group(self.modulus)
        K = np.asarray(weights, dtype=np.complex128)
        if K.size != group.q:
            raise InvalidArgument(f"weight table must have {group.q} entries, got {K.size}")
        terms = K[group.powers] * self.by_log
        value = csum(terms)
        kmax = float(np.abs(K).max(initial=0.0))
        bar = kmax * self.bar_l1 + 8.0 * _EPS * float(np.abs(terms).sum())
        return value, bar

    def total(self) -> tuple[complex, float]:
        """L^{(p)}(w, π) = Σ_{(m,p)=1} a(m) m^{−w}。"""
        return self.weighted(np.ones(self.modulus.modulus))


@lru_cache(maxsize=64)
def _class_series_cached(key: tuple, p: int, beta: int, w_re: float, w_im: float) -> ClassSeries:
    modulus = PrimePowerModulus(p, beta)
    group = build_unit_group(modulus)
    w = complex(w_re, w_im)
    spectra = []
    norms, errs = [], []
    for cp, cb, t in key:
        xi = character_from_spec(cp**cb, t)
        B, bar = component_class_series(xi, modulus, w)
        b = B[group.powers]
        spectra.append(np.fft.fft(b))
        norms.append(float(np.abs(b).sum()))
        errs.append(bar * group.order)
    product = spectra[0]
    for spec in spectra[1:]:
        product = product * spec
    by_log = np.fft.ifft(product)
    bar_l1 = 0.0
    for i, e in enumerate(errs):
        rest = 1.0
        for j, nrm in enumerate(norms):
            if j != i:
                rest *= nrm + errs[j]
        bar_l1 += e * rest
    bar_l1 += 16.0 * _EPS * math.log2(max(group.order, 2)) * math.prod(norms)
    by_log.setflags(write=False)
    logger.debug("class series mod %d at w=%s: bar %.2e", group.q, w, bar_l1)
    return ClassSeries(modulus=modulus, w=w, by_log=by_log, bar_l1=bar_l1)


def class_series_for(d: LData, modulus: PrimePowerModulus, w: complex) -> ClassSeries:
    d.check_coprime(modulus.p)
    w = complex(w)
    if abs(w - 1.0) < 1e-12:
        raise InvalidArgument("w = 1 is a pole of the class series")
    return _class_series_cached(d.key, modulus.p, modulus.beta, w.real, w.imag)


def direct_progression_sum(
    d: LData,
    modulus: PrimePowerModulus,
    w: complex,
    weights: np.ndarray,
    *,
    tol: Optional[float] = 1e-9,
    max_terms: int = MAX_TERMS,
) -> tuple[complex, float, int]:
    """直接截断：整周期求和直到 d_n 尾项 < tol；达到 max_terms 仍不满足时报错。
    tol=None 时求和到 max_terms，误差条如实给出。返回 (值, 误差条, M)。
    / Direct truncation in whole periods; returns value, bar and the truncation point.
    With tol=None the sum runs to the cap and only reports its bar.
    """
    w = complex(w)
    if w.real <= 1.0:
        raise TailBoundExceedsTolerance(f"direct progression sums need Re(w) > 1, got {w.real}")
    q = modulus.modulus
    K = np.asarray(weights, dtype=np.complex128)
    kmax = float(np.abs(K).max(initial=0.0))
    M = q
    cap = max(q, (max_terms // q) * q)
    if tol is None:
        M = cap
    else:
        while dn_tail(M, w.real, d.n) * kmax >= tol and M < cap:
            M = min(2 * M, cap)
    tail = dn_tail(M, w.real, d.n) * kmax
    if tol is not None and tail >= tol:
        raise TailBoundExceedsTolerance(
            f"progression tail {tail:.2e} at M={M} exceeds {tol:g}", extra={"M": M, "tail": tail, "tol": tol}
        )
    a = coeff_range(d, M)
    m = np.arange(1, M + 1, dtype=np.int64)
    terms = a[1:] * K[m % q] * np.exp(-w * np.log(m.astype(np.float64)))
    terms[m % modulus.p == 0] = 0.0
    value = csum(terms)
    bar = tail + 8.0 * _EPS * float(np.abs(terms).sum())
    logger.debug("direct progression sum: M=%d tail=%.2e", M, tail)
    return value, bar, M


def progression_sum(
    d: LData,
    modulus: PrimePowerModulus,
    w: complex,
    weights: np.ndarray,
    mode: ProgressionMode | str = ProgressionMode.HURWITZ,
    **kwargs,
) -> tuple[complex, float]:
    """Σ_{(m,p)=1} a(m) K(m mod p^β) m^{−w}。"""
    mode = ProgressionMode(mode)
    if mode is ProgressionMode.DIRECT:
        value, bar, _ = direct_progression_sum(d, modulus, w, weights, **kwargs)
        return value, bar
    return class_series_for(d, modulus, w).weighted(weights)


__all__ = [
    "ClassSeries",
    "ProgressionMode",
    "class_series_for",
    "direct_progression_sum",
    "progression_sum",
]
