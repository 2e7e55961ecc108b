# kloosterman.py
# =============================================================================
# 超 Kloosterman 和 Kl_n(c, p^β)。 / Hyper-Kloosterman sums Kl_n(c, p^β).
#
# 在 dlog 坐标下 Kl_n 是 E[k] = e(g^k/q) 的 n 重循环卷积：
#   naive : 直接枚举单位元组；
#   dp    : n−1 次直接循环卷积，O(n φ²)；
#   fft_dp: 同一卷积用 FFT 完成，O(n φ log φ)；
#   salie : β 偶、β ≥ 4、p ∤ n 时的根和闭式（见 salie.py）。
# / In dlog coordinates Kl_n is the n-fold cyclic self-convolution of
#   E[k] = e(g^k/q); the four methods evaluate it in different ways.
# =============================================================================

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from hkv.arith.characters import additive_phase
from hkv.arith.modulus import PrimePowerModulus, UnitGroup, build_unit_group
from hkv.errors import InvalidArgument
from hkv.numerics.summation import ArrayAccumulator, ComplexAccumulator

logger = logging.getLogger(__name__)


class KloostermanMethod(str, Enum):
    NAIVE = "naive"
    DP = "dp"
    FFT_DP = "fft_dp"
    SALIE = "salie"


ORACLE_METHODS = (KloostermanMethod.NAIVE, KloostermanMethod.DP, KloostermanMethod.FFT_DP)


@dataclass(frozen=True)
class KloostermanQuery:
    """Kl_n(c, p^β) 的查询。pm=True 时求 Kl_n(c) + Kl_n(−c)。
    / A query for Kl_n(c, p^β); pm=True asks for the symmetrized pair.
    """

    n: int
    c: int
    modulus: PrimePowerModulus
    method: KloostermanMethod = KloostermanMethod.FFT_DP
    pm: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", KloostermanMethod(self.method))
        if self.n < 1:
            raise InvalidArgument(f"n must be >= 1, got {self.n}")
        if math.gcd(int(self.c), self.modulus.p) != 1:
            raise InvalidArgument(f"c={self.c} must be coprime to p={self.modulus.p}")
        if self.method is KloostermanMethod.SALIE:
            from hkv.arith.salie import check_salie_available

            check_salie_available(self.n, self.modulus)


def _exp_vector(group: UnitGroup) -> np.ndarray:
    return additive_phase(group.powers, group.q)


def _scatter(group: UnitGroup, by_log: np.ndarray) -> np.ndarray:
    out = np.zeros(group.q, dtype=np.complex128)
    out[group.powers] = by_log
    return out


# -----------------------------------------------------------------------------
# naive
# -----------------------------------------------------------------------------
def _naive_single(n: int, c: int, group: UnitGroup) -> complex:
    q = group.q
    if n == 1:
        return complex(additive_phase(c, q))
    units = group.powers
    inv = group.inverse_table()
    acc = ComplexAccumulator()
    # 前 n−2 个变量逐一枚举，第 n−1 个向量化，x_n 由乘积确定。
    for prefix in itertools.product(units.tolist(), repeat=n - 2):
        prod = 1
        total = 0
        for x in prefix:
            prod = prod * x % q
            total += x
        x_last = (c * inv[(prod * units) % q]) % q
        phase = (total + units + x_last) % q
        acc.add(np.sum(additive_phase(phase, q)))
    return acc.value


def _naive_table(n: int, group: UnitGroup) -> np.ndarray:
    phi = group.order
    q = group.q
    e_vec = _exp_vector(group)
    if n == 1:
        return e_vec.copy()
    powers = group.powers
    k = np.arange(phi, dtype=np.int64)
    pair_phase = ((powers[:, None] + powers[None, :]) % q).ravel()
    pair_class = ((k[:, None] + k[None, :]) % phi).ravel()
    acc = ArrayAccumulator(phi)
    for prefix in itertools.product(range(phi), repeat=n - 2):
        base_class = sum(prefix) % phi
        base_phase = int(sum(int(powers[j]) for j in prefix)) % q
        phase = additive_phase(pair_phase + base_phase, q)
        cls = (pair_class + base_class) % phi
        block = np.bincount(cls, weights=phase.real, minlength=phi) + 1j * np.bincount(
            cls, weights=phase.imag, minlength=phi
        )
        acc.add(block)
    return acc.value


# -----------------------------------------------------------------------------
# dp / fft_dp
# -----------------------------------------------------------------------------
def _dp_table(n: int, group: UnitGroup) -> np.ndarray:
    e_vec = _exp_vector(group)
    f = e_vec.copy()
    for _ in range(n - 1):
        # f_{j+1}[k] = Σ_l f_j[k − l] E[l]
        acc = ArrayAccumulator(group.order)
        for shift in range(group.order):
            acc.add(e_vec[shift] * np.roll(f, shift))
        f = acc.value
    return f


def _fft_dp_table(n: int, group: UnitGroup) -> np.ndarray:
    e_vec = _exp_vector(group)
    if n == 1:
        return e_vec.copy()
    spectrum = np.fft.fft(e_vec)
    return np.fft.ifft(spectrum**n)


@lru_cache(maxsize=32)
def _cached_table(n: int, m: PrimePowerModulus, method: KloostermanMethod) -> np.ndarray:
    group = build_unit_group(m)
    start = time.perf_counter()
    if method is KloostermanMethod.NAIVE:
        by_log = _naive_table(n, group)
    elif method is KloostermanMethod.DP:
        by_log = _dp_table(n, group)
    elif method is KloostermanMethod.FFT_DP:
        by_log = _fft_dp_table(n, group)
    else:
        from hkv.arith.salie import salie_table

        table = salie_table(n, m)
        table.setflags(write=False)
        return table
    table = _scatter(group, by_log)
    table.setflags(write=False)
    logger.debug(
        "Kl_%d table mod %s by %s in %.3fs", n, m.label(), method.value, time.perf_counter() - start
    )
    return table


def kloosterman_table(
    n: int,
    modulus: PrimePowerModulus,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> np.ndarray:
    """Kl_n(c, p^β) 对全部剩余类 c（非单位处为 0）。 / Kl_n(c) for every residue c, zero on non-units."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    method = KloostermanMethod(method)
    if method is KloostermanMethod.SALIE:
        from hkv.arith.salie import check_salie_available

        check_salie_available(n, modulus)
    return _cached_table(int(n), modulus, method)


def kloosterman_pm_table(
    n: int,
    modulus: PrimePowerModulus,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> np.ndarray:
    """Kl_n(c) + Kl_n(−c)。"""
    table = kloosterman_table(n, modulus, method)
    return table + table[(-np.arange(modulus.modulus)) % modulus.modulus]


def kloosterman(query: KloostermanQuery) -> complex:
    """单个 Kl_n(c, p^β)（pm 时为对称和）。 / A single Kl_n(c, p^β), or the symmetrized pair."""
    m = query.modulus
    q = m.modulus
    targets = [query.c % q, (-query.c) % q] if query.pm else [query.c % q]
    if query.method is KloostermanMethod.NAIVE:
        group = build_unit_group(m)
        return sum((_naive_single(query.n, c, group) for c in targets), 0j)
    if query.method is KloostermanMethod.SALIE:
        from hkv.arith.salie import salie_kloosterman

        return sum((salie_kloosterman(c, query.n, m) for c in targets), 0j)
    table = kloosterman_table(query.n, m, query.method)
    return complex(sum(complex(table[c]) for c in targets))


def kloosterman_zero_pm_table(modulus: PrimePowerModulus) -> np.ndarray:
    """Kl_0(±y, p^β)：β ≥ 2 时 (φ(p)/p)[y ≡ ±1 mod p^β] − (1/p)[y ≡ ±1 mod p^{β−1}, y ≢ ±1 mod p^β]，
    β = 1 时 [y ≡ ±1 mod p]。
    / The degree-zero symmetrized sum as a function of y mod p^β.
    """
    p, beta, q = modulus.p, modulus.beta, modulus.modulus
    y = np.arange(q, dtype=np.int64)
    top = (y == 1) | (y == q - 1)
    if beta == 1:
        return top.astype(np.float64)
    low_mod = p ** (beta - 1)
    low = ((y % low_mod) == 1) | ((y % low_mod) == low_mod - 1)
    out = np.zeros(q, dtype=np.float64)
    out[top] = (p - 1) / p
    out[low & ~top] = -1.0 / p
    return out


def kloosterman_class_table(j: int, modulus: PrimePowerModulus) -> np.ndarray:
    """Kl_j(±y) 对全部 y；j = 0 时为零次对称和。 / Kl_j(±y) for every y, the degree-zero table when j = 0."""
    if j == 0:
        return kloosterman_zero_pm_table(modulus).astype(np.complex128)
    return kloosterman_pm_table(j, modulus)


def kloosterman_class_at_multiple(j: int, modulus: PrimePowerModulus, factor: int) -> np.ndarray:
    """Kl_j(±u·factor)，u 遍历剩余类，非单位处为 0。 / Kl_j(±u·factor) across residues u, zero off the units."""
    q = modulus.modulus
    table = kloosterman_class_table(j, modulus)
    out = table[(np.arange(q, dtype=np.int64) * (factor % q)) % q].astype(np.complex128)
    out[~build_unit_group(modulus).unit_mask()] = 0.0
    return out


def time_method(n: int, c: int, modulus: PrimePowerModulus, method: KloostermanMethod | str) -> tuple[complex, int]:
    """求值并返回耗时（纳秒，绕过缓存）。 / Evaluate once and return the elapsed nanoseconds, cache bypassed."""
    method = KloostermanMethod(method)
    group = build_unit_group(modulus)
    start = time.perf_counter_ns()
    if method is KloostermanMethod.NAIVE:
        value = _naive_single(n, c % modulus.modulus, group)
    elif method is KloostermanMethod.DP:
        value = complex(_scatter(group, _dp_table(n, group))[c % modulus.modulus])
    elif method is KloostermanMethod.FFT_DP:
        value = complex(_scatter(group, _fft_dp_table(n, group))[c % modulus.modulus])
    else:
        from hkv.arith.salie import salie_kloosterman

        value = salie_kloosterman(c, n, modulus)
    return value, time.perf_counter_ns() - start


__all__ = [
    "KloostermanMethod",
    "KloostermanQuery",
    "ORACLE_METHODS",
    "kloosterman",
    "kloosterman_class_at_multiple",
    "kloosterman_class_table",
    "kloosterman_pm_table",
    "kloosterman_table",
    "kloosterman_zero_pm_table",
    "time_method",
]
