# modulus.py
# =============================================================================
# 素数幂模数与循环单位群。 / Prime-power moduli and their cyclic unit groups.
#
# 生成元取模 p² 的最小原根，它对所有 β 都生成 (ℤ/p^βℤ)^×；
# dlog 表在非单位处取 −1。
# / The generator is the smallest primitive root mod p², which generates
#   (ℤ/p^βℤ)^× for every β; the dlog table holds −1 on non-units.
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from sympy import isprime
from sympy.ntheory import n_order

from hkv.errors import InvalidArgument, ModulusOverflow, NotCyclic

logger = logging.getLogger(__name__)

# 残类乘积需在 int64 中精确：q² < 2^63。 / Residue products must stay exact in int64.
MAX_MODULUS = 2**31 - 1


def p_valuation(value: int, p: int) -> int:
    """v_p(value)；value = 0 时返回无穷大的替代值 64。 / v_p(value), 64 standing in for +∞ at 0."""
    value = abs(int(value))
    if value == 0:
        return 64
    v = 0
    while value % p == 0:
        value //= p
        v += 1
    return v


def euler_phi_prime_power(p: int, exponent: int) -> int:
    """φ(p^e)，约定 φ(1) = 1。 / φ(p^e) with φ(1) = 1."""
    if exponent <= 0:
        return 1
    return p ** (exponent - 1) * (p - 1)


@dataclass(frozen=True)
class PrimePowerModulus:
    """模数 p^β。 / The modulus p^β."""

    p: int
    beta: int

    def __post_init__(self) -> None:
        if self.beta < 1:
            raise InvalidArgument(f"beta must be >= 1, got {self.beta}")
        if self.p == 2:
            raise NotCyclic("p = 2 is not supported: the unit group mod 2^beta is not cyclic for beta >= 3")
        if self.p < 3 or not isprime(self.p):
            raise InvalidArgument(f"p must be an odd prime, got {self.p}")
        if self.p**self.beta > MAX_MODULUS:
            raise ModulusOverflow(f"{self.p}^{self.beta} exceeds the supported modulus bound {MAX_MODULUS}")

    @property
    def modulus(self) -> int:
        return self.p**self.beta

    @property
    def alpha(self) -> Optional[int]:
        return self.beta // 2 if self.beta % 2 == 0 else None

    @property
    def phi(self) -> int:
        return euler_phi_prime_power(self.p, self.beta)

    @property
    def phi_star(self) -> int:
        """本原特征个数 φ*(p^β) = φ(p^β) − φ(p^{β−1})。 / Number of primitive characters."""
        return self.phi - euler_phi_prime_power(self.p, self.beta - 1)

    @property
    def primitive_even_count(self) -> int:
        return (self.p - 3) // 2 if self.beta == 1 else self.phi_star // 2

    def reduced(self, beta: int) -> "PrimePowerModulus":
        return PrimePowerModulus(self.p, beta)

    def label(self) -> str:
        return f"{self.p}^{self.beta}"

    def to_dict(self) -> dict[str, int]:
        return {"p": self.p, "beta": self.beta, "modulus": self.modulus}


@lru_cache(maxsize=None)
def smallest_generator(p: int) -> int:
    """模 p² 的最小原根。 / Smallest primitive root mod p²."""
    target = p * (p - 1)
    square = p * p
    for g in range(2, square):
        if math.gcd(g, p) == 1 and n_order(g, square) == target:
            return g
    raise NotCyclic(f"no primitive root found mod {p}^2")


@dataclass(frozen=True, eq=False)
class UnitGroup:
    """(ℤ/p^βℤ)^× 及其离散对数表。 / The unit group with its discrete-log table.

    powers[k] = g^k mod q（0 ≤ k < φ），dlog[powers[k]] = k，非单位 dlog = −1。
    / powers[k] = g^k mod q, dlog[powers[k]] = k, dlog = −1 on non-units.
    """

    modulus: PrimePowerModulus
    generator: int
    order: int
    powers: np.ndarray = field(repr=False)
    dlog: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.modulus.modulus

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def beta(self) -> int:
        return self.modulus.beta

    def is_unit(self, x: int) -> bool:
        return int(self.dlog[int(x) % self.q]) >= 0

    def log(self, x: int) -> int:
        k = int(self.dlog[int(x) % self.q])
        if k < 0:
            raise InvalidArgument(f"{x} is not a unit mod {self.q}")
        return k

    def exp(self, k: int) -> int:
        return int(self.powers[int(k) % self.order])

    def inverse(self, x: int) -> int:
        return self.exp(-self.log(x))

    def inverse_table(self) -> np.ndarray:
        """inv[x] = x̄ on units, 0 elsewhere."""
        inv = np.zeros(self.q, dtype=np.int64)
        inv[self.powers] = self.powers[(-np.arange(self.order)) % self.order]
        return inv

    def units(self) -> np.ndarray:
        return np.sort(self.powers)

    def unit_mask(self) -> np.ndarray:
        return self.dlog >= 0

    def pm_indicator(self, c: int) -> np.ndarray:
        """[u ≡ ±c mod q]，u 遍历全部剩余类。 / Indicator of u ≡ ±c over every residue."""
        u = np.arange(self.q, dtype=np.int64)
        return ((u == int(c) % self.q) | (u == (-int(c)) % self.q)).astype(np.float64)


def _generator_powers(g: int, order: int, q: int) -> np.ndarray:
    # 分块：g^{aB+b} = (g^B)^a · g^b，两段循环长度均约 √φ。
    # / Blocked as g^{aB+b} = (g^B)^a · g^b with both loops of length about √φ.
    block = math.isqrt(order) + 1
    small = np.empty(block, dtype=np.int64)
    value = 1
    for b in range(block):
        small[b] = value
        value = value * g % q
    step = value
    rows = (order + block - 1) // block
    big = np.empty(rows, dtype=np.int64)
    value = 1
    for a in range(rows):
        big[a] = value
        value = value * step % q
    table = (big[:, None] * small[None, :]) % q
    return table.ravel()[:order].copy()


@lru_cache(maxsize=64)
def build_unit_group(m: PrimePowerModulus) -> UnitGroup:
    """构造单位群。 / Build the cyclic unit group mod p^β."""
    q = m.modulus
    order = m.phi
    g = smallest_generator(m.p) % q
    powers = _generator_powers(g, order, q)
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[powers] = np.arange(order, dtype=np.int64)
    powers.setflags(write=False)
    dlog.setflags(write=False)
    logger.debug("unit group mod %s: generator %s, order %s", m.label(), g, order)
    return UnitGroup(modulus=m, generator=int(g), order=order, powers=powers, dlog=dlog)


__all__ = [
    "MAX_MODULUS",
    "PrimePowerModulus",
    "UnitGroup",
    "build_unit_group",
    "euler_phi_prime_power",
    "p_valuation",
    "smallest_generator",
]
