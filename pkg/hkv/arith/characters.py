# characters.py
# =============================================================================
# 素数幂模的 Dirichlet 特征与 Gauss 和。
# / Dirichlet characters of prime-power modulus and their Gauss sums.
#
# 特征以指数 t 编号：χ_t(g^k) = e(tk/φ)。所有相位先在整数上约化再转浮点。
# / Characters are indexed by t with χ_t(g^k) = e(tk/φ); phases are reduced
#   exactly in integers before conversion to floating point.
# =============================================================================

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from hkv.arith.modulus import PrimePowerModulus, UnitGroup, build_unit_group, euler_phi_prime_power, p_valuation
from hkv.errors import InvalidArgument
from hkv.numerics.summation import csum

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class CharacterFilter(str, Enum):
    ALL = "all"
    PRIMITIVE = "primitive"
    PRIMITIVE_EVEN = "primitive_even"


def additive_phase(residues: np.ndarray | int, q: int) -> np.ndarray:
    """e(r/q)，r 先精确约化。 / e(r/q) with r reduced exactly first."""
    r = np.mod(np.asarray(residues, dtype=np.int64), q)
    return np.exp(1j * TWO_PI * (r / q))


def root_of_unity_table(order: int) -> np.ndarray:
    """e(k/order)，0 ≤ k < order。"""
    return np.exp(1j * TWO_PI * (np.arange(order, dtype=np.int64) / order))


def index_is_even(t: int) -> bool:
    return int(t) % 2 == 0


def index_is_primitive(t: int, m: PrimePowerModulus) -> bool:
    t = int(t) % m.phi
    if m.beta == 1:
        return t != 0
    return t % m.p != 0


def conductor_exponent(t: int, m: PrimePowerModulus) -> int:
    t = int(t) % m.phi
    if t == 0:
        return 0
    return m.beta - min(p_valuation(t, m.p), m.beta - 1)


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """模 p^β 的特征 χ_t。 / The character χ_t mod p^β."""

    group: UnitGroup
    index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", int(self.index) % self.group.order)

    @property
    def modulus(self) -> PrimePowerModulus:
        return self.group.modulus

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def even(self) -> bool:
        return index_is_even(self.index)

    @property
    def primitive(self) -> bool:
        return index_is_primitive(self.index, self.modulus)

    @property
    def is_trivial(self) -> bool:
        return self.index == 0

    @property
    def conductor_exponent(self) -> int:
        return conductor_exponent(self.index, self.modulus)

    @property
    def conductor(self) -> int:
        return self.modulus.p ** self.conductor_exponent

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.modulus.p, self.modulus.beta, self.index)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DirichletCharacter) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"DirichletCharacter(mod={self.q}, index={self.index})"

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.group, -self.index)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus:
            raise InvalidArgument("characters must share a modulus to be multiplied")
        return DirichletCharacter(self.group, self.index + other.index)

    def exponent_table(self) -> np.ndarray:
        """整数指数 t·dlog(x) mod φ；非单位为 −1。 / Integer exponent table, −1 on non-units."""
        dlog = self.group.dlog
        exps = (self.index * dlog) % self.group.order
        return np.where(dlog < 0, -1, exps)

    @cached_property
    def _values(self) -> np.ndarray:
        phases = root_of_unity_table(self.group.order)
        exps = self.exponent_table()
        vals = np.where(exps < 0, 0.0, phases[np.maximum(exps, 0)])
        vals.setflags(write=False)
        return vals

    def values(self) -> np.ndarray:
        """χ(x)，0 ≤ x < q。 / χ(x) for every residue x."""
        return self._values

    def __call__(self, x: int | np.ndarray) -> complex | np.ndarray:
        if isinstance(x, np.ndarray):
            return self._values[np.mod(x, self.q)]
        return complex(self._values[int(x) % self.q])

    def to_dict(self) -> dict[str, object]:
        return {
            "modulus": self.q,
            "index": self.index,
            "even": self.even,
            "primitive": self.primitive,
            "conductor": self.conductor,
        }


def character_indices(group: UnitGroup, filter: CharacterFilter | str = CharacterFilter.ALL) -> np.ndarray:
    """满足过滤条件的指数 t（升序）。 / Indices t passing the filter, ascending."""
    flt = CharacterFilter(filter)
    m = group.modulus
    t = np.arange(group.order, dtype=np.int64)
    if flt is CharacterFilter.ALL:
        return t
    if m.beta == 1:
        mask = t != 0
    else:
        mask = t % m.p != 0
    if flt is CharacterFilter.PRIMITIVE_EVEN:
        mask &= t % 2 == 0
    return t[mask]


def list_characters(group: UnitGroup, filter: CharacterFilter | str = CharacterFilter.ALL) -> list[DirichletCharacter]:
    """列出特征。 / Enumerate the characters passing the filter."""
    chars = [DirichletCharacter(group, int(t)) for t in character_indices(group, filter)]
    logger.debug("characters mod %s (%s): %d", group.q, CharacterFilter(filter).value, len(chars))
    return chars


def character_table(group: UnitGroup, indices: Sequence[int] | np.ndarray) -> np.ndarray:
    """矩阵 χ_t(x)，行对应 t。 / Matrix of χ_t(x), one row per index."""
    idx = np.asarray(indices, dtype=np.int64)
    dlog = group.dlog
    exps = (idx[:, None] * np.maximum(dlog, 0)[None, :]) % group.order
    table = root_of_unity_table(group.order)[exps]
    table[:, dlog < 0] = 0.0
    return table


def character_sum_over(group: UnitGroup, indices: Iterable[int], weights: np.ndarray | None = None) -> np.ndarray:
    """Σ_{t∈S} w_t χ_t(x)，对所有 x 一次 FFT 得到。 / Σ_t w_t χ_t(x) for all x by one FFT.

    在 dlog 坐标中 Σ_t w_t e(tk/φ) = φ · ifft(w)[k]。
    """
    phi = group.order
    spectrum = np.zeros(phi, dtype=np.complex128)
    idx = np.asarray(list(indices), dtype=np.int64) % phi
    w = np.ones(idx.size, dtype=np.complex128) if weights is None else np.asarray(weights, dtype=np.complex128)
    np.add.at(spectrum, idx, w)
    by_log = phi * np.fft.ifft(spectrum)
    out = np.zeros(group.q, dtype=np.complex128)
    out[group.powers] = by_log
    return out


def gauss_sum(chi: DirichletCharacter) -> complex:
    """τ(χ) = Σ_a χ(a) e(a/q)，补偿求和。 / Gauss sum by compensated summation."""
    group = chi.group
    k = np.arange(group.order, dtype=np.int64)
    terms = root_of_unity_table(group.order)[(chi.index * k) % group.order] * additive_phase(group.powers, group.q)
    return csum(terms)


@lru_cache(maxsize=32)
def _gauss_table(m: PrimePowerModulus) -> np.ndarray:
    group = build_unit_group(m)
    e_vec = additive_phase(group.powers, group.q)
    table = group.order * np.fft.ifft(e_vec)
    table.setflags(write=False)
    return table


def gauss_sum_table(group: UnitGroup) -> np.ndarray:
    """全部 τ(χ_t)，按 t 编号；一次长度 φ 的 FFT。 / τ(χ_t) for every t via one FFT.

    τ(χ_t) = Σ_k e(tk/φ) e(g^k/q) = φ · ifft(E)[t]，E[k] = e(g^k/q)。
    """
    return _gauss_table(group.modulus)


def trivial_gauss_sum(m: PrimePowerModulus) -> int:
    """平凡特征的 Gauss 和（Ramanujan 和 c_q(1)）。 / Gauss sum of the trivial character."""
    return -1 if m.beta == 1 else 0


@dataclass(frozen=True, eq=False)
class CharacterProduct:
    """两两互素模的特征之积 ∏ψ_f，模 Q = ∏ q_f。
    / Product of characters with pairwise coprime moduli, read modulo Q = ∏ q_f.
    """

    factors: tuple[DirichletCharacter, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise InvalidArgument("a character product needs at least one factor")
        primes = [f.modulus.p for f in factors]
        if len(set(primes)) != len(primes):
            raise InvalidArgument(f"factor moduli must be pairwise coprime, got primes {primes}")
        object.__setattr__(self, "factors", factors)

    @property
    def q(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.q
        return out

    @property
    def even(self) -> bool:
        return sum(0 if f.even else 1 for f in self.factors) % 2 == 0

    @property
    def primitive(self) -> bool:
        return all(f.primitive for f in self.factors)

    @property
    def is_trivial(self) -> bool:
        return all(f.is_trivial for f in self.factors)

    @property
    def conductor(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.conductor
        return out

    @property
    def key(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(f.key for f in self.factors)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CharacterProduct) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def conj(self) -> "CharacterProduct":
        return CharacterProduct(tuple(f.conj() for f in self.factors))

    @cached_property
    def _values(self) -> np.ndarray:
        r = np.arange(self.q, dtype=np.int64)
        vals = np.ones(self.q, dtype=np.complex128)
        for f in self.factors:
            vals *= f.values()[r % f.q]
        vals.setflags(write=False)
        return vals

    def values(self) -> np.ndarray:
        return self._values

    def __call__(self, x: int | np.ndarray) -> complex | np.ndarray:
        if isinstance(x, np.ndarray):
            return self._values[np.mod(x, self.q)]
        return complex(self._values[int(x) % self.q])

    def gauss_sum(self) -> complex:
        """τ(∏ψ_f) = ∏ ψ_f(Q/q_f) τ(ψ_f)。"""
        Q = self.q
        out = 1 + 0j
        for f in self.factors:
            out *= f(Q // f.q) * gauss_sum(f)
        return out

    def to_dict(self) -> dict[str, object]:
        return {"modulus": self.q, "factors": [f.to_dict() for f in self.factors]}


__all__ = [
    "CharacterFilter",
    "CharacterProduct",
    "DirichletCharacter",
    "additive_phase",
    "character_indices",
    "character_sum_over",
    "character_table",
    "conductor_exponent",
    "euler_phi_prime_power",
    "gauss_sum",
    "gauss_sum_table",
    "index_is_even",
    "index_is_primitive",
    "list_characters",
    "root_of_unity_table",
    "trivial_gauss_sum",
]
