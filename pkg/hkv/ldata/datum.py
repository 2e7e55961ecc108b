# datum.py
# =============================================================================
# L 函数数据：由偶原特征构成的等压（isobaric）数据 π = ξ₁ ⊞ … ⊞ ξ_n。
# / L-function data: the isobaric datum π = ξ₁ ⊞ … ⊞ ξ_n of even primitive
#   characters.
#
#   a(m) = Σ_{m₁⋯m_n = m} ∏ ξ_i(m_i)      N = ∏ q_i
#   W = ∏ τ(ξ_i)/√q_i                      ω = ∏ ξ_i         μ_j = 0
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy

from hkv.analytic.gamma import GammaData
from hkv.arith.characters import DirichletCharacter, gauss_sum
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import InvalidArgument, TrivialCharacter
from hkv.numerics.sieve import dirichlet_convolve

logger = logging.getLogger(__name__)

DATUM_SCHEMA = 1


@dataclass(frozen=True)
class EulerFactorP:
    """p 处的 Euler 因子：ε_p(s) = ∏(1 − ξ_i(p) p^{−s})，ε̄_p 取共轭根。
    / Reciprocal Euler factor at p; ε̄_p uses the conjugate roots.
    """

    p: int
    roots: tuple[complex, ...]

    def _product(self, s: complex | np.ndarray, roots: Iterable[complex]) -> complex | np.ndarray:
        z = np.asarray(s, dtype=np.complex128)
        out = np.ones_like(z)
        ps = np.exp(-z * math.log(self.p))
        for r in roots:
            out = out * (1.0 - r * ps)
        return complex(out) if out.ndim == 0 else out

    def eps(self, s: complex | np.ndarray) -> complex | np.ndarray:
        return self._product(s, self.roots)

    def eps_bar(self, s: complex | np.ndarray) -> complex | np.ndarray:
        return self._product(s, [r.conjugate() for r in self.roots])

    @property
    def conj_roots(self) -> tuple[complex, ...]:
        return tuple(r.conjugate() for r in self.roots)

    @classmethod
    def for_character(cls, xi: DirichletCharacter, p: int) -> "EulerFactorP":
        """GL₁ 情形 ε_p(s, ξ) = 1 − ξ(p) p^{−s}。"""
        return cls(p=p, roots=(complex(xi(p)),))

    def to_dict(self) -> dict[str, object]:
        return {"p": self.p, "roots": list(self.roots)}


@dataclass(frozen=True, eq=False)
class LData:
    """次数 n 的 L 函数数据。 / A degree-n L-function datum."""

    components: tuple[DirichletCharacter, ...]

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def N(self) -> int:
        return math.prod(xi.q for xi in self.components)

    @property
    def gamma(self) -> GammaData:
        return GammaData.trivial(self.n)

    @cached_property
    def W(self) -> complex:
        out = 1 + 0j
        for xi in self.components:
            out *= gauss_sum(xi) / math.sqrt(xi.q)
        return out

    @property
    def key(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(xi.key for xi in self.components)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LData) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"LData({self.spec()})"

    def omega(self, m: int | np.ndarray) -> complex | np.ndarray:
        """中心特征 ω(m) = ∏ ξ_i(m)。 / Central character."""
        if isinstance(m, np.ndarray):
            out = np.ones(m.shape, dtype=np.complex128)
            for xi in self.components:
                out *= xi(m)
            return out
        out = 1 + 0j
        for xi in self.components:
            out *= xi(int(m))
        return out

    def dual(self) -> "LData":
        """逆步数据 π̃：系数 ā(m)。 / The contragredient datum with coefficients ā(m)."""
        return LData(tuple(xi.conj() for xi in self.components))

    def euler_factor(self, p: int) -> EulerFactorP:
        if self.N % p == 0:
            raise InvalidArgument(f"p={p} divides the conductor N={self.N}")
        return EulerFactorP(p=p, roots=tuple(complex(xi(p)) for xi in self.components))

    def check_coprime(self, p: int) -> None:
        if self.N % p == 0:
            raise InvalidArgument(f"gcd(N, p) must be 1, got N={self.N}, p={p}")

    def coeff_range(self, M: int) -> np.ndarray:
        return coeff_range(self, M)

    def spec(self) -> str:
        return ",".join(f"{xi.q}:{xi.index}" for xi in self.components)

    def to_dict(self) -> dict[str, object]:
        return {
            "schema": DATUM_SCHEMA,
            "n": self.n,
            "N": self.N,
            "components": [{"q": xi.q, "index": xi.index} for xi in self.components],
            "W_re": self.W.real,
            "W_im": self.W.imag,
        }


def _modulus_of(q: int) -> PrimePowerModulus:
    factors = sympy.factorint(int(q))
    if len(factors) != 1:
        raise InvalidArgument(f"component modulus {q} must be an odd prime power")
    (p, e), = factors.items()
    return PrimePowerModulus(int(p), int(e))


def character_from_spec(q: int, index: int) -> DirichletCharacter:
    return DirichletCharacter(build_unit_group(_modulus_of(q)), int(index))


def isobaric_character_data(
    components: Sequence[DirichletCharacter],
    *,
    allow_trivial: bool = False,
) -> LData:
    """构造 π = ξ₁ ⊞ … ⊞ ξ_n；只接受偶原特征。 / Build the isobaric datum from even primitive characters."""
    components = tuple(components)
    if not components:
        raise InvalidArgument("an isobaric datum needs at least one component")
    for xi in components:
        if not xi.even:
            raise InvalidArgument(f"component {xi!r} is odd; only even characters are admitted")
        if xi.is_trivial:
            if not allow_trivial:
                raise TrivialCharacter(f"component {xi!r} is trivial")
        elif not xi.primitive:
            raise InvalidArgument(f"component {xi!r} is not primitive")
    datum = LData(components)
    logger.debug("isobaric datum %s: n=%d N=%d", datum.spec(), datum.n, datum.N)
    return datum


def parse_components(text: str) -> list[DirichletCharacter]:
    """解析 "q1:t1,q2:t2"。 / Parse a "q1:t1,q2:t2" component list."""
    out: list[DirichletCharacter] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            q_text, t_text = chunk.split(":")
            out.append(character_from_spec(int(q_text), int(t_text)))
        except ValueError as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"cannot parse component '{chunk}'; expected q:t") from exc
    if not out:
        raise InvalidArgument("empty component list")
    return out


def datum_from_spec(text: str, *, allow_trivial: bool = False) -> LData:
    return isobaric_character_data(parse_components(text), allow_trivial=allow_trivial)


def datum_from_dict(document: dict) -> LData:
    if document.get("schema") != DATUM_SCHEMA:
        raise InvalidArgument(f"unsupported datum schema {document.get('schema')!r}")
    comps = [character_from_spec(c["q"], c["index"]) for c in document["components"]]
    return isobaric_character_data(comps, allow_trivial=True)


@lru_cache(maxsize=16)
def _coeff_cached(key: tuple, M: int) -> np.ndarray:
    comps = [character_from_spec(p**beta, t) for p, beta, t in key]
    m = np.arange(M + 1, dtype=np.int64)
    table: np.ndarray | None = None
    for xi in comps:
        seq = xi(m).astype(np.complex128)
        seq[0] = 0.0
        table = seq if table is None else dirichlet_convolve(table, seq)
    table.setflags(write=False)
    return table


def coeff_range(d: LData, M: int) -> np.ndarray:
    """a(m)，0 ≤ m ≤ M（下标 0 为 0，只读）。 / a(m) for 0 ≤ m ≤ M; index 0 unused."""
    if M < 1:
        raise InvalidArgument(f"M must be >= 1, got {M}")
    return _coeff_cached(d.key, int(M))


def molteni_check(d: LData, M: int) -> tuple[bool, float]:
    """Σ_{m≤x} |a(m)|/m ≤ (1 + log x)^n 对全部 x ≤ M。返回 (是否成立, 最大比值)。
    / Check the averaged coefficient bound for every x ≤ M; returns (holds, worst ratio).
    """
    a = np.abs(coeff_range(d, M))
    m = np.arange(1, M + 1, dtype=np.float64)
    partial = np.cumsum(a[1:] / m)
    envelope = (1.0 + np.log(m)) ** d.n
    ratio = float(np.max(partial / envelope))
    return ratio <= 1.0 + 1e-12, ratio


__all__ = [
    "DATUM_SCHEMA",
    "EulerFactorP",
    "LData",
    "character_from_spec",
    "coeff_range",
    "datum_from_dict",
    "datum_from_spec",
    "isobaric_character_data",
    "molteni_check",
    "parse_components",
]
