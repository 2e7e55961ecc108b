# families.py
# =============================================================================
# 三族 Dirichlet 级数及其两侧求值。 / The three Dirichlet-series families and their two sides.
#
#   additive_D   D(π,h,q,s)   = Σ_{(m,p)=1} a(m) (e(mh/q)+e(−mh/q)) m^{−s}
#   hk_gln       𝔎_n(π,h,q,s) = Σ_{(m,p)=1} a(m) Kl_n(±mh, q) m^{−s}，n = deg π
#   hk_gl1       𝔎_n⁰(ξ,h,q,s) = Σ_{(m,p)=1} ξ(m) Kl_n(±mh, q) m^{−s}
#   hk_gl1_base  𝔎_0⁰(ξ,h,q,s) 按剩余类权重给出的基础情形
#
# 统一写法：扭曲指数 k（D 为 1，hk_gln 为 deg π，hk_gl1 为 n，基础情形为 0）。
# 左侧 = Σ a(m) K_L(m mod q) m^{−s}，三条路径：
#   raw          直接截断（Re s > 1）
#   characters   (2/φ)[Σ_{χ 本原偶} χ̄(h)τ(χ)^k L(s,π⊗χ̄) + [β=1](−1)^k L^{(p)}(s,π)]，全平面
#   progression  Hurwitz 剩余类级数配对，全平面
# 右侧（Re s < 0）见 functional.py。
# / Every family is a progression series with a residue-class weight; the
#   left side has three independent evaluation paths, the right side lives in
#   functional.py.
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from hkv.arith.characters import CharacterFilter, character_indices, character_table, gauss_sum_table
from hkv.arith.kloosterman import kloosterman_pm_table
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import InvalidArgument, ModeUnavailable, SideIllegalAtS
from hkv.ldata.datum import LData
from hkv.ldata.progression import ProgressionMode, class_series_for, direct_progression_sum
from hkv.ldata.twisted import MAX_TERMS, twisted_L_values
from hkv.numerics.summation import csum

logger = logging.getLogger(__name__)

DEFAULT_SERIES_TOL = 1e-9


class SeriesFamily(str, Enum):
    ADDITIVE_D = "additive_D"
    HK_GLN = "hk_gln"
    HK_GL1 = "hk_gl1"
    HK_GL1_BASE = "hk_gl1_base"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class LeftRoute(str, Enum):
    RAW = "raw"
    CHARACTERS = "characters"
    PROGRESSION = "progression"
    AUTO = "auto"


@dataclass(frozen=True)
class FamilyParams:
    """一族级数的参数：数据、模数、h 与（GL₁ 族的）扭曲指数 n。
    / Parameters shared by both sides: datum, modulus, h and the GL₁ twist exponent.
    """

    datum: LData
    modulus: PrimePowerModulus
    h: int
    n: Optional[int] = None  # 仅 hk_gl1 使用 / hk_gl1 only

    @property
    def q(self) -> int:
        return self.modulus.modulus

    def twist_exponent(self, family: SeriesFamily) -> int:
        family = SeriesFamily(family)
        if family is SeriesFamily.ADDITIVE_D:
            return 1
        if family is SeriesFamily.HK_GLN:
            return self.datum.n
        if family is SeriesFamily.HK_GL1:
            if self.n is None or self.n < 1:
                raise InvalidArgument(f"hk_gl1 needs a twist exponent n >= 1, got {self.n}")
            return self.n
        return 0

    def validate(self, family: SeriesFamily) -> None:
        family = SeriesFamily(family)
        p = self.modulus.p
        self.datum.check_coprime(p)
        if self.h % p == 0:
            raise InvalidArgument(f"h={self.h} must be coprime to p={p}")
        if family in (SeriesFamily.HK_GL1, SeriesFamily.HK_GL1_BASE) and self.datum.n != 1:
            raise InvalidArgument(f"{family.value} needs a degree-one datum, got degree {self.datum.n}")
        if family is SeriesFamily.HK_GL1_BASE and self.modulus.beta == 1 and p < 5:
            raise InvalidArgument("the prime-modulus base case divides by p − 3 and needs p >= 5")
        self.twist_exponent(family)

    def to_dict(self) -> dict[str, object]:
        return {
            "datum": self.datum.spec(),
            "p": self.modulus.p,
            "beta": self.modulus.beta,
            "h": self.h,
            "n": self.n,
        }


@dataclass(frozen=True)
class SeriesQuery:
    family: SeriesFamily
    params: FamilyParams
    s: complex
    side: Side = Side.LEFT
    route: LeftRoute = LeftRoute.AUTO
    progression_mode: ProgressionMode = ProgressionMode.HURWITZ
    M: Optional[int] = None  # 直接截断的最大项数 / Cap on directly summed terms
    tol: Optional[float] = DEFAULT_SERIES_TOL  # None：直接和求到上限 / None sums to the cap

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", SeriesFamily(self.family))
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "route", LeftRoute(self.route))
        object.__setattr__(self, "progression_mode", ProgressionMode(self.progression_mode))
        object.__setattr__(self, "s", complex(self.s))
        if self.M is not None and self.M < 1:
            raise InvalidArgument(f"M must be >= 1, got {self.M}")
        self.params.validate(self.family)


@dataclass
class SeriesValue:
    """带误差条的级数值。 / A series value with its error bar."""

    value: complex
    error: float
    side: str
    mode: str
    details: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {"value": self.value, "error": self.error, "side": self.side, "mode": self.mode, "details": self.details}


# -----------------------------------------------------------------------------
# 剩余类权重 / Residue-class weights
# -----------------------------------------------------------------------------
def base_weights(modulus: PrimePowerModulus, h: int) -> np.ndarray:
    """𝔎_0⁰ 的权重：
    β ≥ 2：[u ≡ ±h mod p^β] − (1/p)[u ≡ ±h mod p^{β−1}, u ≢ ±h mod p^β]；
    β = 1：[u ≡ ±h mod p] − (2/(p−3))[u ≢ ±h mod p]，u 取单位。
    """
    p, beta, q = modulus.p, modulus.beta, modulus.modulus
    if beta == 1 and p < 5:
        raise InvalidArgument("the prime-modulus base case needs p >= 5")
    group = build_unit_group(modulus)
    u = np.arange(q, dtype=np.int64)
    unit = group.dlog >= 0
    hq = h % q
    top = (u == hq) | (u == (-hq) % q)
    out = np.zeros(q, dtype=np.float64)
    out[top] = 1.0
    if beta == 1:
        out[unit & ~top] = -2.0 / (p - 3)
        return out
    low_mod = p ** (beta - 1)
    low = ((u % low_mod) == hq % low_mod) | ((u % low_mod) == (-hq) % low_mod)
    out[low & ~top] = -1.0 / p
    return out


def left_weights(family: SeriesFamily, params: FamilyParams) -> np.ndarray:
    """K_L(u) = Kl_k(±uh)（非单位为 0），基础情形取其定义权重。 / Left-side class weight."""
    family = SeriesFamily(family)
    if family is SeriesFamily.HK_GL1_BASE:
        return base_weights(params.modulus, params.h)
    k = params.twist_exponent(family)
    q = params.q
    table = kloosterman_pm_table(k, params.modulus)
    return table[(np.arange(q, dtype=np.int64) * (params.h % q)) % q]


# -----------------------------------------------------------------------------
# 左侧 / Left side
# -----------------------------------------------------------------------------
def _raw_left(query: SeriesQuery) -> SeriesValue:
    s = query.s
    if s.real <= 1.0:
        raise SideIllegalAtS(f"the raw series needs Re(s) > 1, got {s.real}")
    params = query.params
    weights = left_weights(query.family, params)
    value, bar, M = direct_progression_sum(
        params.datum, params.modulus, s, weights, tol=query.tol, max_terms=query.M or MAX_TERMS
    )
    return SeriesValue(value, bar, Side.LEFT.value, LeftRoute.RAW.value, {"M": M})


def character_decomposition(
    family: SeriesFamily, params: FamilyParams, s: complex
) -> tuple[complex, float, dict[str, object]]:
    """(2/φ)[Σ_{χ 本原偶} χ̄(h)τ(χ)^k L(s,π⊗χ̄) + [β=1](−1)^k L^{(p)}(s,π)]。"""
    family = SeriesFamily(family)
    if family is SeriesFamily.HK_GL1_BASE:
        raise ModeUnavailable("the base case has no character decomposition; use the progression route")
    k = params.twist_exponent(family)
    modulus = params.modulus
    group = build_unit_group(modulus)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    taus = gauss_sum_table(group)[idx]
    conj_idx = (-idx) % group.order
    # χ̄_t(h) = χ_{−t}(h)
    chi_bar_h = character_table(group, conj_idx)[:, params.h % params.q]
    values, bars = twisted_L_values(params.datum, modulus, conj_idx, s)
    coeff = chi_bar_h * taus**k
    total = csum(coeff * values)
    error = float(np.sum(np.abs(coeff) * bars))
    details: dict[str, object] = {"characters": int(idx.size)}
    if modulus.beta == 1:
        extra, extra_bar = class_series_for(params.datum, modulus, s).total()
        total += (-1) ** k * extra
        error += extra_bar
        details["trivial_character_term"] = (-1) ** k * extra
    scale = 2.0 / modulus.phi
    return scale * total, scale * error, details


def _left(query: SeriesQuery) -> SeriesValue:
    route = query.route
    if route is LeftRoute.AUTO:
        route = LeftRoute.PROGRESSION if query.family is SeriesFamily.HK_GL1_BASE else LeftRoute.CHARACTERS
    if route is LeftRoute.RAW:
        return _raw_left(query)
    if route is LeftRoute.CHARACTERS:
        value, error, details = character_decomposition(query.family, query.params, query.s)
        return SeriesValue(value, error, Side.LEFT.value, route.value, details)
    params = query.params
    value, error = class_series_for(params.datum, params.modulus, query.s).weighted(
        left_weights(query.family, params)
    )
    return SeriesValue(value, error, Side.LEFT.value, route.value)


def eval_series(query: SeriesQuery) -> SeriesValue:
    """求一侧的值。 / Evaluate one side of a family at s."""
    logger.debug(
        "eval_series %s side=%s s=%s params=%s", query.family.value, query.side.value, query.s, query.params.to_dict()
    )
    if query.side is Side.LEFT:
        return _left(query)
    from hkv.series.functional import right_side

    return right_side(query)


def left_smoothness(family: SeriesFamily, params: FamilyParams, s: complex, step: float = 1e-4) -> float:
    """|f(s+step) − f(s)| / step，用于左侧解析性的冒烟检查。 / Difference quotient of the continued left side."""
    a, _, _ = character_decomposition(family, params, complex(s))
    b, _, _ = character_decomposition(family, params, complex(s) + step)
    return abs(b - a) / step if math.isfinite(abs(b - a)) else math.inf


__all__ = [
    "DEFAULT_SERIES_TOL",
    "FamilyParams",
    "LeftRoute",
    "SeriesFamily",
    "SeriesQuery",
    "SeriesValue",
    "Side",
    "base_weights",
    "character_decomposition",
    "eval_series",
    "left_smoothness",
    "left_weights",
]
