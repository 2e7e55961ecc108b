# twisted.py
# =============================================================================
# 扭曲 L 值 L(s, π⊗χ)：series / product / afe 三种模式，以及函数方程残差。
# / Twisted L-values in three modes plus the functional-equation residual.
#
#   product  ∏_i L(s, ξ_i χ)，经 Hurwitz ζ 精确求值（全平面）
#   series   Σ_{m≤M} a(m) χ(m) m^{−s}，Re s > 1 + SERIES_MARGIN，d_n 尾项确证
#   afe      Σ a χ m^{−δ} V₁(m/Z) + ε·(Nq^n)^{1/2−δ} Σ ā χ̄ m^{−(1−δ)} V₂(mZ/(Nq^n))
#            ε = W ω(q) χ(N) (τ(χ)/√q)^n
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from hkv.analytic.gamma import F_ratio
from hkv.analytic.kernels import DEFAULT_WIDTH, CutoffFunction, KernelKind, TestFunctionK, evaluate_kernel
from hkv.arith.characters import DirichletCharacter, character_table, gauss_sum
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import InvalidArgument, ModeUnavailable, TailBoundExceedsTolerance
from hkv.ldata.datum import LData, coeff_range
from hkv.ldata.hurwitz import class_series, periodic_series
from hkv.numerics.summation import csum
from hkv.numerics.tails import dn_tail, weighted_tail_bound

logger = logging.getLogger(__name__)

SERIES_MARGIN = 0.25
SERIES_START = 4096
MAX_TERMS = 2_000_000
SERIES_TOL = 1e-8
AFE_TOL = 1e-11


class LMode(str, Enum):
    SERIES = "series"
    PRODUCT = "product"
    AFE = "afe"


@dataclass
class LValue:
    """带误差条的 L 值。 / An L-value with its error bar."""

    value: complex
    error: float
    mode: str
    details: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return {"value": self.value, "error": self.error, "mode": self.mode, "details": self.details}


def _combine_product(values: Sequence[complex], bars: Sequence[float]) -> tuple[complex, float]:
    total = 1 + 0j
    for v in values:
        total *= v
    err = 0.0
    for i, e in enumerate(bars):
        rest = 1.0
        for j, v in enumerate(values):
            if j != i:
                rest *= abs(v) + bars[j]
        err += e * rest
    return total, err


def component_class_series(xi: DirichletCharacter, modulus: PrimePowerModulus, s: complex) -> tuple[np.ndarray, float]:
    """B[u] = Σ_{m ≡ u mod p^β} ξ(m) m^{−s}，对全部剩余类 u。 / Class-restricted series of one component."""
    q = modulus.modulus
    if math.gcd(xi.q, q) != 1:
        raise InvalidArgument(f"component modulus {xi.q} is not coprime to {q}")
    Q = xi.q * q
    coeffs = xi.values()[np.arange(Q, dtype=np.int64) % xi.q]
    return class_series(coeffs, s, q)


def twisted_L_values(
    d: LData,
    modulus: PrimePowerModulus,
    indices: Sequence[int] | np.ndarray,
    s: complex,
) -> tuple[np.ndarray, np.ndarray]:
    """L(s, π⊗χ_t) 对一批 t（product 模式）。 / Product-mode L-values for a batch of character indices."""
    d.check_coprime(modulus.p)
    group = build_unit_group(modulus)
    table = character_table(group, indices)
    per_component: list[tuple[np.ndarray, np.ndarray]] = []
    for xi in d.components:
        B, bar = component_class_series(xi, modulus, s)
        vals = table @ B
        per_component.append((vals, np.full(vals.shape, bar * group.order)))
    values = np.empty(table.shape[0], dtype=np.complex128)
    bars = np.empty(table.shape[0], dtype=np.float64)
    for row in range(table.shape[0]):
        v, e = _combine_product([pc[0][row] for pc in per_component], [float(pc[1][row]) for pc in per_component])
        values[row] = v
        bars[row] = e
    return values, bars


def _untwisted_product(d: LData, s: complex) -> tuple[complex, float]:
    vals, bars = [], []
    for xi in d.components:
        if xi.is_trivial:
            raise ModeUnavailable("untwisted product mode needs nontrivial components")
        v, b = periodic_series(xi.values(), s)
        vals.append(v)
        bars.append(b)
    return _combine_product(vals, bars)


def twist_prefactor(d: LData, chi: DirichletCharacter, s: complex) -> complex:
    """W ω(q) χ(N) (τ(χ)/√q)^n (Nq^n)^{1/2−s}。"""
    q = chi.q
    eps = d.W * d.omega(q) * chi(d.N) * (gauss_sum(chi) / math.sqrt(q)) ** d.n
    return eps * np.exp((0.5 - s) * math.log(d.N * q**d.n))


def _series_truncation(sigma: float, n: int, tol: float, max_terms: int) -> tuple[int, float]:
    M = SERIES_START
    while True:
        tail = dn_tail(M, sigma, n)
        if tail < tol:
            return M, tail
        if M >= max_terms:
            raise TailBoundExceedsTolerance(
                f"series tail {tail:.2e} at M={M} exceeds {tol:g}", extra={"M": M, "tail": tail}
            )
        M = min(2 * M, max_terms)


def _series_mode(d: LData, chi: Optional[DirichletCharacter], s: complex, tol: float, max_terms: int) -> LValue:
    if s.real <= 1.0 + SERIES_MARGIN:
        raise ModeUnavailable(f"series mode needs Re(s) > {1 + SERIES_MARGIN}, got {s.real}")
    M, tail = _series_truncation(s.real, d.n, tol, max_terms)
    a = coeff_range(d, M)
    m = np.arange(1, M + 1, dtype=np.int64)
    terms = a[1:] * np.exp(-s * np.log(m.astype(np.float64)))
    if chi is not None:
        terms = terms * chi(m)
    value = csum(terms)
    error = tail + 8.0 * np.finfo(float).eps * float(np.abs(terms).sum())
    logger.debug("series mode: M=%d tail=%.2e", M, tail)
    return LValue(value=value, error=error, mode=LMode.SERIES.value, details={"M": M, "tail": tail})


def kernel_truncation(
    kernel: CutoffFunction,
    sigma: float,
    scale: float,
    n: int,
    tol: float,
    *,
    start: Optional[int] = None,
    max_terms: int = MAX_TERMS,
) -> tuple[int, float]:
    """最小的 M（从 1/scale 起倍增）使 Σ_{m>M} d_n(m) |K(m·scale)| m^{−σ} < tol。
    / Smallest doubling M whose weighted d_n tail drops below tol.
    """

    def weight(y: np.ndarray) -> np.ndarray:
        vals = evaluate_kernel(kernel, y * scale).values
        return np.abs(vals) * y ** (-sigma)

    M = start if start is not None else max(16, int(math.ceil(1.0 / scale)))
    while True:
        tail = weighted_tail_bound(weight, M, n, decades=6.0, density=24)
        if tail < tol:
            return M, tail
        if M >= max_terms:
            raise TailBoundExceedsTolerance(
                f"{kernel.kind.value}-weighted tail {tail:.2e} at M={M} exceeds {tol:g}",
                extra={"M": M, "tail": tail},
            )
        M = min(2 * M, max_terms)


def kernel_sum(
    coeffs: np.ndarray,
    exponent: complex,
    kernel: CutoffFunction,
    scale: float,
    M: int,
    tail: float,
) -> tuple[complex, float]:
    """Σ_{m≤M} c(m) m^{−exponent} K(m·scale) 及误差条。 / Truncated kernel-weighted sum with its bar."""
    m = np.arange(1, M + 1, dtype=np.float64)
    out = evaluate_kernel(kernel, m * scale)
    c = coeffs[1 : M + 1]
    powers = np.exp(-exponent * np.log(m))
    terms = c * powers * out.values
    value = csum(terms)
    quad = float(np.sum(np.abs(c) * np.abs(powers) * out.tail_bounds))
    return value, tail + quad + 8.0 * np.finfo(float).eps * float(np.abs(terms).sum())


def _afe_mode(
    d: LData,
    chi: DirichletCharacter,
    delta: complex,
    Z: Optional[float],
    width: float,
    tol: float,
) -> LValue:
    if not 0.0 < delta.real < 1.0:
        raise ModeUnavailable(f"afe mode needs 0 < Re(delta) < 1, got {delta}")
    if chi is None or not chi.primitive:
        raise ModeUnavailable("afe mode needs a primitive twist character")
    q = chi.q
    conductor = d.N * q**d.n
    Z = math.sqrt(conductor) if Z is None else float(Z)
    k = TestFunctionK.for_gamma(d.gamma, width)
    v1 = CutoffFunction(kind=KernelKind.V1, gamma=d.gamma, k=k)
    v2 = CutoffFunction(kind=KernelKind.V2, gamma=d.gamma, k=k, delta=delta)

    M1, tail1 = kernel_truncation(v1, delta.real, 1.0 / Z, d.n, tol)
    M2, tail2 = kernel_truncation(v2, 1.0 - delta.real, Z / conductor, d.n, tol)
    a = coeff_range(d, max(M1, M2))
    twisted = a * chi(np.arange(a.size, dtype=np.int64))
    first, bar1 = kernel_sum(twisted, delta, v1, 1.0 / Z, M1, tail1)
    second, bar2 = kernel_sum(np.conj(twisted), 1.0 - delta, v2, Z / conductor, M2, tail2)
    pref = twist_prefactor(d, chi, delta)
    value = first + pref * second
    error = bar1 + abs(pref) * bar2
    logger.debug("afe mode: Z=%.3g M1=%d M2=%d error=%.2e", Z, M1, M2, error)
    return LValue(value=value, error=error, mode=LMode.AFE.value, details={"Z": Z, "M1": M1, "M2": M2})


def twisted_L(
    d: LData,
    chi: Optional[DirichletCharacter],
    s: complex,
    mode: LMode | str = LMode.PRODUCT,
    *,
    Z: Optional[float] = None,
    width: float = DEFAULT_WIDTH,
    series_tol: float = SERIES_TOL,
    afe_tol: float = AFE_TOL,
    max_terms: int = MAX_TERMS,
) -> LValue:
    """L(s, π⊗χ)；chi=None 表示不扭曲。 / L(s, π⊗χ); chi=None evaluates L(s, π)."""
    mode = LMode(mode)
    s = complex(s)
    if mode is LMode.SERIES:
        return _series_mode(d, chi, s, series_tol, max_terms)
    if mode is LMode.AFE:
        return _afe_mode(d, chi, s, Z, width, afe_tol)
    if chi is None:
        value, error = _untwisted_product(d, s)
    else:
        values, bars = twisted_L_values(d, chi.modulus, [chi.index], s)
        value, error = complex(values[0]), float(bars[0])
    return LValue(value=value, error=error, mode=LMode.PRODUCT.value)


def functional_equation_sides(d: LData, chi: DirichletCharacter, s: complex) -> tuple[complex, complex, float]:
    """两侧 L(s, π⊗χ) 与 ε (Nq^n)^{1/2−s} F(s) L(1−s, π̃⊗χ̄)，以及合成误差条。
    / Both sides of the twisted functional equation and their combined bar.
    """
    if not chi.primitive:
        raise InvalidArgument("the functional equation is stated for primitive twists")
    s = complex(s)
    left = twisted_L(d, chi, s)
    right_L = twisted_L(d.dual(), chi.conj(), 1.0 - s)
    factor = twist_prefactor(d, chi, s) * F_ratio(s, d.gamma)
    return left.value, factor * right_L.value, left.error + abs(factor) * right_L.error


def functional_equation_residual(d: LData, chi: DirichletCharacter, s: complex) -> float:
    """|LHS − RHS| / max(1, |LHS|)。"""
    left, right, _ = functional_equation_sides(d, chi, s)
    return abs(left - right) / max(1.0, abs(left))


__all__ = [
    "LMode",
    "LValue",
    "MAX_TERMS",
    "component_class_series",
    "functional_equation_residual",
    "functional_equation_sides",
    "kernel_sum",
    "kernel_truncation",
    "twist_prefactor",
    "twisted_L",
    "twisted_L_values",
]
