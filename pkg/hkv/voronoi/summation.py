# summation.py
# =============================================================================
# Voronoi 求和公式的两侧数值校验。 / Two-sided checks of the Voronoi summation formulas.
#
# 设 D 为次数 d 的数据（VSF、DAFI(B)、D(B) 取 π 或 ξ，VSF2、VSFK 取 π̃），
# 扭曲指数 k，q = p^β，权函数 φ：
#   左侧 = Σ_{(m,p)=1} b(m) K_L(m) φ(m)
#   右侧 = 留数
#        + W N^{1/2} ω(q) q^{min(k,d)} Σ_{(m,p)=1} b̄(m)/m K_R(m) Ψ(m/(N q^d))
#        + [β=1] W N^{1/2} (2/φ(p)) (−1)^k Σ_{(m,p)=1} b̄(m)/m Ψ^R(m/N)
#   Ψ(y) = ∫ φ*(s) F(s) y^s ds/2πi，Ψ^R 另乘 R(s) = ε_p(s)/ε̄_p(1−s)。
# 对数高斯权没有留数；φ_∞ 权在 s = 1−δ 处留下 F(δ)·左侧(1−δ)，且
# Ψ(y) = f^{−(1−δ)} Φ_u(f p^u y)，主项的 Φ_u 自变量恰为 m。
# 各定理原式的字面读法另行求值，只写入报告的 literal 字段。
# / The derived right side decides pass/fail; literal readings of each
#   displayed theorem are evaluated alongside for diagnosis.
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from hkv.analytic.gamma import F_ratio
from hkv.analytic.kernels import (
    DEFAULT_WIDTH,
    CutoffFunction,
    GaussianLogWeight,
    KernelKind,
    TestFunctionK,
)
from hkv.arith.characters import CharacterFilter, character_indices, character_table, gauss_sum_table
from hkv.arith.kloosterman import kloosterman_class_at_multiple
from hkv.arith.modulus import build_unit_group
from hkv.errors import IdentityViolated, InvalidArgument, TailBoundExceedsTolerance
from hkv.ldata.datum import LData, coeff_range
from hkv.ldata.progression import class_series_for
from hkv.ldata.twisted import kernel_sum, kernel_truncation, twisted_L_values
from hkv.numerics.powers import complex_power
from hkv.numerics.summation import csum
from hkv.numerics.tails import weighted_tail_bound
from hkv.primitives.models import ErrorBar, VerificationReport
from hkv.series.families import FamilyParams, SeriesFamily, character_decomposition, left_weights
from hkv.series.functional import dual_class_weights

logger = logging.getLogger(__name__)

DEFAULT_VORONOI_TOLERANCE = 1e-6
RESIDUE_BLOCK_TOLERANCE = 1e-7
DEFAULT_TAIL_TARGET = 1e-11
# 对数高斯权的截断：|φ| 降到该值以下即停止。 / Cut the log-Gaussian weight below this level.
GAUSSIAN_SUPPORT_TOL = 1e-24


class Theorem(str, Enum):
    VSF_I = "VSF_i"
    VSF_II = "VSF_ii"
    VSF2_I = "VSF2_i"
    VSF2_II = "VSF2_ii"
    DAFI_B_I = "DAFI_B_i"
    DAFI_B_II = "DAFI_B_ii"
    D_B_I = "D_B_i"
    D_B_II = "D_B_ii"
    VSFK = "VSFK"

    @property
    def stem(self) -> str:
        if self is Theorem.VSFK:
            return self.value
        return self.value.rsplit("_", 1)[0]

    @property
    def label(self) -> str:
        """报告中的检查编号，如 VSF(i)。 / Check id as it appears in reports."""
        if self is Theorem.VSFK:
            return self.value
        stem, branch = self.value.rsplit("_", 1)
        return f"{stem}({branch})"

    @property
    def prime_branch(self) -> bool:
        return self.value.endswith("_ii")

    @property
    def on_dual_datum(self) -> bool:
        """VSF2 与 VSFK 的左侧系数为 ā(m)。 / VSF2 and VSFK sum the dual coefficients."""
        return self.stem in ("VSF2", "VSFK")

    @property
    def family(self) -> SeriesFamily:
        return _THEOREM_FAMILY[self.stem]


_THEOREM_FAMILY = {
    "VSF": SeriesFamily.ADDITIVE_D,
    "VSF2": SeriesFamily.ADDITIVE_D,
    "DAFI_B": SeriesFamily.HK_GLN,
    "D_B": SeriesFamily.HK_GL1,
    "VSFK": SeriesFamily.HK_GLN,
}


class WeightKind(str, Enum):
    GAUSSIAN_LOG = "gaussian_log"
    PHI_INF = "phi_inf"


@dataclass(frozen=True)
class VoronoiWeight:
    """权函数描述：对数高斯 φ(y) = exp(−(log y − log y₀)²)，或 φ_∞(y) = y^{−(1−δ)} V₂(y/f)。
    / Weight descriptor: the log-Gaussian or the φ_∞ weight with f = N p^{nβ−u}.
    """

    kind: WeightKind = WeightKind.GAUSSIAN_LOG
    center: float = 50.0
    delta: complex = complex(0.6, 0.3)
    u: float = 0.5
    width: float = DEFAULT_WIDTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", WeightKind(self.kind))
        object.__setattr__(self, "delta", complex(self.delta))
        if self.center <= 0:
            raise InvalidArgument(f"weight center must be positive, got {self.center}")
        if self.kind is WeightKind.PHI_INF and not 0.0 < self.delta.real < 1.0:
            raise InvalidArgument(f"delta must satisfy 0 < Re(delta) < 1, got {self.delta}")

    @property
    def c(self) -> complex:
        return 1.0 - self.delta

    @classmethod
    def default_for(cls, theorem: Theorem) -> "VoronoiWeight":
        return cls(kind=WeightKind.PHI_INF if Theorem(theorem).on_dual_datum else WeightKind.GAUSSIAN_LOG)

    def to_dict(self) -> dict[str, object]:
        if self.kind is WeightKind.GAUSSIAN_LOG:
            return {"kind": self.kind.value, "center": self.center}
        return {"kind": self.kind.value, "delta": self.delta, "u": self.u, "width": self.width}


@dataclass
class DualSum:
    """coeff · Σ b̄(m)/m K(m) Ψ(m·scale)；weights 为 None 时 K ≡ 1。
    / One dual sum; coprime=False also keeps the terms with p | m.
    """

    label: str
    coeff: complex
    kernel: CutoffFunction
    scale: float
    weights: Optional[np.ndarray] = None
    coprime: bool = True


@dataclass
class VoronoiReading:
    name: str
    sums: List[DualSum]
    residue: complex = 0j
    residue_bar: float = 0.0


@dataclass
class _SumValue:
    value: complex
    bar: float
    M: int


# -----------------------------------------------------------------------------
# 参数与核 / Parameters and kernels
# -----------------------------------------------------------------------------
def datum_params(theorem: Theorem, params: FamilyParams) -> FamilyParams:
    """左侧所用数据 D 的参数。 / Parameters carrying the datum D that the left side sums."""
    if Theorem(theorem).on_dual_datum:
        return FamilyParams(params.datum.dual(), params.modulus, params.h, params.n)
    return params


def phi_inf_length(params: FamilyParams, weight: VoronoiWeight) -> float:
    """f = N p^{nβ − u}。"""
    datum, modulus = params.datum, params.modulus
    return datum.N * float(modulus.p) ** (datum.n * modulus.beta - weight.u)


def validate_check(theorem: Theorem, params: FamilyParams, weight: VoronoiWeight) -> None:
    theorem = Theorem(theorem)
    modulus = params.modulus
    p, beta = modulus.p, modulus.beta
    if theorem.prime_branch != (beta == 1):
        branch = "a prime modulus (beta = 1)" if theorem.prime_branch else "a prime power (beta >= 2)"
        raise InvalidArgument(f"{theorem.label} is stated for {branch}, got beta={beta}")
    if beta == 1 and p < 5:
        raise InvalidArgument("prime-modulus summation formulas divide by p − 3 and need p >= 5")
    if theorem.on_dual_datum != (weight.kind is WeightKind.PHI_INF):
        expected = WeightKind.PHI_INF if theorem.on_dual_datum else WeightKind.GAUSSIAN_LOG
        raise InvalidArgument(f"{theorem.label} is checked with the {expected.value} weight, got {weight.kind.value}")
    if theorem.family is SeriesFamily.HK_GL1:
        if params.n is None or params.n < 2:
            raise InvalidArgument(f"{theorem.label} needs a twist exponent n >= 2, got {params.n}")
    elif params.datum.n < 2:
        raise InvalidArgument(f"{theorem.label} needs a datum of degree >= 2, got {params.datum.n}")
    datum_params(theorem, params).validate(theorem.family)
    if weight.kind is WeightKind.PHI_INF:
        upper = beta - 1 if beta >= 2 else math.inf
        if not 0.0 < weight.u < upper:
            raise InvalidArgument(f"u must satisfy 0 < u < {upper}, got {weight.u}")


def _dual_kernel(
    params: FamilyParams,
    weight: VoronoiWeight,
    D: LData,
    *,
    kind: Optional[KernelKind] = None,
    euler_num: tuple[complex, ...] = (),
    euler_den: tuple[complex, ...] = (),
) -> CutoffFunction:
    p = params.modulus.p
    if weight.kind is WeightKind.GAUSSIAN_LOG:
        return CutoffFunction(
            kind=KernelKind.PHI_GLN,
            gamma=D.gamma,
            weight=GaussianLogWeight(weight.center),
            p=p,
            euler_num=euler_num,
            euler_den=euler_den,
        )
    gamma = params.datum.gamma
    return CutoffFunction(
        kind=kind or KernelKind.PHI_U,
        gamma=gamma,
        k=TestFunctionK.for_gamma(gamma, weight.width),
        delta=weight.delta,
        u=weight.u,
        p=p,
        euler_num=euler_num,
        euler_den=euler_den,
    )


def _v2_kernel(params: FamilyParams, weight: VoronoiWeight) -> CutoffFunction:
    gamma = params.datum.gamma
    return CutoffFunction(
        kind=KernelKind.V2, gamma=gamma, k=TestFunctionK.for_gamma(gamma, weight.width), delta=weight.delta
    )


# -----------------------------------------------------------------------------
# 右侧读法 / Right-side readings
# -----------------------------------------------------------------------------
def derived_voronoi_reading(theorem: Theorem, params: FamilyParams, weight: VoronoiWeight) -> VoronoiReading:
    """由统一函数恒等式推出的右侧。 / The right side derived from the unified functional identity."""
    theorem = Theorem(theorem)
    family = theorem.family
    params_D = datum_params(theorem, params)
    D, modulus = params_D.datum, params.modulus
    p, q, d = modulus.p, modulus.modulus, D.n
    k = params_D.twist_exponent(family)
    front = D.W * math.sqrt(D.N)
    main_coeff = front * complex(D.omega(q)) * float(q) ** min(k, d)
    rest_coeff = front * (2.0 / modulus.phi) * (-1) ** k
    if weight.kind is WeightKind.PHI_INF:
        damp = complex_power(phi_inf_length(params, weight), -weight.c)
        main_coeff *= damp
        rest_coeff *= damp
        main_scale, rest_scale = 1.0, float(q) ** d
    else:
        main_scale, rest_scale = 1.0 / (D.N * float(q) ** d), 1.0 / D.N

    sums = [DualSum("main", main_coeff, _dual_kernel(params, weight, D), main_scale, dual_class_weights(family, params_D))]
    if modulus.beta == 1:
        ef = D.euler_factor(p)
        kernel = _dual_kernel(params, weight, D, euler_num=ef.roots, euler_den=ef.conj_roots)
        sums.append(DualSum("partial_L", rest_coeff, kernel, rest_scale))

    residue, residue_bar = 0j, 0.0
    if weight.kind is WeightKind.PHI_INF:
        value, bar, _ = character_decomposition(family, params_D, weight.c)
        F_delta = complex(F_ratio(weight.delta, params.datum.gamma))
        residue, residue_bar = value * F_delta, bar * abs(F_delta)
    return VoronoiReading("derived", sums, residue, residue_bar)


def _twisted_average(
    pi: LData, params: FamilyParams, delta: complex, tau_exponent: int
) -> tuple[complex, float]:
    """Σ_{χ 本原偶} χ̄(Nh) τ^{·} L(δ, π⊗χ)：指数 ≥ 0 取 τ(χ̄)，< 0 取 τ(χ)^{|·|}。
    / Character average of twisted L-values at δ against χ̄(Nh) and a Gauss-sum power.
    """
    modulus = params.modulus
    group = build_unit_group(modulus)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    conj_idx = (-idx) % group.order
    values, bars = twisted_L_values(pi, modulus, idx, delta)
    chi_bar = character_table(group, conj_idx)[:, (pi.N * params.h) % modulus.modulus]
    taus = gauss_sum_table(group)
    tau_part = taus[conj_idx] ** tau_exponent if tau_exponent >= 0 else taus[idx] ** (-tau_exponent)
    coeff = chi_bar * tau_part
    return csum(coeff * values), float(np.sum(np.abs(coeff) * bars))


def _full_L(pi: LData, params: FamilyParams, delta: complex) -> tuple[complex, float]:
    """L(δ, π) = L^{(p)}(δ, π) / ε_p(δ)。"""
    partial, bar = class_series_for(pi, params.modulus, delta).total()
    eps = complex(pi.euler_factor(params.modulus.p).eps(delta))
    return partial / eps, bar / abs(eps)


def residue_block_from_characters(
    theorem: Theorem, params: FamilyParams, weight: VoronoiWeight
) -> tuple[complex, float]:
    """留数项的独立求值：经扭曲函数方程化为 L(δ, π⊗χ) 的特征平均。
    (2/φ(q)) W̃ ω̄(q) N^{δ−1/2} q^{nδ−n+k} Σ χ̄(Nh) τ(χ̄)^{n−k} L(δ, π⊗χ)（k ≤ n），
    β = 1 时另加 (2/φ(p)) (−1)^k ε̄_p(1−δ) W̃ N^{δ−1/2} L(δ, π)。
    """
    theorem = Theorem(theorem)
    pi, modulus = params.datum, params.modulus
    D = pi.dual()
    q, n = modulus.modulus, pi.n
    k = datum_params(theorem, params).twist_exponent(theorem.family)
    delta = weight.delta
    if k <= n:
        average, bar = _twisted_average(pi, params, delta, n - k)
        power = complex_power(q, n * delta - n + k)
    else:
        average, bar = _twisted_average(pi, params, delta, -(k - n))
        power = complex_power(q, n * delta)
    front = (2.0 / modulus.phi) * D.W * complex_power(pi.N, delta - 0.5)
    value = front * complex(D.omega(q)) * power * average
    error = abs(front * power) * bar
    if modulus.beta == 1:
        ef = pi.euler_factor(modulus.p)
        L_full, L_bar = _full_L(pi, params, delta)
        extra = front * (-1) ** k * complex(ef.eps_bar(1.0 - delta))
        value += extra * L_full
        error += abs(extra) * L_bar
    return value, error


def literal_voronoi_readings(theorem: Theorem, params: FamilyParams, weight: VoronoiWeight) -> List[VoronoiReading]:
    """各定理原式的字面读法（与推导读法一致的分支不重复给出）。
    / Literal readings of the displayed theorems; branches equal to the derived reading are omitted.
    """
    theorem = Theorem(theorem)
    pi, modulus = params.datum, params.modulus
    p, q = modulus.p, modulus.modulus
    root_N = math.sqrt(pi.N)
    hN = params.h * pi.N % q
    group = build_unit_group(modulus)
    unit = group.unit_mask()
    name = theorem.label

    if theorem is Theorem.VSF_II:
        n = pi.n
        coeff = pi.W * complex(pi.omega(p)) * root_N * p
        weights = kloosterman_class_at_multiple(n - 1, modulus, group.inverse(hN))
        weights[unit] += (-1) ** n * 2.0 / (p - 3)
        ef = pi.euler_factor(p)
        return [
            VoronoiReading(
                name,
                [
                    DualSum("main", coeff, _dual_kernel(params, weight, pi), 1.0 / (pi.N * float(p) ** n), weights),
                    DualSum(
                        "tilde",
                        -coeff * (-1) ** n * (2.0 / (p - 3)) / p,
                        _dual_kernel(params, weight, pi, euler_num=ef.roots),
                        1.0 / pi.N,
                        coprime=False,
                    ),
                ],
            )
        ]

    if theorem is Theorem.VSF2_II:
        n, delta = pi.n, weight.delta
        D = pi.dual()
        ef = pi.euler_factor(p)
        average, average_bar = _twisted_average(pi, params, delta, n - 1)
        L_full, L_bar = _full_L(pi, params, delta)
        front = (2.0 / (p - 3)) * D.W * complex(D.omega(p)) * complex_power(pi.N, delta - 0.5)
        lead = complex_power(p, 1.0 - n * (1.0 - delta))
        eps = complex(ef.eps(1.0 - delta))
        residue = front * (lead * average - eps * L_full)
        residue_bar = abs(front) * (abs(lead) * average_bar + abs(eps) * L_bar)
        coeff = D.W * complex(D.omega(p)) * root_N * p * complex_power(phi_inf_length(params, weight), -weight.c)
        weights = kloosterman_class_at_multiple(n - 1, modulus, group.inverse(hN))
        weights[unit] += (-1) ** n * 2.0 / (p - 3)
        tilde = _dual_kernel(params, weight, D, kind=KernelKind.PHI_TILDE_U, euler_num=ef.conj_roots)
        return [
            VoronoiReading(
                name,
                [
                    DualSum("main", coeff, _dual_kernel(params, weight, D), 1.0, weights),
                    DualSum("tilde", -coeff * (-1) ** n * (2.0 / (p - 3)) / p, tilde, float(p) ** n, coprime=False),
                ],
                residue,
                residue_bar,
            )
        ]

    if theorem is Theorem.DAFI_B_I:
        n = pi.n
        coeff = pi.W * root_N * complex(pi.omega(q)) * float(q) ** n
        # 第二个和的两个条件互相矛盾，取为空和。 / The second displayed sum has contradictory conditions.
        weights = ((p - 1) / p) * group.pm_indicator(hN)
        return [VoronoiReading(name, [DualSum("main", coeff, _dual_kernel(params, weight, pi), 1.0 / (pi.N * float(q) ** n), weights)])]

    if theorem is Theorem.DAFI_B_II:
        n = pi.n
        coeff = float(p) ** n * complex(pi.omega(p)) * pi.W * root_N
        top = group.pm_indicator(hN)
        weights = top - (2.0 / (p - 3)) * (unit & (top == 0))
        plain = _dual_kernel(params, weight, pi)
        return [
            VoronoiReading(
                name,
                [
                    DualSum("main", coeff, plain, 1.0 / (pi.N * float(p) ** n), weights.astype(np.complex128)),
                    DualSum("rest", pi.W * root_N * (-1) ** n * (2.0 / (p - 3)), plain, 1.0 / pi.N, coprime=False),
                ],
            )
        ]

    if theorem in (Theorem.D_B_I, Theorem.D_B_II):
        n = int(params.n)
        weights = kloosterman_class_at_multiple(n - 1, modulus, group.inverse(hN))
        plain = _dual_kernel(params, weight, pi)
        front = pi.W * root_N
        if theorem is Theorem.D_B_I:
            coeff = front * complex(pi.omega(q)) * q
            return [VoronoiReading(name, [DualSum("main", coeff, plain, 1.0 / (pi.N * q), weights)])]
        coeff = front * complex(pi.omega(p)) * p
        ef = pi.euler_factor(p)
        return [
            VoronoiReading(
                name,
                [
                    DualSum("main", coeff, plain, 1.0 / (pi.N * p), weights),
                    DualSum("rest", front * (-1) ** n, plain, 1.0 / pi.N, coprime=False),
                    DualSum(
                        "tilde",
                        front * (-1) ** n * (2.0 / (p - 3)),
                        _dual_kernel(params, weight, pi, euler_num=ef.roots),
                        1.0 / pi.N,
                        coprime=False,
                    ),
                ],
            )
        ]
    return []


# -----------------------------------------------------------------------------
# 求值 / Evaluation
# -----------------------------------------------------------------------------
def left_side(
    theorem: Theorem, params: FamilyParams, weight: VoronoiWeight, *, tail_tol: float = DEFAULT_TAIL_TARGET
) -> _SumValue:
    """Σ_{(m,p)=1} b(m) K_L(m) φ(m)，尾项由 φ 的衰减确证。 / The weighted left side with a certified tail."""
    theorem = Theorem(theorem)
    params_D = datum_params(theorem, params)
    D, modulus = params_D.datum, params.modulus
    p, q = modulus.p, modulus.modulus
    K = left_weights(theorem.family, params_D)
    kmax = max(float(np.abs(K).max(initial=0.0)), 1e-300)

    if weight.kind is WeightKind.GAUSSIAN_LOG:
        phi = GaussianLogWeight(weight.center)
        M = int(math.ceil(phi.support(GAUSSIAN_SUPPORT_TOL)[1]))
        tail = kmax * weighted_tail_bound(phi, M, D.n)
        m = np.arange(1, M + 1, dtype=np.int64)
        coeffs = coeff_range(D, M)[1:] * K[m % q]
        coeffs[m % p == 0] = 0.0
        terms = coeffs * phi(m.astype(np.float64))
        value = csum(terms)
        return _SumValue(value, tail + 8.0 * np.finfo(float).eps * float(np.abs(terms).sum()), M)

    v2 = _v2_kernel(params, weight)
    scale = 1.0 / phi_inf_length(params, weight)
    M, tail = kernel_truncation(v2, weight.c.real, scale, D.n, tail_tol / kmax)
    m = np.arange(1, M + 1, dtype=np.int64)
    coeffs = coeff_range(D, M).astype(np.complex128)
    coeffs[1:] *= K[m % q]
    coeffs[1:][m % p == 0] = 0.0
    value, bar = kernel_sum(coeffs, weight.c, v2, scale, M, kmax * tail)
    logger.debug("%s left side: M=%d tail=%.2e", theorem.label, M, kmax * tail)
    return _SumValue(value, bar, M)


def evaluate_dual_sum(ds: DualSum, D: LData, params: FamilyParams, *, tail_tol: float = DEFAULT_TAIL_TARGET) -> _SumValue:
    modulus = params.modulus
    p, q = modulus.p, modulus.modulus
    kmax = 1.0 if ds.weights is None else max(float(np.abs(ds.weights).max(initial=0.0)), 1e-300)
    tol = tail_tol / max(1.0, abs(ds.coeff) * kmax)
    M, tail = kernel_truncation(ds.kernel, 1.0, ds.scale, D.n, tol)
    m = np.arange(1, M + 1, dtype=np.int64)
    coeffs = coeff_range(D.dual(), M).astype(np.complex128)
    if ds.weights is not None:
        coeffs[1:] *= ds.weights[m % q]
    if ds.coprime:
        coeffs[1:][m % p == 0] = 0.0
    value, bar = kernel_sum(coeffs, 1.0, ds.kernel, ds.scale, M, kmax * tail)
    logger.debug("dual sum %s: M=%d value=%s", ds.label, M, value)
    return _SumValue(ds.coeff * value, abs(ds.coeff) * bar, M)


def evaluate_voronoi_reading(
    reading: VoronoiReading, D: LData, params: FamilyParams, *, tail_tol: float = DEFAULT_TAIL_TARGET
) -> tuple[complex, float, Dict[str, complex], Dict[str, int]]:
    """返回 (值, 误差条, 分项, 截断点)。 / Value, bar, per-term values and truncation points."""
    value, bar = reading.residue, reading.residue_bar
    terms: Dict[str, complex] = {}
    truncations: Dict[str, int] = {}
    if reading.residue != 0:
        terms["residue"] = reading.residue
    for ds in reading.sums:
        out = evaluate_dual_sum(ds, D, params, tail_tol=tail_tol)
        value += out.value
        bar += out.bar
        terms[ds.label] = terms.get(ds.label, 0j) + out.value
        truncations[ds.label] = out.M
    return value, bar, terms, truncations


def voronoi_check(
    theorem: Theorem | str,
    params: FamilyParams,
    weight: Optional[VoronoiWeight] = None,
    *,
    tolerance: float = DEFAULT_VORONOI_TOLERANCE,
    literal: bool = True,
    tail_tol: float = DEFAULT_TAIL_TARGET,
    raise_on_failure: bool = False,
) -> VerificationReport:
    """两侧求值：左侧加权系数和，右侧为留数加对偶和。
    / Evaluate the weighted coefficient sum against residue plus dual sums.
    """
    theorem = Theorem(theorem)
    weight = weight or VoronoiWeight.default_for(theorem)
    validate_check(theorem, params, weight)
    D = datum_params(theorem, params).datum

    left = left_side(theorem, params, weight, tail_tol=tail_tol)
    derived = derived_voronoi_reading(theorem, params, weight)
    rhs, rhs_bar, terms, truncations = evaluate_voronoi_reading(derived, D, params, tail_tol=tail_tol)
    bar = ErrorBar().add("left_truncation", left.bar).add("right_sums", rhs_bar - derived.residue_bar)
    bar.add("residue", derived.residue_bar)

    diagnostics: Dict[str, object] = {
        "weight": weight.to_dict(),
        "right_terms": terms,
        "truncations": {"left": left.M, **truncations},
    }
    if weight.kind is WeightKind.PHI_INF:
        diagnostics["f"] = phi_inf_length(params, weight)
        block, block_bar = residue_block_from_characters(theorem, params, weight)
        diff = abs(block - derived.residue)
        consistent = diff <= RESIDUE_BLOCK_TOLERANCE * max(1.0, abs(block))
        diagnostics["residue_block"] = {
            "decomposition": derived.residue,
            "characters": block,
            "abs_diff": diff,
            "bar": block_bar + derived.residue_bar,
            "consistent": consistent,
        }
        if not consistent:
            logger.warning("%s residue block disagrees with the character average by %.2e", theorem.label, diff)

    literal_values: Dict[str, Optional[complex]] = {}
    if literal:
        for reading in literal_voronoi_readings(theorem, params, weight):
            try:
                literal_values[reading.name] = evaluate_voronoi_reading(reading, D, params, tail_tol=tail_tol)[0]
            except TailBoundExceedsTolerance as exc:
                logger.warning("literal reading %s unavailable: %s", reading.name, exc.message)
                literal_values[reading.name] = None

    report = VerificationReport(
        check_id=theorem.label,
        params={"theorem": theorem.value, "family": theorem.family.value, **params.to_dict()},
        lhs=left.value,
        rhs=rhs,
        tolerance=tolerance,
        error_bar=bar,
        literal=literal_values,
        diagnostics=diagnostics,
    )
    logger.info(
        "%s %s: relative residual %.2e (bar %.2e)", theorem.label, params.to_dict(), report.relative_residual, bar.total
    )
    if not report.passed and raise_on_failure:
        raise IdentityViolated(
            f"{theorem.label} residual {report.relative_residual:.2e} exceeds {tolerance:g}",
            extra={"report": report.to_dict()},
        )
    return report


__all__ = [
    "DEFAULT_VORONOI_TOLERANCE",
    "DualSum",
    "RESIDUE_BLOCK_TOLERANCE",
    "Theorem",
    "VoronoiReading",
    "VoronoiWeight",
    "WeightKind",
    "datum_params",
    "derived_voronoi_reading",
    "evaluate_dual_sum",
    "evaluate_voronoi_reading",
    "left_side",
    "literal_voronoi_readings",
    "phi_inf_length",
    "residue_block_from_characters",
    "validate_check",
    "voronoi_check",
]
