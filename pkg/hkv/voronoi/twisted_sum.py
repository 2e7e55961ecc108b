# twisted_sum.py
# =============================================================================
# 扭曲和 X2 的 Voronoi 展开：对 Kl_n(±mN̄) 作 Fourier 反演后逐项应用
# 加性扭曲的 Voronoi 公式。
# / The Voronoi expansion of the twisted sum X2: Fourier-invert Kl_n(±mN̄)
#   and apply the additively twisted summation formula term by term.
#
# β 偶数且 p ∤ n 时 Kl_n(x) = p^{β(n−1)/2} K(x)，K(x) 为 n 次根上的相位和，
# 只在 (x/p)_n = 1 的类上非零。记 q = p^β，e_c(x) = e(c x / q)：
#   X2 = q^{1−n/2} q^{−3/2} Σ_x K(x) { A(x) + Σ_{y=1}^{β−2} B_y(x) + C(x)
#                                       + p^{u(1−δ)} (𝔖₁(x) + 𝔖₂(x) + 𝔖₃(x)) }
#   A(x)   = (2/φ*(q)) Σ_χ χ(−x) τ(χ̄)^n L(δ, π⊗χ)
#   B_y(x) = ω(p^y) e_{p^y}(−x) p^{−y} p^{ny(1−δ)} (2/φ*(p^{β−y})) Σ_χ τ(χ̄)^{n−1} L(δ, π⊗χ)
#   C(x)   = ω(p^{β−1}) e_{p^{β−1}}(−x) p^{1−β} (p/φ(p)) (2/(p−3))
#            · (p^{nδ} Σ_{χ mod p} τ(χ̄)^{n−1} L(δ, π⊗χ) − p^{n−1} ε̄_p(1−δ) L(δ, π))
#   𝔖₁(x) = (p/φ(p)) Σ a(m)/m Kl_n(±mx, q) Φ_u(m)
#   𝔖₂(x) = (p/φ(p)) Σ_y ω(p^y) e_{p^y}(−x) p^{−y} Σ a(m)/m Kl_{n−1}(±m, p^{β−y}) Φ_u(p^{ny} m)
#   𝔖₃(x) = (p/φ(p)) ω(p^{β−1}) e_{p^{β−1}}(−x) p^{1−β}
#            · [Σ a(m)/m (Kl_{n−1}(±m, p) + (−1)^n 2/(p−3)) Φ_u(p^{n(β−1)} m)
#               − p^{−1} (−1)^n (2/(p−3)) Σ_{全部 m} a(m)/m Φ̃_u(p^{nβ} m)]
# 以 Kl_n(x)/q^n 代替 q^{1−n/2−3/2} K(x) 即得第二条（代入式）路径。
# 除 A 与 𝔖₁ 外各块只经 e_{p^y}(−x) 依赖 x，对 x 平均后消失。
# / Every block other than A and 𝔖₁ depends on x only through e_{p^y}(−x)
#   and averages out against K.
# =============================================================================

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from hkv.analytic.kernels import evaluate_kernel
from hkv.arith.characters import (
    CharacterFilter,
    additive_phase,
    character_indices,
    character_table,
    gauss_sum_table,
)
from hkv.arith.kloosterman import kloosterman_pm_table, kloosterman_table
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.arith.salie import (
    calibrate_salie_lift,
    check_salie_available,
    power_residue_symbol,
    salie_registry,
    salie_value,
)
from hkv.errors import IdentityViolated
from hkv.ldata.datum import LData, coeff_range
from hkv.ldata.progression import class_series_for
from hkv.ldata.twisted import kernel_truncation, twisted_L_values
from hkv.numerics.powers import complex_power
from hkv.numerics.summation import cdot, csum
from hkv.voronoi.moments import MomentQuery, phi_u_kernel, phi_u_weighted_sum
from hkv.voronoi.summation import DEFAULT_TAIL_TARGET

logger = logging.getLogger(__name__)

# 两条路径只差代数重排。 / The two routes differ by an algebraic resummation only.
RESUMMATION_TOLERANCE = 1e-9


@dataclass
class TwistedSumDecomposition:
    """X2 按块拆开；各块均已乘外层权重并对 x 求和。
    / X2 block by block, each already weighted and summed over the classes x.
    """

    query: MomentQuery
    convention: str
    classes: np.ndarray
    root_sums: np.ndarray
    residue_block: tuple[complex, complex, complex]
    S1_block: complex
    S2_blocks: List[complex]
    S2_boundary: complex
    frak_S: tuple[complex, complex, complex]
    value: complex
    vsf4_value: complex
    bar: float
    notes: List[str] = field(default_factory=list)

    def summary(self) -> Dict[str, object]:
        return {
            "convention": self.convention,
            "classes": int(self.classes.size),
            "residue_block": list(self.residue_block),
            "S1_block": self.S1_block,
            "S2_blocks": list(self.S2_blocks),
            "S2_boundary": self.S2_boundary,
            "frak_S": list(self.frak_S),
            "vsf3": self.value,
            "vsf4": self.vsf4_value,
            "bar": self.bar,
            "notes": list(self.notes),
        }

    def to_dict(self) -> Dict[str, object]:
        return {"query": self.query.to_dict(), **self.summary()}


def residue_classes(query: MomentQuery) -> np.ndarray:
    """(x/p)_n = 1 的单位 x（升序）。 / Units that are n-th power residues, ascending."""
    group = build_unit_group(query.modulus)
    units = np.sort(group.powers)
    keep = [power_residue_symbol(int(x), query.n, query.modulus) == 1 for x in units]
    return units[np.asarray(keep, dtype=bool)]


def _primitive_even_average(
    pi: LData, modulus: PrimePowerModulus, delta: complex, tau_exponent: int
) -> tuple[complex, float]:
    """Σ_{χ 本原偶 mod p^γ} τ(χ̄)^e L(δ, π⊗χ)。"""
    group = build_unit_group(modulus)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    if idx.size == 0:
        return 0j, 0.0
    values, bars = twisted_L_values(pi, modulus, idx, delta)
    taus = gauss_sum_table(group)[(-idx) % group.order] ** tau_exponent
    return csum(taus * values), float(np.sum(np.abs(taus) * bars))


def _lift_convention(query: MomentQuery, cache_dir: Optional[str]) -> str:
    p, beta, n = query.p, query.modulus.beta, query.n
    convention = salie_registry.get(p, beta, n, cache_dir=cache_dir)
    if convention is None:
        convention = calibrate_salie_lift(p, beta, n, cache_dir=cache_dir)
    return convention.value


def twisted_sum_voronoi(
    query: MomentQuery,
    *,
    cache_dir: Optional[str] = None,
    tail_tol: float = DEFAULT_TAIL_TARGET,
    tolerance: float = RESUMMATION_TOLERANCE,
) -> TwistedSumDecomposition:
    """X2 的块分解；根和路径与 Kl_n 代入路径必须一致。
    / The block decomposition of X2; the root-sum and Kl_n routes must agree.
    """
    pi, modulus = query.datum, query.modulus
    p, beta, q, n = query.p, modulus.beta, query.q, query.n
    check_salie_available(n, modulus)
    convention = _lift_convention(query, cache_dir)

    xs = residue_classes(query)
    unit = float(p) ** (beta * (n - 1) / 2.0)
    roots = np.array([salie_value(int(x), n, modulus, convention) for x in xs], dtype=np.complex128) / unit
    outer = float(q) ** (1.0 - n / 2.0) * float(q) ** (-1.5) * roots
    outer_kl = kloosterman_table(n, modulus)[xs] / float(q) ** n

    delta = query.delta
    lift = complex_power(p, query.u * query.c)
    pp = p / (p - 1)
    notes: List[str] = []
    interior = list(range(1, beta - 1))

    # y = 0
    group = build_unit_group(modulus)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    L0, L0_bar = twisted_L_values(pi, modulus, idx, delta)
    tau_n = gauss_sum_table(group)[(-idx) % group.order] ** n
    chi_minus_x = character_table(group, idx)[:, (-xs) % q]
    A = (2.0 / modulus.phi_star) * cdot(tau_n * L0, chi_minus_x)
    A_bar = (2.0 / modulus.phi_star) * float(np.sum(np.abs(tau_n) * L0_bar))

    # 1 ≤ y ≤ β−2
    B = np.zeros((len(interior), xs.size), dtype=np.complex128)
    B_bar = 0.0
    for row, y in enumerate(interior):
        reduced = modulus.reduced(beta - y)
        average, average_bar = _primitive_even_average(pi, reduced, delta, n - 1)
        coeff = complex(pi.omega(p**y)) / p**y * complex_power(p, n * y * (1.0 - delta)) * (2.0 / reduced.phi_star)
        B[row] = coeff * average * additive_phase(-(p**y) * xs, q)
        B_bar += abs(coeff) * average_bar

    # y = β−1
    C = np.zeros(xs.size, dtype=np.complex128)
    C_bar = 0.0
    S3 = np.zeros(xs.size, dtype=np.complex128)
    S3_bar = 0.0
    top = p ** (beta - 1)
    boundary_phase = additive_phase(-top * xs, q)
    if p > 3:
        prime = modulus.reduced(1)
        ef = pi.euler_factor(p)
        average, average_bar = _primitive_even_average(pi, prime, delta, n - 1)
        partial, partial_bar = class_series_for(pi, prime, delta).total()
        eps = complex(ef.eps(delta))
        tail_factor = float(p) ** (n - 1) * complex(ef.eps_bar(1.0 - delta))
        inner = complex_power(p, n * delta) * average - tail_factor * partial / eps
        coeff = complex(pi.omega(top)) / top * pp * (2.0 / (p - 3))
        C = coeff * inner * boundary_phase
        C_bar = abs(coeff) * (abs(complex_power(p, n * delta)) * average_bar + abs(tail_factor / eps) * partial_bar)

        sign = (-1) ** n * 2.0 / (p - 3)
        weights = kloosterman_pm_table(n - 1, prime) + sign
        first, first_bar, _ = phi_u_weighted_sum(
            query, weights, prime, float(p) ** (n * (beta - 1)), tail_tol=tail_tol
        )
        tilde = phi_u_kernel(query, tilde=True, euler_num=ef.conj_roots)
        second, second_bar, _ = phi_u_weighted_sum(
            query, None, prime, float(p) ** (n * beta), kernel=tilde, coprime=False, tail_tol=tail_tol
        )
        T_boundary = first - sign / p * second
        coeff = pp * complex(pi.omega(top)) / top
        S3 = coeff * T_boundary * boundary_phase
        S3_bar = abs(coeff) * (first_bar + abs(sign) / p * second_bar)
    else:
        notes.append("boundary block y = beta-1 skipped: it divides by p - 3")

    # 𝔖₁
    phi_u = phi_u_kernel(query)
    kl_pm = kloosterman_pm_table(n, modulus)
    kmax = max(float(np.abs(kl_pm).max(initial=0.0)), 1e-300)
    M, tail = kernel_truncation(phi_u, 1.0, 1.0, n, tail_tol / kmax, start=16)
    m = np.arange(1, M + 1, dtype=np.int64)
    kernel_values = evaluate_kernel(phi_u, m.astype(np.float64))
    a = coeff_range(pi, M)[1:].astype(np.complex128)
    a[m % p == 0] = 0.0
    v = a / m * kernel_values.values
    S1 = pp * cdot(v, kl_pm[(m[:, None] * xs[None, :]) % q])
    S1_bar = pp * kmax * (tail + float(np.sum(np.abs(a) / m * kernel_values.tail_bounds)))

    # 𝔖₂
    S2 = np.zeros((len(interior), xs.size), dtype=np.complex128)
    S2_bar = 0.0
    for row, y in enumerate(interior):
        reduced = modulus.reduced(beta - y)
        T_y, T_bar, _ = phi_u_weighted_sum(
            query, kloosterman_pm_table(n - 1, reduced), reduced, float(p) ** (n * y), tail_tol=tail_tol
        )
        coeff = pp * complex(pi.omega(p**y)) / p**y
        S2[row] = coeff * T_y * additive_phase(-(p**y) * xs, q)
        S2_bar += abs(coeff) * T_bar

    inner = A + B.sum(axis=0) + C + lift * (S1 + S2.sum(axis=0) + S3)
    value = csum(outer * inner)
    vsf4_value = csum(outer_kl * inner)
    weight_l1 = float(np.abs(outer).sum())
    bar = weight_l1 * (A_bar + B_bar + C_bar + abs(lift) * (S1_bar + S2_bar + S3_bar))

    residue_block = (csum(outer * A), csum(outer * B.sum(axis=0)), csum(outer * C))
    frak_S = (csum(outer * S1), csum(outer * S2.sum(axis=0)), csum(outer * S3))
    decomposition = TwistedSumDecomposition(
        query=query,
        convention=convention,
        classes=xs,
        root_sums=roots,
        residue_block=residue_block,
        S1_block=residue_block[0] + lift * frak_S[0],
        S2_blocks=[csum(outer * (B[row] + lift * S2[row])) for row in range(len(interior))],
        S2_boundary=residue_block[2] + lift * frak_S[2],
        frak_S=frak_S,
        value=value,
        vsf4_value=vsf4_value,
        bar=bar,
        notes=notes,
    )
    gap = abs(value - vsf4_value)
    logger.info(
        "twisted sum %s: %d classes, convention %s, X2=%s (root-sum vs Kl_n gap %.2e)",
        query.to_dict(),
        xs.size,
        convention,
        value,
        gap,
    )
    if not gap <= tolerance * max(1.0, abs(vsf4_value)):
        raise IdentityViolated(
            f"root-sum and Kl_n routes of the twisted sum differ by {gap:.2e}",
            extra={"decomposition": decomposition.to_dict()},
        )
    return decomposition


__all__ = [
    "RESUMMATION_TOLERANCE",
    "TwistedSumDecomposition",
    "residue_classes",
    "twisted_sum_voronoi",
]
