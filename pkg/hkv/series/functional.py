# functional.py
# =============================================================================
# 函数恒等式的右侧与两侧校验。 / Right sides of the functional identities and two-sided checks.
#
# 设数据次数 d、扭曲指数 k、q = p^β、j = |d − k|，则 Re s < 0 时
#   左侧 = W N^{1/2−s} F(s) { ω(q) q^{min(k,d) − ds} Σ_{(m,p)=1} ā(m) m^{s−1} K_R(m)
#                         + [β=1] (2/φ(p)) (−1)^k ε_p(s)/ε̄_p(1−s) · L^{(p)}(1−s, π̃) }
#   K_R(m) = Kl_j(±x_m) − [β=1](2/φ(p))(−1)^j，
#   x_m = m·\overline{hN}（k ≤ d）或 hN·m̄（k > d）。
# 各族的原式（AFI、DAFI(A)、D(A) 的 (i)/(ii) 分支）作为字面读法逐一求值，
# 只进入报告的 literal 字段。
# / The unified right side decides pass/fail; each displayed branch is also
#   evaluated literally and recorded for diagnosis.
# =============================================================================

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from hkv.analytic.gamma import F_ratio
from hkv.arith.characters import CharacterFilter, DirichletCharacter, character_indices, gauss_sum_table
from hkv.arith.kloosterman import kloosterman_class_at_multiple, kloosterman_class_table
from hkv.arith.modulus import build_unit_group
from hkv.errors import IdentityViolated, InvalidArgument, ModeUnavailable, SideIllegalAtS
from hkv.ldata.progression import ProgressionMode, progression_sum
from hkv.ldata.twisted import MAX_TERMS, twist_prefactor, twisted_L_values
from hkv.numerics.powers import complex_power
from hkv.numerics.summation import csum
from hkv.primitives.models import ErrorBar, VerificationReport
from hkv.series.families import (
    FamilyParams,
    LeftRoute,
    SeriesFamily,
    SeriesQuery,
    SeriesValue,
    Side,
    base_weights,
    character_decomposition,
    eval_series,
)

logger = logging.getLogger(__name__)

DEFAULT_S_LEFT = 2.0
DEFAULT_S_RIGHT = complex(-0.7, 0.4)
DEFAULT_IDENTITY_TOLERANCE = 1e-6

_CHECK_IDS = {
    SeriesFamily.ADDITIVE_D: ("AFI(i)", "AFI(ii)"),
    SeriesFamily.HK_GLN: ("DAFI_A(i)", "DAFI_A(ii)"),
    SeriesFamily.HK_GL1: ("D_A(i)", "D_A(ii)"),
}


@dataclass
class RightReading:
    """右侧的一种读法：prefactor · (main · Σ ā(m) K(m) m^{s−1} + rest · L^{(p)}(1−s, π̃))。
    / One reading of a right side.
    """

    name: str
    prefactor: complex
    main: complex
    weights: np.ndarray
    rest: complex = 0j


def check_id(family: SeriesFamily, params: FamilyParams) -> str:
    family = SeriesFamily(family)
    if family not in _CHECK_IDS:
        raise InvalidArgument(f"{family.value} has no functional identity")
    first, second = _CHECK_IDS[family]
    return first if params.modulus.beta >= 2 else second


def dual_class_weights(family: SeriesFamily, params: FamilyParams) -> np.ndarray:
    """K_R(u)：k ≤ d 时 Kl_j(±u·\\overline{hN})，k > d 时 Kl_j(±hN·ū)，β = 1 时在单位上减去 (2/φ(p))(−1)^j。
    / Dual-side class weight shared by the functional identities and the Voronoi formulas.
    """
    family = SeriesFamily(family)
    modulus = params.modulus
    q, d = params.q, params.datum.n
    k = params.twist_exponent(family)
    j = abs(d - k)
    hN = params.h * params.datum.N % q
    group = build_unit_group(modulus)
    if k <= d:
        weights = kloosterman_class_at_multiple(j, modulus, group.inverse(hN))
    else:
        table = kloosterman_class_table(j, modulus)
        weights = table[(hN * group.inverse_table()) % q].astype(np.complex128)
        weights[group.dlog < 0] = 0.0
    if modulus.beta == 1:
        weights[group.unit_mask()] -= (2.0 / modulus.phi) * (-1) ** j
    return weights


def derived_reading(family: SeriesFamily, params: FamilyParams, s: complex) -> RightReading:
    """由特征分解与逐个函数方程推出的统一右侧。 / The unified right side derived character by character."""
    family = SeriesFamily(family)
    datum, modulus = params.datum, params.modulus
    p, q, d = modulus.p, params.q, datum.n
    k = params.twist_exponent(family)
    pre = datum.W * complex_power(datum.N, 0.5 - s) * complex(F_ratio(s, datum.gamma))
    main = complex(datum.omega(q)) * complex_power(q, min(k, d) - d * s)
    weights = dual_class_weights(family, params)
    rest = 0j
    if modulus.beta == 1:
        ef = datum.euler_factor(p)
        rest = (2.0 / modulus.phi) * (-1) ** k * complex(ef.eps(s)) / complex(ef.eps_bar(1.0 - s))
    return RightReading("derived", pre, main, weights, rest)


def literal_readings(family: SeriesFamily, params: FamilyParams, s: complex) -> List[RightReading]:
    """按各分支原式字面求值的右侧（与推导读法相同的分支不重复给出）。
    / Right sides read literally off each displayed branch; branches that coincide
      with the derived reading are not repeated.
    """
    family = SeriesFamily(family)
    datum, modulus = params.datum, params.modulus
    p, beta, q, n = modulus.p, modulus.beta, params.q, datum.n
    if beta == 1 and p < 5:
        return []
    pre = datum.W * complex_power(datum.N, 0.5 - s) * complex(F_ratio(s, datum.gamma))
    name = check_id(family, params)
    group = build_unit_group(modulus)
    unit = group.unit_mask()
    hN = params.h * datum.N % q
    if family is SeriesFamily.ADDITIVE_D and beta == 1:
        ef = datum.euler_factor(p)
        balance = 1.0 - complex(ef.eps(s)) * complex(ef.eps_bar(1.0 - s)) / complex_power(p, 1.0 - n * s)
        weights = kloosterman_class_at_multiple(n - 1, modulus, group.inverse(hN))
        weights[unit] += (-1) ** n * (2.0 / (p - 3)) * balance
        return [RightReading(name, pre, complex(datum.omega(p)) * complex_power(p, 1.0 - n * s), weights)]
    if family is SeriesFamily.HK_GLN and beta == 1:
        top = group.pm_indicator(hN)
        weights = top - (2.0 / (p - 3)) * (unit & (top == 0))
        ef = datum.euler_factor(p)
        rest = (2.0 / (p - 3)) * (-1) ** n / complex(ef.eps_bar(1.0 - s))
        return [RightReading(name, pre, complex_power(p, n * (1.0 - s)) * complex(datum.omega(p)), weights.astype(np.complex128), rest)]
    if family is SeriesFamily.HK_GL1:
        k = params.twist_exponent(family)
        Qh_bar = group.inverse(params.h * datum.N)
        if k >= 2:
            weights = kloosterman_class_at_multiple(k - 1, modulus, Qh_bar)
        else:
            weights = base_weights(modulus, Qh_bar).astype(np.complex128)
        omega_q = complex(datum.omega(q))
        if beta >= 2:
            return [RightReading(name, pre, omega_q * complex_power(q, 1.0 - s), weights)]
        eps = complex(datum.euler_factor(p).eps(s))
        rest = (-1) ** k * (1.0 + (2.0 / (p - 3)) * eps)
        return [RightReading(name, pre, complex(datum.omega(p)) * complex_power(p, 1.0 - s), weights, rest)]
    return []


def evaluate_reading(
    reading: RightReading,
    params: FamilyParams,
    s: complex,
    mode: ProgressionMode | str = ProgressionMode.HURWITZ,
    **kwargs,
) -> tuple[complex, float, Dict[str, complex]]:
    """返回 (值, 误差条, 分项)。 / Value, error bar and the per-term breakdown."""
    dual = params.datum.dual()
    w = 1.0 - complex(s)
    main_sum, main_bar = progression_sum(dual, params.modulus, w, reading.weights, mode, **kwargs)
    value = reading.main * main_sum
    bar = abs(reading.main) * main_bar
    terms: Dict[str, complex] = {"progression": reading.prefactor * value}
    if reading.rest != 0:
        ones = np.ones(params.q, dtype=np.complex128)
        rest_sum, rest_bar = progression_sum(dual, params.modulus, w, ones, mode, **kwargs)
        value += reading.rest * rest_sum
        bar += abs(reading.rest) * rest_bar
        terms["partial_L"] = reading.prefactor * reading.rest * rest_sum
    return reading.prefactor * value, abs(reading.prefactor) * bar, terms


def right_side(query: SeriesQuery) -> SeriesValue:
    """收敛的右侧级数（Re s < 0）。 / The convergent right-side series, Re(s) < 0."""
    if query.s.real >= 0.0:
        raise SideIllegalAtS(f"the right side converges for Re(s) < 0, got {query.s.real}")
    if query.family is SeriesFamily.HK_GL1_BASE:
        raise ModeUnavailable("the base case has no right side")
    reading = derived_reading(query.family, query.params, query.s)
    kwargs = {}
    if query.progression_mode is ProgressionMode.DIRECT:
        kwargs = {"tol": query.tol, "max_terms": query.M or MAX_TERMS}
    value, error, terms = evaluate_reading(reading, query.params, query.s, query.progression_mode, **kwargs)
    return SeriesValue(value, error, Side.RIGHT.value, query.progression_mode.value, {"terms": terms})


def verify_functional_identity(
    family: SeriesFamily | str,
    params: FamilyParams,
    s_left: complex = DEFAULT_S_LEFT,
    s_right: complex = DEFAULT_S_RIGHT,
    *,
    tolerance: float = DEFAULT_IDENTITY_TOLERANCE,
    progression_mode: ProgressionMode | str = ProgressionMode.HURWITZ,
    check_left_paths: bool = True,
    raise_on_failure: bool = False,
) -> VerificationReport:
    """在 s_right 处比较特征分解的左侧与收敛右侧；s_left 处比较左侧两条路径。
    / Compare the continued left side with the convergent right side at s_right,
      and cross-check the two left-side paths at s_left.
    """
    family = SeriesFamily(family)
    s_left, s_right = complex(s_left), complex(s_right)
    params.validate(family)
    cid = check_id(family, params)
    if params.modulus.beta == 1 and params.modulus.p < 5:
        raise InvalidArgument("prime-modulus identities divide by p − 3 and need p >= 5")
    if s_right.real >= 0.0:
        raise SideIllegalAtS(f"s_right must have Re < 0, got {s_right}")

    lhs, lhs_bar, left_details = character_decomposition(family, params, s_right)
    right = eval_series(
        SeriesQuery(family, params, s_right, side=Side.RIGHT, progression_mode=progression_mode, tol=None)
    )
    bar = ErrorBar().add("left_characters", lhs_bar).add("right_series", right.error)

    literal: Dict[str, Optional[complex]] = {}
    for reading in literal_readings(family, params, s_right):
        literal[reading.name] = evaluate_reading(reading, params, s_right)[0]

    diagnostics: Dict[str, object] = {
        "left": left_details,
        "right_terms": right.details["terms"],
        "progression_mode": ProgressionMode(progression_mode).value,
    }
    if family is SeriesFamily.HK_GLN and params.modulus.beta >= 2:
        diagnostics["also_covers"] = "AFIhK"
    if check_left_paths and s_left.real > 1.0:
        raw = eval_series(SeriesQuery(family, params, s_left, route=LeftRoute.RAW, tol=None))
        chars = eval_series(SeriesQuery(family, params, s_left, route=LeftRoute.CHARACTERS))
        diagnostics["left_paths"] = {
            "s": s_left,
            "raw": raw.value,
            "characters": chars.value,
            "abs_diff": abs(raw.value - chars.value),
            "bar": raw.error + chars.error,
        }

    report = VerificationReport(
        check_id=cid,
        params={"family": family.value, **params.to_dict(), "s_left": s_left, "s_right": s_right},
        lhs=lhs,
        rhs=right.value,
        tolerance=tolerance,
        error_bar=bar,
        literal=literal,
        diagnostics=diagnostics,
    )
    logger.info(
        "%s %s: relative residual %.2e (bar %.2e)", cid, params.to_dict(), report.relative_residual, bar.total
    )
    if not report.passed and raise_on_failure:
        raise IdentityViolated(
            f"{cid} residual {report.relative_residual:.2e} exceeds {tolerance:g}", extra={"report": report.to_dict()}
        )
    return report


def even_functional_equation_chain(xi: DirichletCharacter, params: FamilyParams, s: complex) -> Dict[str, complex]:
    """𝔎_1⁰ 的函数方程链：直接值、经一次函数方程（1−s 处独立求值）、经两次函数方程回到 s。
    / The degree-one chain: direct value, once through the functional equation
      (independent values at 1 − s) and twice (back at s).
    """
    s = complex(s)
    datum, modulus = params.datum, params.modulus
    if datum.n != 1 or datum.components[0] != xi:
        raise InvalidArgument("the chain is stated for the degree-one datum of xi")
    dual = datum.dual()
    group = build_unit_group(modulus)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    conj_idx = (-idx) % group.order
    taus = gauss_sum_table(group)[idx]
    at_s, _ = twisted_L_values(datum, modulus, conj_idx, s)
    at_dual, _ = twisted_L_values(dual, modulus, idx, 1.0 - s)
    F_s = complex(F_ratio(s, datum.gamma))
    F_dual = complex(F_ratio(1.0 - s, dual.gamma))
    once = np.empty(idx.size, dtype=np.complex128)
    twice = np.empty(idx.size, dtype=np.complex128)
    weights = np.empty(idx.size, dtype=np.complex128)
    for row, (t, tc) in enumerate(zip(idx, conj_idx)):
        chi = DirichletCharacter(group, int(t))
        chi_bar = DirichletCharacter(group, int(tc))
        forward = complex(twist_prefactor(datum, chi_bar, s)) * F_s
        backward = complex(twist_prefactor(dual, chi, 1.0 - s)) * F_dual
        once[row] = forward * at_dual[row]
        twice[row] = forward * backward * at_s[row]
        weights[row] = chi_bar(params.h) * taus[row]
    scale = 2.0 / modulus.phi
    return {
        "direct": scale * csum(weights * at_s),
        "once": scale * csum(weights * once),
        "twice": scale * csum(weights * twice),
    }


__all__ = [
    "DEFAULT_IDENTITY_TOLERANCE",
    "DEFAULT_S_LEFT",
    "DEFAULT_S_RIGHT",
    "RightReading",
    "check_id",
    "derived_reading",
    "dual_class_weights",
    "evaluate_reading",
    "even_functional_equation_chain",
    "literal_readings",
    "right_side",
    "verify_functional_identity",
]
