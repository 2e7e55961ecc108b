# suite.py
# =============================================================================
# 有限特征和 / 指数和恒等式的机器校验。
# / Machine verification of the finite character and exponential-sum identities.
#
# 每个恒等式两侧各自独立求值：
#   QO         : 本原偶特征和 Σχ(m)，FFT 求和 vs 闭式；
#   SOGS       : Σχ̄(r)τ(χ)^n（Gauss 和表）vs (φ/2)Kl_n(±r)（卷积表）；
#   lcAC       : e(m/q)+e(−m/q) vs 归一化的 Gauss 和平均；
#   gauss_twist: Σ_h χ̄(h)e(−xh/q)（直接求和）vs χ(−x)τ(χ̄)；
#   hK2        : Σ_{(x/p)_n=1} χ(x)Kl_n(x) vs τ(χ)^n；
#   hKsum      : Σ_x Kl_n(x)Kl_n(±mx)（直接求和）vs p^{βn}(2/φ)Σχ̄(m)。
# 模数 ≤ 5⁴ 时穷举，否则固定种子抽样 1000 个类。
# / Both sides are evaluated independently. Sweeps are exhaustive up to 5⁴
#   and sampled (1000 classes, fixed seed) above.
# =============================================================================

from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from hkv.arith.characters import (
    CharacterFilter,
    additive_phase,
    character_indices,
    character_sum_over,
    character_table,
    gauss_sum_table,
    trivial_gauss_sum,
)
from hkv.arith.kloosterman import KloostermanMethod, kloosterman_pm_table, kloosterman_table
from hkv.arith.modulus import PrimePowerModulus, UnitGroup, build_unit_group
from hkv.errors import InvalidArgument
from hkv.primitives.models import IdentityReport

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 5**4
SAMPLE_SIZE = 1000
DEFAULT_SEED = 0x5EED
DEFAULT_TOLERANCE = 1e-8
GAUSS_TWIST_TOLERANCE = 1e-9
_BLOCK = 256


class IdentityId(str, Enum):
    QO = "QO"
    SOGS = "SOGS"
    LCAC = "lcAC"
    GAUSS_TWIST = "gauss_twist"
    HK2 = "hK2"
    HKSUM = "hKsum"


# CLI 套件名 → 恒等式。 / CLI suite names.
SUITE_NAMES: Dict[str, IdentityId] = {
    "qo": IdentityId.QO,
    "sogs": IdentityId.SOGS,
    "lcac": IdentityId.LCAC,
    "gausstwist": IdentityId.GAUSS_TWIST,
    "hk2": IdentityId.HK2,
    "hksum": IdentityId.HKSUM,
}


# -----------------------------------------------------------------------------
# 扫描与闭式 / Sweeps and closed forms
# -----------------------------------------------------------------------------
def sweep_classes(
    group: UnitGroup,
    *,
    seed: int = DEFAULT_SEED,
    limit: int = EXHAUSTIVE_LIMIT,
    sample: int = SAMPLE_SIZE,
) -> tuple[np.ndarray, bool]:
    """待扫描的互素类（升序）与是否穷举。 / Coprime classes to sweep, ascending, plus the exhaustive flag."""
    units = group.units()
    if group.q <= limit or units.size <= sample:
        return units, True
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(units, size=sample, replace=False))
    return picked, False


def primitive_even_sum(m: PrimePowerModulus, x: np.ndarray | int) -> np.ndarray:
    """Σ_{χ 本原偶} χ(x) 的闭式。 / Closed form of the sum of χ(x) over primitive even χ.

    β ≥ 2: φ*/2 (x ≡ ±1 mod p^β)，−φ(p^{β−1})/2 (x ≡ ±1 mod p^{β−1} 但非 mod p^β)，否则 0。
    β = 1: φ(p)/2 − 1 (x ≡ ±1)，−1（其他单位），p | x 时 0。
    """
    x = np.asarray(x, dtype=np.int64)
    p, beta, q = m.p, m.beta, m.modulus
    r = np.mod(x, q)
    unit = np.mod(r, p) != 0
    top = (r == 1) | (r == q - 1)
    out = np.zeros(r.shape, dtype=np.float64)
    if beta == 1:
        out[unit] = -1.0
        out[top & unit] = m.phi / 2 - 1
        return out
    low_q = p ** (beta - 1)
    low = (np.mod(r, low_q) == 1) | (np.mod(r, low_q) == low_q - 1)
    out[low & ~top] = -m.reduced(beta - 1).phi / 2
    out[top] = m.phi_star / 2
    return out


def residue_mask(group: UnitGroup, n: int) -> np.ndarray:
    """(x/p)_n = 1 的指示（按剩余类）。 / Indicator of the n-th power residues, by residue.

    生成元模 p 仍是原根，所以 x 为 n 次剩余 ⇔ dlog(x) ≡ 0 mod gcd(n, p−1)。
    """
    d = math.gcd(int(n), group.p - 1)
    dlog = group.dlog
    return (dlog >= 0) & (np.mod(np.maximum(dlog, 0), d) == 0)


def _unit_pair(group: UnitGroup) -> tuple[np.ndarray, np.ndarray]:
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    return idx, gauss_sum_table(group)[idx]


def _report(
    identity: IdentityId,
    m: PrimePowerModulus,
    *,
    n: Optional[int],
    residuals: np.ndarray,
    cases: np.ndarray,
    scale: float,
    tolerance: float,
    exhaustive: bool,
    seed: int,
    case_label: str,
    literal: Optional[Dict[str, Optional[float]]] = None,
    diagnostics: Optional[Dict[str, object]] = None,
) -> IdentityReport:
    params: Dict[str, object] = {"p": m.p, "beta": m.beta, "sweep": "exhaustive" if exhaustive else "sampled"}
    if n is not None:
        params["n"] = int(n)
    if not exhaustive:
        params["seed"] = int(seed)
    residuals = np.asarray(residuals, dtype=np.float64).ravel()
    report = IdentityReport(
        identity_id=identity.value,
        params=params,
        tolerance=tolerance,
        scale=float(scale),
        cases_checked=int(residuals.size),
        declared_cases=int(np.asarray(cases).size),
        literal=dict(literal or {}),
        diagnostics=dict(diagnostics or {}),
    )
    if residuals.size:
        worst = int(np.argmax(residuals))
        report.max_abs_residual = float(residuals[worst])
        report.worst_case = {case_label: np.asarray(cases).ravel()[worst].item()}
    logger.info(
        "%s mod %s: %d cases, max scaled residual %.3e (%s)",
        identity.value,
        m.label(),
        report.cases_checked,
        report.max_scaled_residual,
        report.status,
    )
    return report


def _skipped(identity: IdentityId, m: PrimePowerModulus, n: Optional[int], tolerance: float, reason: str) -> IdentityReport:
    params: Dict[str, object] = {"p": m.p, "beta": m.beta}
    if n is not None:
        params["n"] = int(n)
    logger.info("%s mod %s skipped: %s", identity.value, m.label(), reason)
    return IdentityReport(identity_id=identity.value, params=params, tolerance=tolerance, skipped=reason)


# -----------------------------------------------------------------------------
# 恒等式 / Identities
# -----------------------------------------------------------------------------
def verify_QO(p: int, beta: int, *, tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """本原偶特征的正交关系，整周期（含 p 的倍数）。 / Orthogonality over primitive even characters, one full period."""
    m = PrimePowerModulus(p, beta)
    group = build_unit_group(m)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    observed = character_sum_over(group, idx)
    classes = np.arange(m.modulus, dtype=np.int64)
    expected = primitive_even_sum(m, classes)
    residuals = np.abs(observed - expected)
    return _report(
        IdentityId.QO,
        m,
        n=None,
        residuals=residuals,
        cases=classes,
        scale=1.0,
        tolerance=tolerance,
        exhaustive=True,
        seed=DEFAULT_SEED,
        case_label="m",
        diagnostics={"characters": int(idx.size)},
    )


def sogs_sides(
    m: PrimePowerModulus, n: int, classes: np.ndarray, method: KloostermanMethod | str = KloostermanMethod.FFT_DP
) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """返回 (左侧, 推导右侧, 字面右侧)。字面读法只在 β = 1 时与推导读法不同。
    / (left, derived right, literal right); the readings differ only for beta = 1.
    """
    group = build_unit_group(m)
    idx, taus = _unit_pair(group)
    # χ̄_t = χ_{−t}
    left_all = character_sum_over(group, -idx, taus**n)
    left = left_all[classes]
    kl_pm = kloosterman_pm_table(n, m, method)[classes]
    if m.beta >= 2:
        return left, (m.phi / 2) * kl_pm, None
    tau0_n = float(trivial_gauss_sum(m)) ** n
    derived = (m.phi / 2) * kl_pm - tau0_n
    literal = (m.phi / 2 - 1) * kl_pm - (-1.0) ** n
    return left, derived, literal


def verify_SOGS(
    p: int,
    beta: int,
    n: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> IdentityReport:
    """Σ_{χ 本原偶} χ̄(r)τ(χ)^n 与 Kl_n(±r) 的关系；残差按 p^{β(n+1)/2} 归一。
    / Sum of χ̄(r)τ(χ)^n against Kl_n(±r), scaled by p^{β(n+1)/2}.
    """
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    m = PrimePowerModulus(p, beta)
    group = build_unit_group(m)
    classes, exhaustive = sweep_classes(group, seed=seed)
    left, derived, literal = sogs_sides(m, n, classes, method)
    scale = float(p) ** (beta * (n + 1) / 2)
    literal_residual = None if literal is None else float(np.max(np.abs(left - literal))) / scale
    return _report(
        IdentityId.SOGS,
        m,
        n=n,
        residuals=np.abs(left - derived),
        cases=classes,
        scale=scale,
        tolerance=tolerance,
        exhaustive=exhaustive,
        seed=seed,
        case_label="r",
        literal={} if literal is None else {"beta1_displayed": literal_residual},
        diagnostics={"kloosterman_method": KloostermanMethod(method).value},
    )


def verify_lcAC(
    p: int,
    beta: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
) -> IdentityReport:
    """e(m/q) + e(−m/q) 由 Gauss 和平均重建。 / Rebuild e(m/q) + e(−m/q) from the Gauss-sum average."""
    m = PrimePowerModulus(p, beta)
    group = build_unit_group(m)
    classes, exhaustive = sweep_classes(group, seed=seed)
    idx, taus = _unit_pair(group)
    average = character_sum_over(group, -idx, taus)[classes]
    cosines = additive_phase(classes, m.modulus) + additive_phase(-classes, m.modulus)
    literal: Dict[str, Optional[float]] = {}
    if beta >= 2:
        rebuilt = (2.0 / m.phi) * average
    else:
        # n = 1：τ(χ₀) = −1
        rebuilt = (2.0 / m.phi) * (average + trivial_gauss_sum(m))
        if p > 3:
            displayed = (2.0 / (p - 3)) * (average + 1.0)
            literal["beta1_displayed"] = float(np.max(np.abs(cosines - displayed)))
        else:
            logger.warning("lcAC literal reading divides by p - 3 and is unavailable for p = 3")
            literal["beta1_displayed"] = None
    return _report(
        IdentityId.LCAC,
        m,
        n=1,
        residuals=np.abs(cosines - rebuilt),
        cases=classes,
        scale=1.0,
        tolerance=tolerance,
        exhaustive=exhaustive,
        seed=seed,
        case_label="m",
        literal=literal,
    )


def verify_gauss_twist(
    p: int,
    beta: int,
    *,
    tolerance: float = GAUSS_TWIST_TOLERANCE,
    seed: int = DEFAULT_SEED,
) -> IdentityReport:
    """Σ_h χ̄(h)e(−xh/q) = χ(−x)τ(χ̄)，对所有本原 χ；残差按 p^{β/2} 归一。
    / The twisted Gauss sum over every primitive χ, scaled by p^{β/2}.
    """
    m = PrimePowerModulus(p, beta)
    q = m.modulus
    group = build_unit_group(m)
    classes, exhaustive = sweep_classes(group, seed=seed)
    idx = character_indices(group, CharacterFilter.PRIMITIVE)
    table = character_table(group, idx)
    conj_table = np.conj(table)
    tau_conj = gauss_sum_table(group)[(-idx) % group.order]
    h = np.arange(q, dtype=np.int64)
    worst = np.zeros(classes.size, dtype=np.float64)
    for start in range(0, classes.size, _BLOCK):
        xs = classes[start : start + _BLOCK]
        phases = additive_phase(-np.outer(h, xs), q)
        left = conj_table @ phases
        right = table[:, (-xs) % q] * tau_conj[:, None]
        worst[start : start + _BLOCK] = np.max(np.abs(left - right), axis=0) if idx.size else 0.0
    return _report(
        IdentityId.GAUSS_TWIST,
        m,
        n=None,
        residuals=worst,
        cases=classes,
        scale=math.sqrt(q),
        tolerance=tolerance,
        exhaustive=exhaustive,
        seed=seed,
        case_label="x",
        diagnostics={"characters": int(idx.size)},
    )


def hk2_restricted(m: PrimePowerModulus, n: int) -> bool:
    """限制到 n 次剩余是否不改变和：β ≥ 2 且 p ∤ n 时 Kl_n 只支撑在 n 次剩余上。
    / Whether restricting to n-th power residues is lossless for this modulus.
    """
    return (m.beta >= 2 and n % m.p != 0) or math.gcd(n, m.p - 1) == 1


def verify_hK2(
    p: int,
    beta: int,
    n: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> IdentityReport:
    """Σ_{(x/p)_n=1} χ(x)Kl_n(x) = τ(χ)^n，对每个本原偶 χ；残差按 p^{βn/2} 归一。"""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    m = PrimePowerModulus(p, beta)
    group = build_unit_group(m)
    idx, taus = _unit_pair(group)
    kl = kloosterman_table(n, m, method)
    mask = residue_mask(group, n)
    restricted = hk2_restricted(m, n)
    weights = np.where(mask, kl, 0.0) if restricted else kl
    left = character_table(group, idx) @ weights
    right = taus**n
    off_support = float(np.max(np.abs(kl[(group.dlog >= 0) & ~mask]), initial=0.0))
    return _report(
        IdentityId.HK2,
        m,
        n=n,
        residuals=np.abs(left - right),
        cases=idx,
        scale=float(p) ** (beta * n / 2),
        tolerance=tolerance,
        exhaustive=True,
        seed=DEFAULT_SEED,
        case_label="character_index",
        diagnostics={
            "residue_restriction": "applied" if restricted else "dropped",
            "off_support_max_abs": off_support,
        },
    )


def verify_hKsum(
    p: int,
    beta: int,
    n: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> IdentityReport:
    """Σ_x Kl_n(x)Kl_n(±mx) = p^{βn}(2/φ)Σ_{χ 本原偶}χ̄(m)；需 β ≥ 4、n ≥ 2。
    右侧用 QO 闭式；残差按 p^{βn} 归一。
    / Right side from the orthogonality closed form; scaled by p^{βn}.
    """
    m = PrimePowerModulus(p, beta)
    if beta < 4 or n < 2:
        raise InvalidArgument(f"hKsum needs beta >= 4 and n >= 2, got beta={beta}, n={n}")
    q = m.modulus
    group = build_unit_group(m)
    classes, exhaustive = sweep_classes(group, seed=seed)
    kl = kloosterman_table(n, m, method)
    kl_pm = kloosterman_pm_table(n, m, method)
    mask = residue_mask(group, n)
    xs = np.nonzero(mask)[0]
    units = group.units()
    left = np.empty(classes.size, dtype=np.complex128)
    full = np.empty(classes.size, dtype=np.complex128)
    for start in range(0, classes.size, _BLOCK):
        ms = classes[start : start + _BLOCK]
        left[start : start + _BLOCK] = (kl_pm[np.mod(np.outer(ms, xs), q)] @ kl[xs])
        full[start : start + _BLOCK] = (kl_pm[np.mod(np.outer(ms, units), q)] @ kl[units])
    # Σχ̄(m) = Σχ(m̄)，闭式对 ±m̄ 与 ±m 相同。
    right = float(p) ** (beta * n) * (2.0 / m.phi) * primitive_even_sum(m, classes)
    return _report(
        IdentityId.HKSUM,
        m,
        n=n,
        residuals=np.abs(left - right),
        cases=classes,
        scale=float(p) ** (beta * n),
        tolerance=tolerance,
        exhaustive=exhaustive,
        seed=seed,
        case_label="m",
        diagnostics={"restriction_gap_max_abs": float(np.max(np.abs(left - full), initial=0.0))},
    )


def verify_hK2_hKsum(
    p: int,
    beta: int,
    n: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> tuple[IdentityReport, IdentityReport]:
    """hK2 与 hKsum 一起跑；hKsum 的前提不满足时返回 skipped 报告。
    / Runs both; hKsum comes back skipped when its hypotheses fail.
    """
    hk2 = verify_hK2(p, beta, n, tolerance=tolerance, method=method)
    reason = hksum_skip_reason(PrimePowerModulus(p, beta), n)
    if reason:
        return hk2, _skipped(IdentityId.HKSUM, PrimePowerModulus(p, beta), n, tolerance, reason)
    return hk2, verify_hKsum(p, beta, n, tolerance=tolerance, seed=seed, method=method)


def hksum_skip_reason(m: PrimePowerModulus, n: int) -> Optional[str]:
    if m.beta < 4:
        return f"needs beta >= 4 (beta={m.beta})"
    if n < 2:
        return f"needs n >= 2 (n={n})"
    if n % m.p == 0:
        return f"needs p not dividing n (p={m.p}, n={n})"
    return None


# -----------------------------------------------------------------------------
# 套件 / Suite
# -----------------------------------------------------------------------------
def resolve_suite(names: str | Iterable[str]) -> List[IdentityId]:
    if isinstance(names, str):
        names = [part.strip() for part in names.split(",") if part.strip()]
    out: List[IdentityId] = []
    for name in names:
        key = name.lower()
        if key == "all":
            return list(IdentityId)
        if key not in SUITE_NAMES:
            raise InvalidArgument(f"unknown suite {name!r}; expected one of {sorted(SUITE_NAMES)} or 'all'")
        if SUITE_NAMES[key] not in out:
            out.append(SUITE_NAMES[key])
    return out


def run_suite(
    names: str | Sequence[str],
    p: int,
    beta: int,
    n: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
    method: KloostermanMethod | str = KloostermanMethod.FFT_DP,
) -> List[IdentityReport]:
    """按顺序跑选中的恒等式，每个一份报告。 / Run the selected identities, one report each."""
    m = PrimePowerModulus(p, beta)
    runners: Dict[IdentityId, Callable[[], IdentityReport]] = {
        IdentityId.QO: lambda: verify_QO(p, beta, tolerance=tolerance),
        IdentityId.SOGS: lambda: verify_SOGS(p, beta, n, tolerance=tolerance, seed=seed, method=method),
        IdentityId.LCAC: lambda: verify_lcAC(p, beta, tolerance=tolerance, seed=seed),
        IdentityId.GAUSS_TWIST: lambda: verify_gauss_twist(
            p, beta, tolerance=min(tolerance, GAUSS_TWIST_TOLERANCE), seed=seed
        ),
        IdentityId.HK2: lambda: verify_hK2(p, beta, n, tolerance=tolerance, method=method),
        IdentityId.HKSUM: lambda: verify_hKsum(p, beta, n, tolerance=tolerance, seed=seed, method=method),
    }
    reports = []
    for identity in resolve_suite(names):
        if identity is IdentityId.HKSUM and (reason := hksum_skip_reason(m, n)):
            reports.append(_skipped(identity, m, n, tolerance, reason))
            continue
        reports.append(runners[identity]())
    return reports


__all__ = [
    "DEFAULT_SEED",
    "EXHAUSTIVE_LIMIT",
    "IdentityId",
    "SAMPLE_SIZE",
    "SUITE_NAMES",
    "hk2_restricted",
    "primitive_even_sum",
    "residue_mask",
    "resolve_suite",
    "run_suite",
    "sogs_sides",
    "sweep_classes",
    "verify_QO",
    "verify_SOGS",
    "verify_gauss_twist",
    "verify_hK2",
    "verify_hK2_hKsum",
    "verify_hKsum",
    "verify_lcAC",
]
