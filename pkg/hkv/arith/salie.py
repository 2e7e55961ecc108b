# salie.py
# =============================================================================
# β 偶数时 Kl_n 的 Salié 型根和求值与提升约定校准。
# / Salié-type root-sum evaluation of Kl_n for even β, and lift calibration.
#
# 闭式 Kl_n(c, p^β) = p^{β(n−1)/2} Σ_w e(phase(w)/p^β)，w 取遍 c 的 n 次根
# （模 p^α，α = β/2）。相位依赖于根的提升方式，三种候选约定：
#   C1  把 w 的 Hensel 提升 W（W^n ≡ c mod p^β）代入 (n−1)W + c·W̄；
#   C2  同一个 W，相位 n·W（驻相形式）；
#   C3  w 直接以 [0, p^α) 中的代表元零扩张，相位 (n−1)w + c·w̄。
# 校准前 salie 方法不可用；结果登记在进程内并镜像到缓存目录。
# / Three candidate lift conventions; the method stays gated until a
#   calibration sweep against a brute-force oracle selects one.
# =============================================================================

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from threading import Lock
from typing import Dict, List, Optional

import numpy as np

from hkv.arith.characters import additive_phase
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import (
    InvalidArgument,
    LiftConventionUncalibrated,
    NoConventionMatches,
    SalieUnavailable,
)
from hkv.engine.recorder import atomic_write_json
from hkv.numerics.summation import csum
from hkv.runtime_paths import resolve_cache_dir

logger = logging.getLogger(__name__)

DEFAULT_CALIBRATION_TOLERANCE = 1e-8


class LiftConvention(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]


_DESCRIPTIONS = {
    LiftConvention.C1: "Hensel-lifted exact root W, phase (n-1)W + c*inv(W)",
    LiftConvention.C2: "Hensel-lifted exact root W, phase n*W",
    LiftConvention.C3: "root mod p^alpha zero-extended, phase (n-1)w + c*inv(w)",
}


# -----------------------------------------------------------------------------
# 剩余符号与 n 次根 / Residue symbol and n-th roots
# -----------------------------------------------------------------------------
def power_residue_symbol(c: int, n: int, m: PrimePowerModulus) -> int:
    """(c/p^β)_n：c 为 n 次剩余时返回 1，否则 0。由 Hensel 引理只需模 p 判定。
    / 1 iff c is an n-th power residue; decided mod p by Hensel's lemma.
    """
    p = m.p
    if math.gcd(int(c), p) != 1:
        raise InvalidArgument(f"c={c} must be coprime to p={p}")
    e = (p - 1) // math.gcd(int(n), p - 1)
    return 1 if pow(int(c) % p, e, p) == 1 else 0


def nth_roots(c: int, n: int, m: PrimePowerModulus, *, level: Optional[int] = None) -> List[int]:
    """全部 w（模 p^level，默认 p^β）使 w^n ≡ c。 / All w with w^n ≡ c mod p^level (default p^β).

    在 dlog 坐标中解 n·j ≡ dlog(c) (mod φ)，d = gcd(n, φ)。
    / Solved in dlog coordinates as n·j ≡ dlog(c) mod φ with d = gcd(n, φ).
    """
    if math.gcd(int(c), m.p) != 1:
        raise InvalidArgument(f"c={c} must be coprime to p={m.p}")
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    target = m if level is None else PrimePowerModulus(m.p, level)
    group = build_unit_group(target)
    phi = group.order
    k = group.log(int(c) % group.q)
    d = math.gcd(int(n), phi)
    if k % d:
        return []
    step = phi // d
    j0 = (k // d) * pow(int(n) // d, -1, step) % step if step > 1 else 0
    roots = sorted(group.exp(j0 + i * step) for i in range(d))
    return roots


def check_salie_available(n: int, m: PrimePowerModulus) -> None:
    if m.beta % 2 or m.beta < 4:
        raise SalieUnavailable(f"the root-sum form needs beta even and >= 4, got beta={m.beta}")
    if n % m.p == 0:
        raise SalieUnavailable(f"the root-sum form needs p not dividing n (p={m.p}, n={n})")


# -----------------------------------------------------------------------------
# 约定求值 / Evaluation under a convention
# -----------------------------------------------------------------------------
def _root_phases(c: int, n: int, m: PrimePowerModulus, convention: LiftConvention) -> np.ndarray:
    q = m.modulus
    alpha = m.beta // 2
    low = m.p**alpha
    base_roots = nth_roots(c, n, m, level=alpha)
    if not base_roots:
        return np.zeros(0, dtype=np.int64)
    c = int(c) % q
    phases = []
    if convention is LiftConvention.C3:
        for w in base_roots:
            w_inv = pow(w, -1, q)
            phases.append(((n - 1) * w + c * w_inv) % q)
        return np.asarray(phases, dtype=np.int64)
    exact = nth_roots(c, n, m)
    # Hensel 提升：每个模 p^α 的根恰有一个精确根与之同余。
    lifted = {W % low: W for W in exact}
    for w in base_roots:
        W = lifted[w]
        if convention is LiftConvention.C1:
            phases.append(((n - 1) * W + c * pow(W, -1, q)) % q)
        else:
            phases.append((n * W) % q)
    return np.asarray(phases, dtype=np.int64)


def salie_value(c: int, n: int, m: PrimePowerModulus, convention: LiftConvention | str) -> complex:
    """给定约定下的根和。 / The root sum under a given convention."""
    check_salie_available(n, m)
    convention = LiftConvention(convention)
    phases = _root_phases(c, n, m, convention)
    if phases.size == 0:
        return 0j
    scale = float(m.p) ** (m.beta * (n - 1) / 2.0)
    return scale * csum(additive_phase(phases, m.modulus))


# -----------------------------------------------------------------------------
# 校准登记 / Calibration registry
# -----------------------------------------------------------------------------
@dataclass
class CalibrationReport:
    p: int
    beta: int
    n: int
    oracle: str
    tolerance: float
    classes_checked: int
    matched: Optional[str]
    max_residuals: Dict[str, float] = field(default_factory=dict)
    failing_classes: Dict[str, List[int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def calibration_file_name(p: int, beta: int, n: int) -> str:
    return f"salie_calibration_p{p}_b{beta}_n{n}.json"


class SalieRegistry:
    """已校准约定的进程内登记，并镜像到缓存目录。
    / In-process registry of calibrated conventions, mirrored to the cache directory.
    """

    def __init__(self) -> None:
        self._entries: Dict[tuple[int, int, int], LiftConvention] = {}
        self._lock = Lock()

    def register(self, p: int, beta: int, n: int, convention: LiftConvention) -> None:
        with self._lock:
            self._entries[(p, beta, n)] = LiftConvention(convention)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def get(self, p: int, beta: int, n: int, *, cache_dir: Optional[str] = None) -> Optional[LiftConvention]:
        key = (p, beta, n)
        with self._lock:
            found = self._entries.get(key)
        if found is not None:
            return found
        path = Path(resolve_cache_dir(cache_dir)) / calibration_file_name(p, beta, n)
        if not path.is_file():
            return None
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
            matched = document.get("report", {}).get("matched")
        except (OSError, ValueError) as exc:
            logger.warning("unreadable calibration file %s: %s", path, exc)
            return None
        if not matched:
            return None
        self.register(p, beta, n, LiftConvention(matched))
        logger.debug("calibration for (%s, %s, %s) restored from %s", p, beta, n, path)
        return LiftConvention(matched)

    def require(self, p: int, beta: int, n: int) -> LiftConvention:
        convention = self.get(p, beta, n)
        if convention is None:
            raise LiftConventionUncalibrated(
                f"no calibrated lift convention for p={p}, beta={beta}, n={n}; run calibrate_salie_lift first"
            )
        return convention


salie_registry = SalieRegistry()


def salie_kloosterman(c: int, n: int, m: PrimePowerModulus) -> complex:
    """已校准约定下的 Kl_n(c, p^β)。 / Kl_n(c, p^β) under the calibrated convention."""
    check_salie_available(n, m)
    convention = salie_registry.require(m.p, m.beta, n)
    return salie_value(c, n, m, convention)


def salie_table(n: int, m: PrimePowerModulus) -> np.ndarray:
    check_salie_available(n, m)
    convention = salie_registry.require(m.p, m.beta, n)
    group = build_unit_group(m)
    out = np.zeros(m.modulus, dtype=np.complex128)
    for c in group.powers.tolist():
        out[c] = salie_value(c, n, m, convention)
    return out


def calibrate_salie_lift(
    p: int,
    beta: int,
    n: int,
    oracle: str = "fft_dp",
    *,
    tolerance: float = DEFAULT_CALIBRATION_TOLERANCE,
    cache_dir: Optional[str] = None,
) -> LiftConvention:
    """对全部与 p 互素的 c 比对三种约定，返回第一个全部匹配的约定。
    / Sweep every coprime c, return the first convention matching the oracle everywhere.

    报告（成功或失败）写入缓存目录；全部失配时抛出 NoConventionMatches。
    / The report is persisted either way; NoConventionMatches when all fail.
    """
    from hkv.arith.kloosterman import ORACLE_METHODS, KloostermanMethod, kloosterman_table

    m = PrimePowerModulus(p, beta)
    check_salie_available(n, m)
    method = KloostermanMethod(oracle)
    if method not in ORACLE_METHODS:
        raise InvalidArgument(f"oracle must be one of naive, dp, fft_dp, got {oracle}")

    reference = kloosterman_table(n, m, method)
    group = build_unit_group(m)
    classes = np.sort(group.powers).tolist()
    # 容差按 p^{β(n−1)/2} 的单位计。 / Tolerance in units of p^{β(n−1)/2}.
    unit = float(p) ** (beta * (n - 1) / 2.0)

    report = CalibrationReport(
        p=p,
        beta=beta,
        n=n,
        oracle=method.value,
        tolerance=tolerance,
        classes_checked=len(classes),
        matched=None,
    )
    for convention in LiftConvention:
        residuals = np.array([abs(salie_value(c, n, m, convention) - reference[c]) / unit for c in classes])
        report.max_residuals[convention.value] = float(residuals.max(initial=0.0))
        bad = [c for c, r in zip(classes, residuals) if r >= tolerance]
        if bad:
            report.failing_classes[convention.value] = bad[:50]
        elif report.matched is None:
            report.matched = convention.value

    path = Path(resolve_cache_dir(cache_dir)) / calibration_file_name(p, beta, n)
    atomic_write_json(path, {"schema": 1, "kind": "salie_calibration", "report": report.to_dict()})

    if report.matched is None:
        logger.warning("no lift convention matches the %s oracle at p=%s beta=%s n=%s", oracle, p, beta, n)
        raise NoConventionMatches(
            f"no lift convention matches the oracle for p={p}, beta={beta}, n={n}; report at {path}",
            extra={"report_path": str(path), "report": report.to_dict()},
        )
    matched = LiftConvention(report.matched)
    salie_registry.register(p, beta, n, matched)
    logger.info(
        "lift convention %s selected for p=%s beta=%s n=%s (max residuals %s)",
        matched.value,
        p,
        beta,
        n,
        report.max_residuals,
    )
    return matched


def calibration_report(p: int, beta: int, n: int, *, cache_dir: Optional[str] = None) -> Optional[dict]:
    """读取落盘的校准报告。 / Read back a persisted calibration report."""
    path = Path(resolve_cache_dir(cache_dir)) / calibration_file_name(p, beta, n)
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))["report"]


__all__ = [
    "CalibrationReport",
    "LiftConvention",
    "SalieRegistry",
    "calibrate_salie_lift",
    "calibration_file_name",
    "calibration_report",
    "check_salie_available",
    "nth_roots",
    "power_residue_symbol",
    "salie_kloosterman",
    "salie_registry",
    "salie_table",
    "salie_value",
]
