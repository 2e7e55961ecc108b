# models.py
# =============================================================================
# 校验报告的共享数据模型。 / Shared data models for verification reports.
# 包含 / Contains：ErrorBar、VerificationReport（两侧求值记录）、
#       IdentityReport（有限恒等式扫描记录）。
# 报告内不含运行时间；耗时由 ReportRecorder 写入独立的 timings.json。
# / Reports never carry runtimes; ReportRecorder writes them to timings.json.
# =============================================================================

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

_TINY = 1e-300


@dataclass
class ErrorBar:
    """按来源累加的误差条。 / Error bar accumulated per source (tails, quadrature, rounding)."""

    parts: Dict[str, float] = field(default_factory=dict)

    def add(self, name: str, value: float) -> "ErrorBar":
        self.parts[name] = self.parts.get(name, 0.0) + float(abs(value))
        return self

    @property
    def total(self) -> float:
        return float(sum(self.parts.values()))

    def to_dict(self) -> Dict[str, Any]:
        return {"parts": dict(self.parts), "total": self.total}


@dataclass
class VerificationReport:
    """两侧求值记录。 / Two-sided evaluation record.

    relative_residual = |lhs − rhs| / scale，scale 缺省为 max(|lhs|, |rhs|)。
    literal 保存按原式字面读法得到的右侧，只用于诊断，不影响 passed。
    / literal holds right sides under the literal reading of a display; it is
      diagnostic only and never decides passed.
    """

    check_id: str
    params: Dict[str, Any]
    lhs: complex
    rhs: complex
    tolerance: float
    error_bar: ErrorBar = field(default_factory=ErrorBar)
    scale: Optional[float] = None  # 残差归一化尺度 / Residual normalization
    literal: Dict[str, Optional[complex]] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(complex(self.lhs) - complex(self.rhs))

    @property
    def norm(self) -> float:
        if self.scale is not None:
            return max(float(self.scale), _TINY)
        return max(abs(complex(self.lhs)), abs(complex(self.rhs)), _TINY)

    @property
    def relative_residual(self) -> float:
        return self.residual / self.norm

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.relative_residual <= self.tolerance

    @property
    def certified(self) -> bool:
        """误差条本身小于容差。 / The error bar itself fits inside the tolerance."""
        return self.error_bar.total <= self.tolerance * self.norm

    def literal_residuals(self) -> Dict[str, Optional[float]]:
        out: Dict[str, Optional[float]] = {}
        for name, value in self.literal.items():
            out[name] = None if value is None else abs(complex(self.lhs) - complex(value)) / self.norm
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check_id": self.check_id,
            "params": self.params,
            "lhs": complex(self.lhs),
            "rhs": complex(self.rhs),
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "scale": self.norm,
            "error_bar": self.error_bar.to_dict(),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "certified": self.certified,
            "literal": {
                name: {"rhs": value, "relative_residual": self.literal_residuals()[name]}
                for name, value in self.literal.items()
            },
            "diagnostics": self.diagnostics,
        }


@dataclass
class IdentityReport:
    """有限恒等式的一次扫描。 / One sweep of a finite identity.

    max_scaled_residual = max_abs_residual / scale；skipped 非空时不计残差。
    / A skipped report carries the reason and no residuals.
    """

    identity_id: str
    params: Dict[str, Any]
    tolerance: float
    scale: float = 1.0
    max_abs_residual: float = 0.0
    cases_checked: int = 0
    declared_cases: int = 0  # 运行配置声明的扫描规模 / Sweep cardinality declared by the run
    worst_case: Dict[str, Any] = field(default_factory=dict)
    literal: Dict[str, Optional[float]] = field(default_factory=dict)  # 字面读法的最大归一残差
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    skipped: Optional[str] = None

    @property
    def max_scaled_residual(self) -> float:
        return self.max_abs_residual / max(self.scale, _TINY)

    @property
    def status(self) -> str:
        if self.skipped:
            return "skipped"
        return "pass" if self.passed else "fail"

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return (
            math.isfinite(self.max_abs_residual)
            and self.max_scaled_residual <= self.tolerance
            and self.cases_checked == self.declared_cases
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "params": self.params,
            "status": self.status,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "scale": self.scale,
            "max_abs_residual": self.max_abs_residual,
            "max_scaled_residual": self.max_scaled_residual,
            "cases_checked": self.cases_checked,
            "declared_cases": self.declared_cases,
            "worst_case": self.worst_case,
            "literal": self.literal,
            "diagnostics": self.diagnostics,
            "skipped": self.skipped,
        }
