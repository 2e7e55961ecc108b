# errors.py
# =============================================================================
# 错误码与异常层级。 / Error codes and the exception hierarchy.
#
# 每个异常携带稳定的错误码，CLI 据此映射退出码与 JSON 错误载荷。
# / Every exception carries a stable code; the CLI maps it to exit codes and
#   JSON error payloads.
# =============================================================================

from __future__ import annotations

from typing import Any, Optional


# -----------------------------------------------------------------------------
# 错误码 / Error codes
# -----------------------------------------------------------------------------
INVALID_ARGUMENT = "INVALID_ARGUMENT"
NOT_CYCLIC = "NOT_CYCLIC"
MODULUS_OVERFLOW = "MODULUS_OVERFLOW"
SALIE_UNAVAILABLE = "SALIE_UNAVAILABLE"
LIFT_CONVENTION_UNCALIBRATED = "LIFT_CONVENTION_UNCALIBRATED"
NO_CONVENTION_MATCHES = "NO_CONVENTION_MATCHES"
POLE_AT_NON_POSITIVE_INTEGER = "POLE_AT_NON_POSITIVE_INTEGER"
POLE_HIT = "POLE_HIT"
TAIL_BOUND_EXCEEDS_TOLERANCE = "TAIL_BOUND_EXCEEDS_TOLERANCE"
FIT_FAILED = "FIT_FAILED"
TRIVIAL_CHARACTER = "TRIVIAL_CHARACTER"
MODE_UNAVAILABLE = "MODE_UNAVAILABLE"
SIDE_ILLEGAL_AT_S = "SIDE_ILLEGAL_AT_S"
IDENTITY_VIOLATED = "IDENTITY_VIOLATED"
CONFIG_INVALID = "CONFIG_INVALID"
CHECK_FAILED = "CHECK_FAILED"

# 属于"用法错误"的错误码，CLI 以退出码 2 返回。 / Codes the CLI reports as usage errors (exit 2).
USAGE_ERROR_CODES = frozenset(
    {
        INVALID_ARGUMENT,
        NOT_CYCLIC,
        MODULUS_OVERFLOW,
        SALIE_UNAVAILABLE,
        LIFT_CONVENTION_UNCALIBRATED,
        POLE_AT_NON_POSITIVE_INTEGER,
        POLE_HIT,
        TRIVIAL_CHARACTER,
        MODE_UNAVAILABLE,
        SIDE_ILLEGAL_AT_S,
        CONFIG_INVALID,
    }
)


class HkvError(Exception):
    """hkv 基础异常: 携带错误码与诊断信息。 / Base error: carries an error code and a diagnostic message."""

    code: str = INVALID_ARGUMENT

    def __init__(self, message: str, *, code: Optional[str] = None, extra: Optional[dict[str, Any]] = None) -> None:
        self.code = code or type(self).code
        self.message = message
        self.extra = dict(extra or {})
        super().__init__(f"[{self.code}] {message}")


class InvalidArgument(HkvError, ValueError):
    code = INVALID_ARGUMENT


class NotCyclic(HkvError, ValueError):
    code = NOT_CYCLIC


class ModulusOverflow(HkvError, OverflowError):
    code = MODULUS_OVERFLOW


class SalieUnavailable(HkvError):
    code = SALIE_UNAVAILABLE


class LiftConventionUncalibrated(HkvError):
    code = LIFT_CONVENTION_UNCALIBRATED


class NoConventionMatches(HkvError):
    """所有候选提升约定均失配；extra["report_path"] 指向落盘报告。
    / No candidate lift convention matched; extra["report_path"] names the persisted report.
    """

    code = NO_CONVENTION_MATCHES


class PoleAtNonPositiveInteger(HkvError, ValueError):
    code = POLE_AT_NON_POSITIVE_INTEGER


class PoleHit(HkvError, ValueError):
    code = POLE_HIT


class TailBoundExceedsTolerance(HkvError):
    code = TAIL_BOUND_EXCEEDS_TOLERANCE


class FitFailed(HkvError):
    code = FIT_FAILED


class TrivialCharacter(HkvError, ValueError):
    code = TRIVIAL_CHARACTER


class ModeUnavailable(HkvError):
    code = MODE_UNAVAILABLE


class SideIllegalAtS(HkvError, ValueError):
    code = SIDE_ILLEGAL_AT_S


class IdentityViolated(HkvError):
    """两侧残差超出误差条；extra["report"] 保存逐项诊断。
    / Two-sided residual exceeded its bar; extra["report"] keeps the per-term diagnostics.
    """

    code = IDENTITY_VIOLATED


class ConfigInvalid(HkvError, ValueError):
    code = CONFIG_INVALID


class CheckFailed(HkvError):
    code = CHECK_FAILED


__all__ = [
    "CHECK_FAILED",
    "CONFIG_INVALID",
    "FIT_FAILED",
    "IDENTITY_VIOLATED",
    "INVALID_ARGUMENT",
    "LIFT_CONVENTION_UNCALIBRATED",
    "MODE_UNAVAILABLE",
    "MODULUS_OVERFLOW",
    "NOT_CYCLIC",
    "NO_CONVENTION_MATCHES",
    "POLE_AT_NON_POSITIVE_INTEGER",
    "POLE_HIT",
    "SALIE_UNAVAILABLE",
    "SIDE_ILLEGAL_AT_S",
    "TAIL_BOUND_EXCEEDS_TOLERANCE",
    "TRIVIAL_CHARACTER",
    "USAGE_ERROR_CODES",
    "CheckFailed",
    "ConfigInvalid",
    "FitFailed",
    "HkvError",
    "IdentityViolated",
    "InvalidArgument",
    "LiftConventionUncalibrated",
    "ModeUnavailable",
    "ModulusOverflow",
    "NoConventionMatches",
    "NotCyclic",
    "PoleAtNonPositiveInteger",
    "PoleHit",
    "SalieUnavailable",
    "SideIllegalAtS",
    "TailBoundExceedsTolerance",
    "TrivialCharacter",
]
