# kernels.py
# =============================================================================
# 截断函数与积分变换核：V₁、V₂、Φ_u、Φ̃_u、φ_∞ 以及一般权函数的 Φ、Φ̃。
# / Cutoff functions and integral-transform kernels.
#
# 每一种核都是一条竖直线上的积分 (1/2πi)∫ g(s) y^{±s} ds：
#   V1            g = k(s)/s,                   y^{−s},  Re s > 0
#   V2            g = k(−s) F(δ−s)/s,           y^{−s},  Re s > max(0, Re μ̄ − 1 + Re δ)
#   Phi_u         g = k(c−s)/(s−c),             x^{s},   Re s < Re c    (c = 1−δ, x = y/p^u)
#   Phi_tilde_u   同上再乘 ε̄_p(s)
#   Phi_u_dual    同 Phi_u，但积分线在极点右侧：值为 Φ_u + 留数
#   phi_inf       g = φ_∞*(s),                  y^{−s},  max(δ₀, 1−Re δ) < Re s < 3 − Re δ
#   Phi_gln       g = φ*(s) F(s) R(s),          y^{s},   Re s < 1 − max Re μ̄
# 其中 R(s) = ∏(1 − a p^{−s}) / ∏(1 − b p^{−(1−s)}) 给出 ε 因子修正。
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy import special

from hkv.analytic.gamma import GammaData, log_F_ratio
from hkv.analytic.quadrature import DEFAULT_STEP, DEFAULT_TAIL_TOL, LineIntegral, evaluate_line
from hkv.errors import FitFailed, InvalidArgument, TailBoundExceedsTolerance

logger = logging.getLogger(__name__)

# 积分线与极点的最小距离。 / Minimum distance between a contour and a pole.
POLE_MARGIN = 0.3
MIN_POLE_DISTANCE = 0.1
STRIP_CAP = 60.0
DEFAULT_WIDTH = 0.1
# 截断误差上限（绝对值，按 max(1, |value|) 缩放）。 / Certified truncation limit.
MAX_TAIL = 1e-10


class KernelKind(str, Enum):
    V1 = "V1"
    V2 = "V2"
    PHI_U = "Phi_u"
    PHI_TILDE_U = "Phi_tilde_u"
    PHI_U_DUAL = "Phi_u_dual"
    PHI_INF = "phi_inf"
    PHI_GL1 = "Phi_gl1"
    PHI_TILDE_GL1 = "Phi_tilde_gl1"
    PHI_GLN = "Phi_gln"


class TestKind(str, Enum):
    GAUSSIAN_SURROGATE = "gaussian_surrogate"
    VANISHING_AT_MU = "vanishing_at_mu"


@dataclass(frozen=True)
class TestFunctionK:
    """k(s) = exp(λ s²) · ∏_{μ̄_j ≠ 0} (1 − s/μ̄_j)，k(0) = 1。"""

    __test__ = False

    kind: TestKind = TestKind.GAUSSIAN_SURROGATE
    width: float = DEFAULT_WIDTH
    mu_bar: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TestKind(self.kind))
        if self.width <= 0:
            raise InvalidArgument(f"test function width must be positive, got {self.width}")
        object.__setattr__(self, "mu_bar", tuple(complex(m) for m in self.mu_bar))

    @classmethod
    def for_gamma(cls, g: GammaData, width: float = DEFAULT_WIDTH) -> "TestFunctionK":
        if g.is_trivial:
            return cls(width=width)
        return cls(kind=TestKind.VANISHING_AT_MU, width=width, mu_bar=g.mu_bar)

    def log(self, s: np.ndarray) -> np.ndarray:
        z = np.asarray(s, dtype=np.complex128)
        out = self.width * z * z
        if self.kind is TestKind.VANISHING_AT_MU:
            with np.errstate(divide="ignore"):
                for mb in self.mu_bar:
                    if mb != 0:
                        out = out + np.log(1.0 - z / mb)
        return out

    def __call__(self, s: complex | np.ndarray) -> complex | np.ndarray:
        z = np.asarray(s, dtype=np.complex128)
        out = np.exp(self.width * z * z)
        if self.kind is TestKind.VANISHING_AT_MU:
            for mb in self.mu_bar:
                if mb != 0:
                    out = out * (1.0 - z / mb)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GaussianLogWeight:
    """φ(y) = exp(−(log y − log y₀)²)，φ*(s) = √π y₀^s e^{s²/4}。"""

    center: float = 50.0

    def __call__(self, y: np.ndarray | float) -> np.ndarray | float:
        return np.exp(-((np.log(y) - math.log(self.center)) ** 2))

    def log_mellin(self, s: np.ndarray) -> np.ndarray:
        z = np.asarray(s, dtype=np.complex128)
        return 0.5 * math.log(math.pi) + z * math.log(self.center) + z * z / 4.0

    def support(self, tol: float = 1e-30) -> tuple[float, float]:
        """|φ| ≥ tol 的区间。 / Interval where |φ| ≥ tol."""
        r = math.sqrt(-math.log(tol))
        return self.center * math.exp(-r), self.center * math.exp(r)

    def to_dict(self) -> dict[str, object]:
        return {"kind": "gaussian_log", "center": self.center}


def euler_factor(s: np.ndarray | complex, p: int, roots: Sequence[complex]) -> np.ndarray | complex:
    """∏_i (1 − r_i p^{−s})。"""
    z = np.asarray(s, dtype=np.complex128)
    out = np.ones_like(z)
    for r in roots:
        out = out * (1.0 - complex(r) * np.exp(-z * math.log(p)))
    return complex(out) if out.ndim == 0 else out


def _log_euler(s: np.ndarray, p: int, roots: Sequence[complex]) -> np.ndarray:
    out = np.zeros_like(s)
    with np.errstate(divide="ignore"):
        for r in roots:
            out = out + np.log(1.0 - complex(r) * np.exp(-s * math.log(p)))
    return out


@dataclass(frozen=True)
class CutoffFunction:
    """一个核：种类与参数。 / A kernel: its kind and parameters."""

    kind: KernelKind
    gamma: GammaData = field(default_factory=lambda: GammaData(n=1))
    k: TestFunctionK = field(default_factory=TestFunctionK)
    delta: complex = 0.5
    u: float = 0.0
    p: int = 1
    f: float = 1.0
    weight: GaussianLogWeight = field(default_factory=GaussianLogWeight)
    euler_num: tuple[complex, ...] = ()
    euler_den: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", KernelKind(self.kind))
        object.__setattr__(self, "delta", complex(self.delta))
        if self.kind in (KernelKind.PHI_U, KernelKind.PHI_TILDE_U, KernelKind.PHI_U_DUAL, KernelKind.PHI_INF):
            if not 0.0 < self.delta.real < 1.0:
                raise InvalidArgument(f"delta must satisfy 0 < Re(delta) < 1, got {self.delta}")
        if self.kind is KernelKind.V2 and not 0.0 < self.delta.real < 1.0:
            raise InvalidArgument(f"delta must satisfy 0 < Re(delta) < 1, got {self.delta}")
        if (self.euler_num or self.euler_den) and self.p < 2:
            raise InvalidArgument("an Euler-factor multiplier needs a prime p")

    @property
    def c(self) -> complex:
        return 1.0 - self.delta

    @property
    def sign(self) -> int:
        if self.kind in (KernelKind.V1, KernelKind.V2, KernelKind.PHI_INF):
            return -1
        return 1

    def scale(self, y: np.ndarray) -> np.ndarray:
        """积分变量实际作用的 y。 / The argument actually raised to the power s."""
        y = np.asarray(y, dtype=np.float64)
        if self.kind in (KernelKind.PHI_U, KernelKind.PHI_TILDE_U, KernelKind.PHI_U_DUAL):
            return y / float(self.p) ** self.u
        return y

    def strip(self) -> tuple[float, float]:
        """合法积分带 (lo, hi)，已留出极点距离。 / Legal strip with the pole margin applied."""
        kind = self.kind
        if kind is KernelKind.V1:
            return POLE_MARGIN, STRIP_CAP
        if kind is KernelKind.V2:
            lo = max(0.0, max(mb.real for mb in self.gamma.mu_bar) - 1.0 + self.delta.real)
            return lo + POLE_MARGIN, STRIP_CAP
        if kind in (KernelKind.PHI_U, KernelKind.PHI_TILDE_U):
            return -STRIP_CAP, self.c.real - POLE_MARGIN
        if kind is KernelKind.PHI_U_DUAL:
            return self.c.real + POLE_MARGIN, STRIP_CAP
        if kind is KernelKind.PHI_INF:
            lo = max(self.gamma.delta0, 1.0 - self.delta.real)
            hi = 3.0 - self.delta.real
            margin = min(POLE_MARGIN, (hi - lo) / 3.0)
            return lo + margin, hi - margin
        hi = 1.0 - max(mb.real for mb in self.gamma.mu_bar)
        if self.euler_den:
            hi = min(hi, 1.0)
        return -STRIP_CAP, hi - POLE_MARGIN

    def log_integrand(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.complex128)
        kind = self.kind
        with np.errstate(divide="ignore"):
            if kind is KernelKind.V1:
                return self.k.log(s) - np.log(s)
            if kind is KernelKind.V2:
                return self.k.log(-s) + log_F_ratio(self.delta - s, self.gamma) - np.log(s)
            if kind in (KernelKind.PHI_U, KernelKind.PHI_TILDE_U, KernelKind.PHI_U_DUAL):
                out = self.k.log(self.c - s) - np.log(s - self.c)
                if self.euler_num:
                    out = out + _log_euler(s, self.p, self.euler_num)
                if self.euler_den:
                    out = out - _log_euler(1.0 - s, self.p, self.euler_den)
                return out
            if kind is KernelKind.PHI_INF:
                return phi_inf_log_mellin(s, self)
            out = self.weight.log_mellin(s) + log_F_ratio(s, self.gamma)
            if self.euler_num:
                out = out + _log_euler(s, self.p, self.euler_num)
            if self.euler_den:
                out = out - _log_euler(1.0 - s, self.p, self.euler_den)
            return out

    def to_dict(self) -> dict[str, object]:
        return {
            "kind": self.kind.value,
            "gamma": self.gamma.to_dict(),
            "test_function": {"kind": self.k.kind.value, "width": self.k.width},
            "delta": self.delta,
            "u": self.u,
            "p": self.p,
            "f": self.f,
        }


def phi_inf_log_mellin(s: np.ndarray, f: CutoffFunction) -> np.ndarray:
    """log φ_∞*(s) = (s−c) log f + log k(c−s) − log(s−c) + log F(1−s)。"""
    c = f.c
    with np.errstate(divide="ignore"):
        return (s - c) * math.log(f.f) + f.k.log(c - s) - np.log(s - c) + log_F_ratio(1.0 - s, f.gamma)


def phi_inf_mellin(s: complex | np.ndarray, f: CutoffFunction) -> complex | np.ndarray:
    z = np.asarray(s, dtype=np.complex128)
    out = np.exp(phi_inf_log_mellin(z, f))
    return complex(out) if out.ndim == 0 else out


@dataclass
class KernelValues:
    """向量化求值结果。 / Vectorized kernel evaluation."""

    values: np.ndarray
    tail_bounds: np.ndarray
    sigmas: np.ndarray
    heights: np.ndarray


def evaluate_kernel(
    f: CutoffFunction,
    y: np.ndarray | Sequence[float],
    *,
    sigma: Optional[float] = None,
    T: Optional[float] = None,
    h: float = DEFAULT_STEP,
    tail_tol: float = DEFAULT_TAIL_TOL,
    abscissa: str = "saddle",
) -> KernelValues:
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if np.any(y <= 0):
        raise InvalidArgument("kernels are defined for y > 0 only")
    values, tails, sigmas, heights = evaluate_line(
        f.log_integrand,
        np.log(f.scale(y)),
        sign=f.sign,
        strip=f.strip(),
        sigma=sigma,
        h=h,
        T=T,
        tail_tol=tail_tol,
        abscissa=abscissa,
    )
    return KernelValues(values=values, tail_bounds=tails, sigmas=sigmas, heights=heights)


def eval_cutoff(
    f: CutoffFunction,
    y: float,
    *,
    sigma: Optional[float] = None,
    T: Optional[float] = None,
    h: float = DEFAULT_STEP,
    tail_tol: float = DEFAULT_TAIL_TOL,
    abscissa: str = "saddle",
    max_tail: float = MAX_TAIL,
) -> LineIntegral:
    """单点求值，截断误差超过 max_tail 时抛错。 / Single-point evaluation with a certified tail."""
    if y <= 0:
        raise InvalidArgument(f"y must be positive, got {y}")
    out = evaluate_kernel(f, [y], sigma=sigma, T=T, h=h, tail_tol=tail_tol, abscissa=abscissa)
    value = complex(out.values[0])
    tail = float(out.tail_bounds[0])
    if tail > max_tail * max(1.0, abs(value)):
        raise TailBoundExceedsTolerance(
            f"{f.kind.value}({y}): tail bound {tail:.3e} exceeds {max_tail:g}; raise T",
            extra={"tail_bound": tail, "T": float(out.heights[0])},
        )
    return LineIntegral(
        sigma=float(out.sigmas[0]),
        T=float(out.heights[0]),
        h=h,
        value=value,
        tail_bound=tail,
    )


# -----------------------------------------------------------------------------
# 闭式（高斯代理 k 时成立） / Closed forms for the Gaussian surrogate
# -----------------------------------------------------------------------------
def v1_closed_form(y: np.ndarray | float, width: float = DEFAULT_WIDTH) -> np.ndarray | float:
    """V₁(y) = ½ erfc(log y / (2√λ))。"""
    return 0.5 * special.erfc(np.log(y) / (2.0 * math.sqrt(width)))


def phi_u_closed_form(y: np.ndarray | float, delta: complex, u: float, p: int, width: float = DEFAULT_WIDTH):
    """Φ_u(y) = −x^{1−δ} V₁(x)，x = y/p^u。"""
    x = np.asarray(y, dtype=np.float64) / float(p) ** u
    return -np.exp((1.0 - complex(delta)) * np.log(x)) * v1_closed_form(x, width)


def phi_u_dual_closed_form(y: np.ndarray | float, delta: complex, u: float, p: int, width: float = DEFAULT_WIDTH):
    """Φ_u(y) + x^{1−δ} = x^{1−δ} · ½ erfc(−log x / (2√λ))。"""
    x = np.asarray(y, dtype=np.float64) / float(p) ** u
    return np.exp((1.0 - complex(delta)) * np.log(x)) * 0.5 * special.erfc(-np.log(x) / (2.0 * math.sqrt(width)))


def phi_inf_direct(y: np.ndarray | float, f: CutoffFunction, **kwargs) -> np.ndarray:
    """φ_∞(y) = y^{−(1−δ)} V₂(y/f)，经 V₂ 求值。 / φ_∞ through V₂ directly."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    v2 = CutoffFunction(kind=KernelKind.V2, gamma=f.gamma, k=f.k, delta=f.delta)
    values = evaluate_kernel(v2, y / f.f, **kwargs).values
    return np.exp(-f.c * np.log(y)) * values


# -----------------------------------------------------------------------------
# 衰减拟合 / Decay profiles
# -----------------------------------------------------------------------------
@dataclass
class DecayFit:
    kind: str
    slope: float
    intercept: float
    y_min: float
    y_max: float
    points: int

    def to_dict(self) -> dict[str, object]:
        return {
            "kind": self.kind,
            "slope": self.slope,
            "intercept": self.intercept,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "points": self.points,
        }


def decay_profile(
    f: CutoffFunction,
    kind: str,
    *,
    window: Optional[tuple[float, float]] = None,
    points: int = 25,
    min_range: float = 1.0,
) -> DecayFit:
    """对数–对数回归得到衰减指数。 / Fitted decay exponent by log-log regression.

    small_y：拟合 Φ_u(y) + 留数项（即积分线移到极点右侧的同一积分），窗口默认 [10⁻³, 10⁻¹]·p^u；
    large_y：拟合 Φ_u(y) 本身，窗口默认 [10, 10³]·p^u。
    / small_y fits Φ_u plus its residue term (the same integral right of the pole);
      large_y fits Φ_u itself.
    """
    if f.kind not in (KernelKind.PHI_U, KernelKind.PHI_TILDE_U):
        raise InvalidArgument("decay profiles are defined for Phi_u and Phi_tilde_u")
    base = float(f.p) ** f.u
    if kind == "small_y":
        lo, hi = window or (1e-3, 1e-1)
        target = CutoffFunction(
            kind=KernelKind.PHI_U_DUAL,
            gamma=f.gamma,
            k=f.k,
            delta=f.delta,
            u=f.u,
            p=f.p,
        )
        if f.kind is KernelKind.PHI_TILDE_U:
            target = _tilde_dual(f)
    elif kind == "large_y":
        lo, hi = window or (10.0, 1e3)
        target = f
    else:
        raise InvalidArgument(f"decay kind must be small_y or large_y, got {kind}")
    y = base * np.geomspace(lo, hi, points)
    values = evaluate_kernel(target, y).values
    mags = np.abs(values)
    ok = np.isfinite(mags) & (mags > 0)
    if ok.sum() < 5:
        raise FitFailed(f"only {int(ok.sum())} usable points for the {kind} fit")
    log_y = np.log(y[ok])
    log_v = np.log(mags[ok])
    if float(np.ptp(log_v)) < min_range:
        raise FitFailed(f"insufficient dynamic range ({np.ptp(log_v):.3f}) for the {kind} fit")
    slope, intercept = np.polyfit(log_y, log_v, 1)
    logger.debug("decay profile %s: slope %.3f over [%g, %g]", kind, slope, y[0], y[-1])
    return DecayFit(
        kind=kind,
        slope=float(slope),
        intercept=float(intercept),
        y_min=float(y[0]),
        y_max=float(y[-1]),
        points=int(ok.sum()),
    )


@dataclass(frozen=True)
class _TildeDual(CutoffFunction):
    def strip(self) -> tuple[float, float]:
        return self.c.real + POLE_MARGIN, STRIP_CAP

    def log_integrand(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.complex128)
        with np.errstate(divide="ignore"):
            return self.k.log(self.c - s) - np.log(s - self.c) + _log_euler(s, self.p, self.euler_num)


def _tilde_dual(f: CutoffFunction) -> CutoffFunction:
    return _TildeDual(
        kind=KernelKind.PHI_TILDE_U,
        gamma=f.gamma,
        k=f.k,
        delta=f.delta,
        u=f.u,
        p=f.p,
        euler_num=f.euler_num,
    )


def seam_check(f: CutoffFunction) -> tuple[complex, complex, float]:
    """y = p^u 处左线求值与（右线求值 − 留数）之差。 / Left line versus right line minus residue at y = p^u."""
    y = float(f.p) ** f.u
    left = evaluate_kernel(f, [y])
    right_kind = _tilde_dual(f) if f.kind is KernelKind.PHI_TILDE_U else CutoffFunction(
        kind=KernelKind.PHI_U_DUAL, gamma=f.gamma, k=f.k, delta=f.delta, u=f.u, p=f.p
    )
    right = evaluate_kernel(right_kind, [y])
    residue = complex(euler_factor(f.c, f.p, f.euler_num)) if f.kind is KernelKind.PHI_TILDE_U else 1.0
    bar = float(left.tail_bounds[0] + right.tail_bounds[0])
    return complex(left.values[0]), complex(right.values[0]) - residue, bar


__all__ = [
    "CutoffFunction",
    "DecayFit",
    "GaussianLogWeight",
    "KernelKind",
    "KernelValues",
    "MIN_POLE_DISTANCE",
    "POLE_MARGIN",
    "TestFunctionK",
    "TestKind",
    "decay_profile",
    "euler_factor",
    "eval_cutoff",
    "evaluate_kernel",
    "phi_inf_direct",
    "phi_inf_mellin",
    "phi_u_closed_form",
    "phi_u_dual_closed_form",
    "seam_check",
    "v1_closed_form",
]
