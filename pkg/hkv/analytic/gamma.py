# gamma.py
# =============================================================================
# 对数 Γ 与函数方程中的 Γ 因子比 F(s)。
# / log-gamma and the archimedean gamma ratio F(s) of the functional equation.
#
#   F(s) = π^{−n/2+ns} ∏_j Γ((1−s−μ̄_j)/2) / ∏_j Γ((s−μ_j)/2)
#   F̄(s) 为逆步表示的同一比值（μ 与 μ̄ 互换），满足 F̄(s)·F(1−s) = 1。
# / F̄ swaps μ and μ̄ and satisfies F̄(s)·F(1−s) = 1.
# =============================================================================

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from hkv.errors import InvalidArgument, PoleAtNonPositiveInteger, PoleHit

logger = logging.getLogger(__name__)

LOG_PI = math.log(math.pi)
# 到极点的最小距离。 / Minimum distance to a pole.
POLE_GUARD = 1e-12


@dataclass(frozen=True)
class GammaData:
    """阿基米德参数 μ_j 与其共轭 μ̄_j。 / Archimedean parameters μ_j and their conjugates."""

    n: int
    mu: tuple[complex, ...] = field(default=())

    def __post_init__(self) -> None:
        mu = tuple(complex(m) for m in self.mu) or tuple(0j for _ in range(self.n))
        if len(mu) != self.n:
            raise InvalidArgument(f"expected {self.n} archimedean parameters, got {len(mu)}")
        bound = 0.5 - 1.0 / (self.n * self.n + 1)
        for m in mu:
            if abs(m.real) > bound + 1e-15:
                raise InvalidArgument(f"|Re mu| = {abs(m.real):.4f} exceeds the sanity bound {bound:.4f}")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def trivial(cls, n: int) -> "GammaData":
        return cls(n=n)

    @property
    def mu_bar(self) -> tuple[complex, ...]:
        return tuple(m.conjugate() for m in self.mu)

    @property
    def delta0(self) -> float:
        return max(m.real for m in self.mu_bar)

    @property
    def is_trivial(self) -> bool:
        return all(m == 0 for m in self.mu)

    def dual(self) -> "GammaData":
        return GammaData(n=self.n, mu=self.mu_bar)

    def to_dict(self) -> dict[str, object]:
        return {"n": self.n, "mu": [[m.real, m.imag] for m in self.mu]}


def _near_nonpositive_integer(z: np.ndarray) -> np.ndarray:
    rounded = np.round(z.real)
    return (rounded <= 0) & (np.abs(z - rounded) < POLE_GUARD)


def log_gamma(s: complex | np.ndarray) -> complex | np.ndarray:
    """主支 log Γ(s)。 / Principal branch of log Γ(s)."""
    z = np.asarray(s, dtype=np.complex128)
    if np.any(_near_nonpositive_integer(z)):
        raise PoleAtNonPositiveInteger(f"log_gamma has a pole at {s}")
    out = special.loggamma(z)
    return complex(out) if out.ndim == 0 else out


def log_gamma_reflection(s: complex | np.ndarray) -> complex | np.ndarray:
    """由反射公式得到的 log Γ(s)（模 2πi）。 / log Γ(s) via reflection, up to a multiple of 2πi.

    Γ(s) = π / (sin(πs) Γ(1−s))
    """
    z = np.asarray(s, dtype=np.complex128)
    if np.any(_near_nonpositive_integer(z)):
        raise PoleAtNonPositiveInteger(f"log_gamma has a pole at {s}")
    out = LOG_PI - np.log(np.sin(np.pi * z)) - special.loggamma(1.0 - z)
    return complex(out) if out.ndim == 0 else out


def _ratio(s: np.ndarray, top: Sequence[complex], bottom: Sequence[complex], n: int, reflection: bool) -> np.ndarray:
    log_num = np.zeros_like(s)
    for mb in top:
        arg = (1.0 - s - mb) / 2.0
        if np.any(_near_nonpositive_integer(arg)):
            raise PoleHit(f"gamma ratio numerator has a pole near s = {s[_near_nonpositive_integer(arg)][0]}")
        log_num += log_gamma_reflection(arg) if reflection else special.loggamma(arg)
    inv_den = np.ones_like(s)
    for m in bottom:
        inv_den *= special.rgamma((s - m) / 2.0)
    return np.exp((-n / 2.0 + n * s) * LOG_PI + log_num) * inv_den


def F_ratio(s: complex | np.ndarray, g: GammaData, *, path: str = "direct") -> complex | np.ndarray:
    """F(s)；path="reflection" 时分子 Γ 走反射公式。 / F(s); "reflection" routes numerator gammas through reflection."""
    z = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    out = _ratio(z, g.mu_bar, g.mu, g.n, path == "reflection")
    return complex(out[0]) if np.ndim(s) == 0 else out


def log_F_ratio(s: np.ndarray, g: GammaData) -> np.ndarray:
    """log F(s)（按分支逐项相加，只用于取指数）；分母极点处实部为 −∞。
    / log F(s) up to multiples of 2πi, for exponentiation only; −∞ where F vanishes.
    """
    z = np.asarray(s, dtype=np.complex128)
    out = (-g.n / 2.0 + g.n * z) * LOG_PI
    for mb in g.mu_bar:
        arg = (1.0 - z - mb) / 2.0
        if np.any(_near_nonpositive_integer(arg)):
            raise PoleHit("gamma ratio numerator has a pole on the requested nodes")
        out = out + special.loggamma(arg)
    zero = np.zeros(z.shape, dtype=bool)
    for m in g.mu:
        arg = (z - m) / 2.0
        pole = _near_nonpositive_integer(arg)
        zero |= pole
        out = out - special.loggamma(np.where(pole, 0.5, arg))
    if np.any(zero):
        out = np.where(zero, complex(-np.inf, 0.0), out)
    return out


def Fbar_ratio(s: complex | np.ndarray, g: GammaData) -> complex | np.ndarray:
    """逆步表示的 F̄(s)。 / F̄(s) for the contragredient parameters."""
    return F_ratio(s, g.dual())


def stirling_majorant(s: complex | np.ndarray, g: GammaData) -> np.ndarray | float:
    """|F(σ+it)| 的 Stirling 近似。 / Stirling approximation of |F(σ+it)|.

    |F| ≈ ∏_j (|t|/2π)^{1/2 − σ − Re(μ̄_j − μ_j)/2}
    """
    z = np.asarray(s, dtype=np.complex128)
    t = np.maximum(np.abs(z.imag), 1e-300)
    exponent = np.zeros_like(t)
    for m, mb in zip(g.mu, g.mu_bar):
        exponent = exponent + 0.5 - z.real - (mb.real - m.real) / 2.0
    out = (t / (2.0 * math.pi)) ** exponent
    return float(out) if out.ndim == 0 else out


__all__ = [
    "F_ratio",
    "Fbar_ratio",
    "GammaData",
    "log_F_ratio",
    "log_gamma",
    "log_gamma_reflection",
    "stirling_majorant",
]
