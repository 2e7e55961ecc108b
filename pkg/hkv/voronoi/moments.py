# moments.py
# =============================================================================
# 本原偶特征上扭曲 L 值的一阶矩 X_β(π, δ) 及其分解。
# / The first moment X_β(π, δ) of twisted L-values over primitive even
#   characters, and its decompositions.
#
#   X_β  = (2/φ*(q)) Σ_{χ 本原偶} L(δ, π⊗χ)                     （直接求值，基准）
#   X1   = Σ_{(m,p)=1} a(m) w₁(m) m^{−δ} V₁(m/Z)，Z = p^u
#          w₁ = 1 于 ±1 mod q，−1/φ(p) 于 ±1 mod p^{β−1} 而非 ±1 mod q
#   X2   = pre · Σ_{(m,p)=1} ā(m) Kl_n(±m N̄) m^{−(1−δ)} V₂(m/f)，f = N q^n / Z
#          pre = (p/φ(p)) W ω(q) (N q^n)^{1/2−δ} q^{−n/2}
# X2 的长度 f 很大时改走 Mellin 路径：
#   Σ = ∫_{(σ)} g(w) f^{w} P(1−δ+w) dw/2πi，P(z) = Σ ā(m) Kl_n(±mN̄) m^{−z}
# P 由剩余类级数（Hurwitz）给出，对任意 z 有效。
# / X2 switches to a Mellin route when f is large; the class series makes
#   P(z) available at every node.
# =============================================================================

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from threading import Lock
from typing import Dict, Optional

import numpy as np
from scipy import special

from hkv.analytic.kernels import DEFAULT_WIDTH, CutoffFunction, KernelKind, TestFunctionK, evaluate_kernel
from hkv.analytic.quadrature import DEFAULT_STEP, DEFAULT_TAIL_TOL, choose_height
from hkv.arith.characters import CharacterFilter, character_indices
from hkv.arith.kloosterman import kloosterman_pm_table, kloosterman_zero_pm_table
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.engine.recorder import atomic_write_json
from hkv.errors import IdentityViolated, InvalidArgument, SalieUnavailable
from hkv.ldata.datum import LData, coeff_range
from hkv.ldata.progression import class_series_for
from hkv.ldata.twisted import kernel_sum, kernel_truncation, twisted_L_values
from hkv.numerics.powers import complex_power
from hkv.numerics.summation import csum
from hkv.primitives.models import ErrorBar, VerificationReport
from hkv.runtime_paths import resolve_cache_dir
from hkv.series.families import FamilyParams
from hkv.voronoi.summation import (
    DEFAULT_TAIL_TARGET,
    Theorem,
    VoronoiWeight,
    WeightKind,
    derived_voronoi_reading,
    evaluate_voronoi_reading,
)

logger = logging.getLogger(__name__)

DEFAULT_MOMENT_TOLERANCE = 1e-5
# f 不超过该值时 X2 直接截断求和。 / Below this length X2 is summed directly.
DIRECT_X2_LIMIT = 20_000.0
# Mellin 路径上 Re(1−δ+w) = 1 + MELLIN_MARGIN。 / Distance of the Mellin line from the pole of P.
MELLIN_MARGIN = 0.4
ENVELOPE_EPSILON = 0.01
TWISTED_BOUND_C = 2.0
THETA = 0.0
# 广义 Ramanujan 猜想的当前最好记录，仅作记录。 / Best known approximation, stored for reference.
THETA_RECORD = 7.0 / 64.0
U_SWEEP = (1.0, 1.5, 2.0)


class X2Route(str, Enum):
    MELLIN = "mellin"
    DIRECT = "direct"
    AUTO = "auto"


@dataclass(frozen=True)
class MomentQuery:
    """一个矩实例：数据、模数 p^β、δ 与不平衡指数 u（Z = p^u）。
    / One moment instance; Z = p^u splits the approximate functional equation.
    """

    datum: LData
    modulus: PrimePowerModulus
    delta: complex = complex(0.6, 0.3)
    u: float = 1.5
    width: float = DEFAULT_WIDTH
    allow_prime: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", complex(self.delta))
        object.__setattr__(self, "u", float(self.u))
        p, beta = self.modulus.p, self.modulus.beta
        self.datum.check_coprime(p)
        if self.datum.n % p == 0:
            raise InvalidArgument(f"p={p} must not divide the degree n={self.datum.n}")
        if not 0.0 < self.delta.real < 1.0:
            raise InvalidArgument(f"delta must satisfy 0 < Re(delta) < 1, got {self.delta}")
        if beta < 2 and not self.allow_prime:
            raise InvalidArgument("moments are taken over a prime power p^beta with beta >= 2")
        upper = beta - 1 if beta >= 2 else math.inf
        if not 0.0 < self.u < upper:
            raise InvalidArgument(f"u must satisfy 0 < u < {upper}, got {self.u}")

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def q(self) -> int:
        return self.modulus.modulus

    @property
    def n(self) -> int:
        return self.datum.n

    @property
    def Z(self) -> float:
        return float(self.p) ** self.u

    @property
    def c(self) -> complex:
        return 1.0 - self.delta

    @property
    def conductor(self) -> float:
        """N q^n。"""
        return self.datum.N * float(self.q) ** self.n

    @property
    def f(self) -> float:
        return self.conductor / self.Z

    @property
    def k(self) -> TestFunctionK:
        return TestFunctionK.for_gamma(self.datum.gamma, self.width)

    def with_u(self, u: float) -> "MomentQuery":
        return MomentQuery(self.datum, self.modulus, self.delta, u, self.width, self.allow_prime)

    def cache_key(self) -> str:
        d = self.delta
        return f"{self.datum.spec()}|{self.modulus.label()}|{d.real!r},{d.imag!r}"

    def to_dict(self) -> dict[str, object]:
        return {
            "datum": self.datum.spec(),
            "p": self.p,
            "beta": self.modulus.beta,
            "n": self.n,
            "delta": self.delta,
            "u": self.u,
            "width": self.width,
        }


# -----------------------------------------------------------------------------
# 直接求值与缓存 / Direct evaluation and its cache
# -----------------------------------------------------------------------------
class MomentCache:
    """moment_direct 的进程内缓存，可镜像到缓存目录的 moment_cache.json。
    / In-process cache of moment_direct values, optionally mirrored to disk.
    """

    FILE_NAME = "moment_cache.json"

    def __init__(self) -> None:
        self._entries: Dict[str, tuple[complex, float]] = {}
        self._lock = Lock()

    def _path(self, cache_dir: Optional[str]) -> Path:
        return Path(resolve_cache_dir(cache_dir)) / self.FILE_NAME

    def _read_file(self, cache_dir: Optional[str]) -> dict:
        path = self._path(cache_dir)
        if not path.is_file():
            return {}
        try:
            return json.loads(path.read_text(encoding="utf-8")).get("entries", {})
        except (OSError, ValueError) as exc:
            logger.warning("unreadable moment cache %s: %s", path, exc)
            return {}

    def get(self, query: MomentQuery, *, cache_dir: Optional[str] = None) -> Optional[tuple[complex, float]]:
        key = query.cache_key()
        with self._lock:
            found = self._entries.get(key)
        if found is not None:
            return found
        entry = self._read_file(cache_dir).get(key)
        if entry is None:
            return None
        value = (complex(entry["value"]["re"], entry["value"]["im"]), float(entry["bar"]))
        with self._lock:
            self._entries[key] = value
        return value

    def put(
        self,
        query: MomentQuery,
        value: complex,
        bar: float,
        *,
        cache_dir: Optional[str] = None,
        persist: bool = True,
    ) -> None:
        key = query.cache_key()
        with self._lock:
            self._entries[key] = (complex(value), float(bar))
        if not persist:
            return
        entries = self._read_file(cache_dir)
        entries[key] = {"value": complex(value), "bar": float(bar)}
        atomic_write_json(self._path(cache_dir), {"schema": 1, "kind": "moment_cache", "entries": entries})

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()


moment_cache = MomentCache()


def moment_direct_value(
    query: MomentQuery, *, cache_dir: Optional[str] = None, persist: bool = True
) -> tuple[complex, float]:
    """X_β 及其误差条，逐个特征求 L(δ, π⊗χ)。 / X_β with its bar, one product-mode L-value per character."""
    cached = moment_cache.get(query, cache_dir=cache_dir)
    if cached is not None:
        return cached
    modulus = query.modulus
    group = build_unit_group(modulus)
    idx = character_indices(group, CharacterFilter.PRIMITIVE_EVEN)
    values, bars = twisted_L_values(query.datum, modulus, idx, query.delta)
    scale = 2.0 / modulus.phi_star
    value, bar = scale * csum(values), scale * float(np.sum(bars))
    logger.debug("X_beta over %d characters mod %s: %s (bar %.2e)", idx.size, modulus.label(), value, bar)
    moment_cache.put(query, value, bar, cache_dir=cache_dir, persist=persist)
    return value, bar


def moment_direct(query: MomentQuery, *, cache_dir: Optional[str] = None) -> complex:
    return moment_direct_value(query, cache_dir=cache_dir)[0]


# -----------------------------------------------------------------------------
# 核与权重 / Kernels and class weights
# -----------------------------------------------------------------------------
def x1_weights(modulus: PrimePowerModulus) -> np.ndarray:
    """(2/φ*) Σ_{χ 本原偶} χ(m) 作为 m mod q 的函数。"""
    p = modulus.p
    return kloosterman_zero_pm_table(modulus) * (p / (p - 1))


def x2_weights(query: MomentQuery) -> np.ndarray:
    """Kl_n(±m N̄) 作为 m mod q 的函数。"""
    q = query.q
    table = kloosterman_pm_table(query.n, query.modulus)
    n_bar = pow(query.datum.N, -1, q)
    return table[(np.arange(q, dtype=np.int64) * n_bar) % q]


def x2_prefactor(query: MomentQuery) -> complex:
    pi, p, q = query.datum, query.p, query.q
    return (
        (p / (p - 1))
        * complex(pi.W)
        * complex(pi.omega(q))
        * complex_power(query.conductor, 0.5 - query.delta)
        * float(q) ** (-query.n / 2.0)
    )


def v1_kernel(query: MomentQuery) -> CutoffFunction:
    return CutoffFunction(kind=KernelKind.V1, gamma=query.datum.gamma, k=query.k)


def v2_kernel(query: MomentQuery) -> CutoffFunction:
    return CutoffFunction(kind=KernelKind.V2, gamma=query.datum.gamma, k=query.k, delta=query.delta)


def phi_u_kernel(query: MomentQuery, *, tilde: bool = False, euler_num: tuple[complex, ...] = ()) -> CutoffFunction:
    return CutoffFunction(
        kind=KernelKind.PHI_TILDE_U if tilde else KernelKind.PHI_U,
        gamma=query.datum.gamma,
        k=query.k,
        delta=query.delta,
        u=query.u,
        p=query.p,
        euler_num=euler_num,
    )


def phi_u_weighted_sum(
    query: MomentQuery,
    weights: Optional[np.ndarray],
    modulus: PrimePowerModulus,
    scale: float,
    *,
    kernel: Optional[CutoffFunction] = None,
    coprime: bool = True,
    tail_tol: float = DEFAULT_TAIL_TARGET,
) -> tuple[complex, float, int]:
    """Σ a(m)/m K(m mod p^γ) Φ_u(m·scale)；weights 为 None 时 K ≡ 1。"""
    kernel = kernel or phi_u_kernel(query)
    kmax = 1.0 if weights is None else max(float(np.abs(weights).max(initial=0.0)), 1e-300)
    M, tail = kernel_truncation(kernel, 1.0, scale, query.n, tail_tol / kmax, start=16)
    m = np.arange(1, M + 1, dtype=np.int64)
    coeffs = coeff_range(query.datum, M).astype(np.complex128)
    if weights is not None:
        coeffs[1:] *= weights[m % modulus.modulus]
    if coprime:
        coeffs[1:][m % query.p == 0] = 0.0
    value, bar = kernel_sum(coeffs, 1.0, kernel, scale, M, kmax * tail)
    return value, bar, M


def dual_progression_sum(query: MomentQuery, *, tail_tol: float = DEFAULT_TAIL_TARGET) -> tuple[complex, float]:
    """S_u = Σ_{(m,p)=1} a(m)/m w₁(m) Φ_u(m)。"""
    value, bar, _ = phi_u_weighted_sum(query, x1_weights(query.modulus), query.modulus, 1.0, tail_tol=tail_tol)
    return value, bar


# -----------------------------------------------------------------------------
# Mellin 路径 / The Mellin route
# -----------------------------------------------------------------------------
def progression_mellin_sum(
    datum: LData,
    modulus: PrimePowerModulus,
    weights: np.ndarray,
    a: complex,
    kernel: CutoffFunction,
    scale: float,
    *,
    h: float = DEFAULT_STEP,
    tail_tol: float = DEFAULT_TAIL_TOL,
    margin: float = MELLIN_MARGIN,
) -> tuple[complex, float, dict[str, object]]:
    """Σ_{(m,p)=1} b(m) K(m) m^{−a} V(m·scale)，V 为 y^{−w} 型核。
    / A kernel-weighted progression sum through the Mellin integral of V.

    在 Re(a+w) = 1 + margin 的竖线上用梯形法则求积，每个节点的 P(a+w)
    取剩余类级数与 K 的配对；|t| > T 的尾项以 K_max ζ(Re(a+w))^d 控制。
    / Trapezoid rule on Re(a+w) = 1 + margin; the class series supplies P at
      every node and the tail beyond T is bounded with K_max ζ^d.
    """
    if kernel.sign != -1:
        raise InvalidArgument(f"the Mellin route needs a y^(-w) kernel, got {kernel.kind.value}")
    a = complex(a)
    lo, hi = kernel.strip()
    sigma = max(lo, 1.0 + margin - a.real)
    if sigma >= hi:
        raise InvalidArgument(f"no legal abscissa for the Mellin route (sigma={sigma}, strip={lo, hi})")
    log_g = kernel.log_integrand
    T = choose_height(log_g, sigma, tail_tol)
    K = int(math.ceil(T / h))
    t = np.arange(-K, K + 1, dtype=np.float64) * h
    w = sigma + 1j * t
    log_scale = math.log(scale)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        log_nodes = log_g(w) - w * log_scale
    nodes = np.where(np.isfinite(log_nodes.real), np.exp(log_nodes), 0j) * (h / (2.0 * math.pi))

    values = np.empty(w.size, dtype=np.complex128)
    bars = np.empty(w.size, dtype=np.float64)
    for i, wi in enumerate(w):
        values[i], bars[i] = class_series_for(datum, modulus, a + wi).weighted(weights)
    terms = nodes * values
    value = csum(terms)

    kmax = float(np.abs(weights).max(initial=0.0))
    p_max = kmax * float(special.zeta(a.real + sigma, 1.0)) ** datum.n
    t_tail = np.arange(K + 1, 2 * K + 1, dtype=np.float64) * h
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        mags = np.exp(np.real(log_g(sigma + 1j * t_tail))) + np.exp(np.real(log_g(sigma - 1j * t_tail)))
    tail = float(np.nansum(mags)) * h / (2.0 * math.pi) * scale ** (-sigma) * p_max
    bar = tail + float(np.sum(np.abs(nodes) * bars)) + 8.0 * np.finfo(float).eps * float(np.abs(terms).sum())
    logger.debug("Mellin progression sum: sigma=%.3f T=%.1f nodes=%d tail=%.2e", sigma, T, w.size, tail)
    return value, bar, {"sigma": sigma, "T": T, "h": h, "nodes": int(w.size), "tail": tail}


# -----------------------------------------------------------------------------
# 分解 / Decomposition
# -----------------------------------------------------------------------------
@dataclass
class MomentDecomposition:
    X1: complex
    X2: complex
    X1_bar: float
    X2_bar: float
    route: str
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def total(self) -> complex:
        return self.X1 + self.X2

    @property
    def bar(self) -> float:
        return self.X1_bar + self.X2_bar

    def to_dict(self) -> dict[str, object]:
        return {
            "X1": self.X1,
            "X2": self.X2,
            "X1_bar": self.X1_bar,
            "X2_bar": self.X2_bar,
            "total": self.total,
            "route": self.route,
            "details": self.details,
        }


def x1_sum(query: MomentQuery, *, tail_tol: float = DEFAULT_TAIL_TARGET) -> tuple[complex, float, int]:
    weights = x1_weights(query.modulus)
    kernel = v1_kernel(query)
    scale = 1.0 / query.Z
    M, tail = kernel_truncation(kernel, query.delta.real, scale, query.n, tail_tol)
    m = np.arange(1, M + 1, dtype=np.int64)
    coeffs = coeff_range(query.datum, M).astype(np.complex128)
    coeffs[1:] *= weights[m % query.q]
    value, bar = kernel_sum(coeffs, query.delta, kernel, scale, M, tail)
    return value, bar, M


def x2_sum(
    query: MomentQuery,
    route: X2Route | str = X2Route.AUTO,
    *,
    tail_tol: float = DEFAULT_TAIL_TARGET,
) -> tuple[complex, float, dict[str, object]]:
    """X2（含前因子）。 / X2 including its prefactor."""
    route = X2Route(route)
    if route is X2Route.AUTO:
        route = X2Route.DIRECT if query.f <= DIRECT_X2_LIMIT else X2Route.MELLIN
    dual = query.datum.dual()
    weights = x2_weights(query)
    kernel = v2_kernel(query)
    pre = x2_prefactor(query)
    details: Dict[str, object] = {"route": route.value, "f": query.f, "prefactor": pre}
    if route is X2Route.MELLIN:
        value, bar, info = progression_mellin_sum(dual, query.modulus, weights, query.c, kernel, 1.0 / query.f)
        details.update(info)
    else:
        kmax = max(float(np.abs(weights).max(initial=0.0)), 1e-300)
        scale = 1.0 / query.f
        M, tail = kernel_truncation(kernel, query.c.real, scale, query.n, tail_tol / (kmax * abs(pre)))
        m = np.arange(1, M + 1, dtype=np.int64)
        coeffs = coeff_range(dual, M).astype(np.complex128)
        coeffs[1:] *= weights[m % query.q]
        coeffs[1:][m % query.p == 0] = 0.0
        value, bar = kernel_sum(coeffs, query.c, kernel, scale, M, kmax * tail)
        details["M"] = M
    return pre * value, abs(pre) * bar, details


def moment_envelopes(query: MomentQuery, X1: complex, X2: complex, X_beta: Optional[complex] = None) -> dict:
    """数值健全性包络：lower、trivialX2、twistedbound（隐含常数取 1）。
    / Sanity envelopes with implied constants set to one.
    """
    p, beta, N = query.p, query.modulus.beta, query.datum.N
    eps = ENVELOPE_EPSILON
    re_delta = query.delta.real
    trivial = (
        float(p) ** (-beta / 2.0)
        * query.conductor ** (1.5 + eps)
        * float(N) ** (re_delta + eps)
        * query.Z ** (-(1.0 + re_delta + eps))
    )
    out: Dict[str, object] = {
        "lower": {"value": abs(X1 - 1.0)},
        "trivialX2": {"value": abs(X2), "envelope": trivial, "within": abs(X2) <= trivial},
    }
    if X_beta is not None:
        C = TWISTED_BOUND_C
        bound = query.Z**C * float(query.q) ** (THETA - re_delta - C) * 2.0 * float(special.zeta(C, 1.0))
        gap = abs(X_beta - 1.0 - X2)
        out["twistedbound"] = {
            "value": gap,
            "bound": bound,
            "within": gap <= bound,
            "theta": THETA,
            "theta_record": THETA_RECORD,
        }
    return out


def moment_decomposition(
    query: MomentQuery,
    *,
    route: X2Route | str = X2Route.AUTO,
    tail_tol: float = DEFAULT_TAIL_TARGET,
) -> MomentDecomposition:
    """X_β = X1 + X2。"""
    if query.modulus.beta < 2:
        raise InvalidArgument("the moment decomposition needs beta >= 2")
    X1, X1_bar, M1 = x1_sum(query, tail_tol=tail_tol)
    X2, X2_bar, x2_details = x2_sum(query, route, tail_tol=tail_tol)
    first = complex(v1_kernel_at(query, 1.0 / query.Z))
    details: Dict[str, object] = {
        "Z": query.Z,
        "X1_M": M1,
        "X2": x2_details,
        "first_term": first,
        "envelopes": moment_envelopes(query, X1, X2),
    }
    logger.info("moment decomposition %s: X1=%s X2=%s (route %s)", query.to_dict(), X1, X2, x2_details["route"])
    return MomentDecomposition(X1, X2, X1_bar, X2_bar, str(x2_details["route"]), details)


def v1_kernel_at(query: MomentQuery, y: float) -> complex:
    return complex(evaluate_kernel(v1_kernel(query), [y]).values[0])


# -----------------------------------------------------------------------------
# 递推校验 / Recursion check
# -----------------------------------------------------------------------------
def vsfk_params(query: MomentQuery) -> FamilyParams:
    """VSFK 的参数：数据 π，类 h = N̄，使左侧权重为 Kl_n(±m N̄)。"""
    return FamilyParams(query.datum, query.modulus, pow(query.datum.N, -1, query.q))


def vsfk_route(
    query: MomentQuery, X1: complex, X1_bar: float, *, tail_tol: float = DEFAULT_TAIL_TARGET
) -> tuple[complex, float, dict[str, object]]:
    """X1 + pre·(留数 + 对偶和)，右侧取自直接超 Kloosterman 的 Voronoi 公式。
    / X1 plus the prefactor times the right side of the direct hyper-Kloosterman formula.
    """
    params = vsfk_params(query)
    weight = VoronoiWeight(kind=WeightKind.PHI_INF, delta=query.delta, u=query.u, width=query.width)
    reading = derived_voronoi_reading(Theorem.VSFK, params, weight)
    rhs, rhs_bar, terms, truncations = evaluate_voronoi_reading(
        reading, query.datum.dual(), params, tail_tol=tail_tol
    )
    pre = x2_prefactor(query)
    value = X1 + pre * rhs
    return value, X1_bar + abs(pre) * rhs_bar, {"terms": {k: pre * v for k, v in terms.items()}, "truncations": truncations}


def vsfts_route(
    query: MomentQuery, *, cache_dir: Optional[str] = None, tail_tol: float = DEFAULT_TAIL_TARGET
) -> tuple[complex, float, dict[str, object]]:
    """−p^{u(1−δ)} S_u + X2，X2 取扭曲和的 Voronoi 展开。"""
    from hkv.voronoi.twisted_sum import twisted_sum_voronoi

    S_u, S_bar = dual_progression_sum(query, tail_tol=tail_tol)
    lift = complex_power(query.p, query.u * query.c)
    twisted = twisted_sum_voronoi(query, cache_dir=cache_dir, tail_tol=tail_tol)
    value = -lift * S_u + twisted.value
    return value, abs(lift) * S_bar + twisted.bar, {"S_u": S_u, "X2": twisted.value, "blocks": twisted.summary()}


def vsfts_u_sweep(
    query: MomentQuery, us: tuple[float, ...] = U_SWEEP, *, cache_dir: Optional[str] = None
) -> dict[str, object]:
    """VSFts 路径对 u 的不变性。 / The VSFts route across several u."""
    values: Dict[str, complex] = {}
    bars: Dict[str, float] = {}
    for u in us:
        value, bar, _ = vsfts_route(query.with_u(u), cache_dir=cache_dir)
        values[repr(float(u))] = value
        bars[repr(float(u))] = bar
    items = list(values.values())
    spread = max((abs(a - b) for a in items for b in items), default=0.0)
    return {"values": values, "bars": bars, "spread": spread}


def moment_recursion(
    query: MomentQuery,
    *,
    tolerance: float = DEFAULT_MOMENT_TOLERANCE,
    route: X2Route | str = X2Route.AUTO,
    cache_dir: Optional[str] = None,
    tail_tol: float = DEFAULT_TAIL_TARGET,
    raise_on_failure: bool = False,
) -> VerificationReport:
    """直接值对照三条路径：X1 + X2、VSFts、VSFK。报告的右侧取偏差最大的路径。
    / The direct moment against every available route; rhs is the worst one.
    """
    direct, direct_bar = moment_direct_value(query, cache_dir=cache_dir)
    decomposition = moment_decomposition(query, route=route, tail_tol=tail_tol)

    routes: Dict[str, complex] = {"decomposition": decomposition.total}
    route_bars: Dict[str, float] = {"decomposition": decomposition.bar}
    diagnostics: Dict[str, object] = {"decomposition": decomposition.to_dict()}

    value, bar, info = vsfk_route(query, decomposition.X1, decomposition.X1_bar, tail_tol=tail_tol)
    routes["VSFK"], route_bars["VSFK"] = value, bar
    diagnostics["VSFK"] = info

    try:
        value, bar, info = vsfts_route(query, cache_dir=cache_dir, tail_tol=tail_tol)
    except SalieUnavailable as exc:
        logger.info("VSFts route skipped: %s", exc.message)
        diagnostics["VSFts"] = {"skipped": exc.message}
    else:
        routes["VSFts"], route_bars["VSFts"] = value, bar
        diagnostics["VSFts"] = info

    worst = max(routes, key=lambda name: abs(routes[name] - direct))
    lift = complex_power(query.p, query.u * query.c)
    leading = lift * _phi_u_at_one(query)
    diagnostics.update(
        {
            "routes": routes,
            "route_bars": route_bars,
            "route_residuals": {name: abs(v - direct) for name, v in routes.items()},
            "worst_route": worst,
            "leading_phi_u_term": leading,
            "envelopes": moment_envelopes(query, decomposition.X1, decomposition.X2, direct),
        }
    )
    bar_total = ErrorBar().add("direct", direct_bar).add(worst, route_bars[worst])
    report = VerificationReport(
        check_id="VSFts" if "VSFts" in routes else "VSFK",
        params=query.to_dict(),
        lhs=direct,
        rhs=routes[worst],
        tolerance=tolerance,
        error_bar=bar_total,
        diagnostics=diagnostics,
    )
    logger.info("moment recursion %s: worst route %s, relative residual %.2e", query.to_dict(), worst, report.relative_residual)
    if not report.passed and raise_on_failure:
        raise IdentityViolated(
            f"moment route {worst} residual {report.relative_residual:.2e} exceeds {tolerance:g}",
            extra={"report": report.to_dict()},
        )
    return report


def _phi_u_at_one(query: MomentQuery) -> complex:
    return complex(evaluate_kernel(phi_u_kernel(query), [1.0]).values[0])


__all__ = [
    "DEFAULT_MOMENT_TOLERANCE",
    "DIRECT_X2_LIMIT",
    "MomentCache",
    "MomentDecomposition",
    "MomentQuery",
    "THETA_RECORD",
    "U_SWEEP",
    "X2Route",
    "dual_progression_sum",
    "moment_cache",
    "moment_decomposition",
    "moment_direct",
    "moment_direct_value",
    "moment_envelopes",
    "moment_recursion",
    "phi_u_kernel",
    "phi_u_weighted_sum",
    "progression_mellin_sum",
    "vsfk_params",
    "vsfk_route",
    "vsfts_route",
    "vsfts_u_sweep",
    "x1_sum",
    "x1_weights",
    "x2_prefactor",
    "x2_sum",
    "x2_weights",
]
