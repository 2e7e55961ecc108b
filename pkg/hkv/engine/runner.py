# runner.py
# =============================================================================
# 运行编排: 把一个 RunConfig 变成报告文件与退出码。
# / Run orchestration: turns one RunConfig into report files and an exit code.
#
# 流程 / Flow:
#   1. 按命令校验 params（hkv.engine.params）
#   2. 顺序执行各项检查；归约顺序固定，报告可逐字节重放
#   3. 每项检查一份 JSON 报告，可选 CSV 逐项表；耗时只进 timings.json
#   4. 任一检查失败 → 退出码 1（CheckFailed 列出失败报告路径）
#   / Validate params per command, run checks in a fixed order, write one
#     JSON report per check (optional CSV term tables, runtimes only in
#     timings.json); any failing check gives exit code 1.
# =============================================================================

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from hkv.config import Command, OutputFormat, RunConfig
from hkv.engine.params import (
    AverageParams,
    BenchParams,
    KernelParams,
    KlParams,
    LdataParams,
    SeriesParams,
    VerifyParams,
    VoronoiParams,
    validate_params,
)
from hkv.engine.recorder import ReportRecorder, atomic_write_text, to_jsonable
from hkv.errors import CheckFailed, NoConventionMatches, SalieUnavailable
from hkv.primitives.models import ErrorBar, IdentityReport, VerificationReport
from hkv.runtime_paths import resolve_cache_dir, resolve_output_dir

logger = logging.getLogger(__name__)

CONFIG_FILE_NAME = "run_config.yaml"


@dataclass
class CheckRecord:
    """一项检查或一次求值的结果。passed 为 None 表示纯求值。
    / One check or plain evaluation; passed is None for plain values.
    """

    name: str
    kind: str
    report: Dict[str, Any]
    passed: Optional[bool] = None
    path: Optional[Path] = None


@dataclass
class CsvTable:
    name: str
    header: Sequence[str]
    rows: List[Sequence[Any]]


@dataclass
class RunResult:
    command: str
    payload: Dict[str, Any] = field(default_factory=dict)
    records: List[CheckRecord] = field(default_factory=list)
    tables: List[CsvTable] = field(default_factory=list)
    written: List[Path] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    output_dir: Optional[Path] = None

    @property
    def passed(self) -> bool:
        return all(record.passed is not False for record in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    @property
    def failing(self) -> List[CheckRecord]:
        return [record for record in self.records if record.passed is False]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "passed": self.passed,
            "exit_code": self.exit_code,
            "checks": [
                {"name": r.name, "kind": r.kind, "passed": r.passed, "path": str(r.path) if r.path else None}
                for r in self.records
            ],
            "files": [str(path) for path in self.written],
            "output_dir": str(self.output_dir) if self.output_dir else None,
            **to_jsonable(self.payload),
        }


@dataclass
class _Context:
    config: RunConfig
    cache_dir: str
    result: RunResult

    def add_check(self, name: str, report: VerificationReport | IdentityReport) -> None:
        kind = "identity_report" if isinstance(report, IdentityReport) else "verification_report"
        self.result.records.append(CheckRecord(name, kind, report.to_dict(), passed=report.passed))

    def add_value(self, name: str, kind: str, document: Dict[str, Any]) -> None:
        self.result.records.append(CheckRecord(name, kind, document))

    def add_table(self, name: str, header: Sequence[str], rows: List[Sequence[Any]]) -> None:
        self.result.tables.append(CsvTable(name, header, rows))


def _slug(*parts: Any) -> str:
    text = "_".join(str(part) for part in parts if part not in (None, ""))
    return "".join(ch if ch.isalnum() or ch in "-_" else "-" for ch in text)


def _complex_cells(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _term_rows(report: VerificationReport, terms: Dict[str, Any]) -> List[Sequence[Any]]:
    rows: List[Sequence[Any]] = [["lhs", *_complex_cells(report.lhs)], ["rhs", *_complex_cells(report.rhs)]]
    for name, value in terms.items():
        rows.append([name, *_complex_cells(value)])
    return rows


# -----------------------------------------------------------------------------
# 命令 / Commands
# -----------------------------------------------------------------------------
def _ensure_salie(p: int, beta: int, n: int, ctx: _Context) -> None:
    from hkv.arith.salie import calibrate_salie_lift, salie_registry

    if salie_registry.get(p, beta, n, cache_dir=ctx.cache_dir) is None:
        calibrate_salie_lift(p, beta, n, tolerance=ctx.config.tolerances.salie, cache_dir=ctx.cache_dir)


def _run_kl(ctx: _Context) -> None:
    from hkv.arith.kloosterman import KloostermanMethod, KloostermanQuery, kloosterman
    from hkv.arith.modulus import PrimePowerModulus

    prm = validate_params(KlParams, ctx.config.params, "kl")
    query = KloostermanQuery(prm.n, prm.c, PrimePowerModulus(prm.p, prm.beta), prm.method, prm.pm)
    if query.method is KloostermanMethod.SALIE:
        _ensure_salie(prm.p, prm.beta, prm.n, ctx)
    start = time.perf_counter_ns()
    value = kloosterman(query)
    runtime_ns = time.perf_counter_ns() - start
    name = _slug("kl", f"p{prm.p}", f"b{prm.beta}", f"n{prm.n}", f"c{prm.c}", "pm" if prm.pm else "")
    document = {"params": prm.model_dump(mode="json"), "value": value, "value_re": value.real, "value_im": value.imag}
    ctx.add_value(name, "kloosterman", document)
    ctx.result.timings[name] = runtime_ns / 1e9
    ctx.result.payload.update(
        {"value_re": value.real, "value_im": value.imag, "method": query.method.value, "runtime_ns": runtime_ns}
    )
    ctx.add_table(
        name, ["c", "pm", "method", "value_re", "value_im"], [[prm.c, prm.pm, query.method.value, *_complex_cells(value)]]
    )


def _run_verify(ctx: _Context) -> None:
    from hkv.identities.suite import run_suite

    prm = validate_params(VerifyParams, ctx.config.params, "verify")
    reports = run_suite(
        prm.suite, prm.p, prm.beta, prm.n, tolerance=ctx.config.tolerances.identity, seed=ctx.config.seed, method=prm.method
    )
    rows = []
    for report in reports:
        ctx.add_check(_slug("identity", report.identity_id, f"p{prm.p}", f"b{prm.beta}", f"n{prm.n}"), report)
        rows.append(
            [report.identity_id, report.status, report.cases_checked, report.max_abs_residual, report.max_scaled_residual]
        )
    ctx.result.payload["identities"] = {r.identity_id: r.status for r in reports}
    ctx.add_table(
        _slug("identity_suite", f"p{prm.p}", f"b{prm.beta}", f"n{prm.n}"),
        ["identity", "status", "cases_checked", "max_abs_residual", "max_scaled_residual"],
        rows,
    )


def _run_kernel(ctx: _Context) -> None:
    from hkv.analytic.gamma import GammaData
    from hkv.analytic.kernels import (
        CutoffFunction,
        GaussianLogWeight,
        KernelKind,
        TestFunctionK,
        evaluate_kernel,
        phi_u_closed_form,
        v1_closed_form,
    )

    prm = validate_params(KernelParams, ctx.config.params, "kernel")
    quad = ctx.config.quadrature
    gamma = GammaData(n=len(prm.mu), mu=tuple(prm.mu)) if prm.mu else GammaData.trivial(prm.n)
    kernel = CutoffFunction(
        kind=prm.kind,
        gamma=gamma,
        k=TestFunctionK.for_gamma(gamma, quad.kernel_width),
        delta=prm.delta,
        u=prm.u,
        p=prm.p,
        f=prm.f,
        weight=GaussianLogWeight(prm.center),
    )
    y = np.asarray(prm.y, dtype=np.float64)
    out = evaluate_kernel(
        kernel,
        y,
        sigma=prm.sigma if prm.sigma is not None else quad.sigma,
        T=prm.T if prm.T is not None else quad.T,
        h=quad.h,
        tail_tol=quad.tail_tol,
        abscissa=quad.abscissa,
    )
    rows = []
    for yi, value, tail, sigma, height in zip(y, out.values, out.tail_bounds, out.sigmas, out.heights):
        rows.append([float(yi), *_complex_cells(value), float(tail), float(sigma), float(height)])
    name = _slug("kernel", kernel.kind.value)
    document = {"kernel": kernel.to_dict(), "y": y, "values": out.values, "tail_bounds": out.tail_bounds}
    ctx.add_value(name, "kernel_values", document)
    first = complex(out.values[0])
    ctx.result.payload.update(
        {
            "value_re": first.real,
            "value_im": first.imag,
            "tail_bound": float(out.tail_bounds[0]),
            "values": [{"y": r[0], "re": r[1], "im": r[2], "tail_bound": r[3]} for r in rows],
        }
    )
    ctx.add_table(name, ["y", "value_re", "value_im", "tail_bound", "sigma", "T"], rows)

    # 高斯代理 k 下 V₁ 与 Φ_u 有闭式，顺带做一次两侧检查。
    # / V₁ and Φ_u have closed forms under the Gaussian surrogate; check them.
    closed = None
    if gamma.is_trivial and kernel.kind is KernelKind.V1:
        closed = v1_closed_form(y, quad.kernel_width)
    elif gamma.is_trivial and kernel.kind is KernelKind.PHI_U:
        closed = phi_u_closed_form(y, prm.delta, prm.u, prm.p, quad.kernel_width)
    if closed is not None:
        closed = np.asarray(closed, dtype=np.complex128)
        worst = int(np.argmax(np.abs(out.values - closed)))
        report = VerificationReport(
            check_id=f"{kernel.kind.value}_closed_form",
            params={"kind": kernel.kind.value, "y": float(y[worst]), "delta": prm.delta, "u": prm.u, "p": prm.p},
            lhs=complex(out.values[worst]),
            rhs=complex(closed[worst]),
            tolerance=ctx.config.tolerances.kernel,
            error_bar=ErrorBar().add("tail", float(out.tail_bounds[worst])),
            scale=max(1.0, abs(complex(closed[worst]))),
        )
        ctx.add_check(_slug(name, "closed_form"), report)


def _run_ldata(ctx: _Context) -> None:
    from hkv.ldata.datum import coeff_range, datum_from_spec, molteni_check
    from hkv.ldata.twisted import twisted_L

    prm = validate_params(LdataParams, ctx.config.params, "ldata")
    datum = datum_from_spec(prm.components)
    coeffs = coeff_range(datum, prm.coeffs)
    holds, ratio = molteni_check(datum, prm.coeffs)
    document: Dict[str, Any] = {
        "datum": datum.to_dict(),
        "coefficients": [complex(a) for a in coeffs[1:]],
        "coefficient_bound": {"holds": holds, "worst_ratio": ratio},
    }
    if prm.L is not None:
        L = twisted_L(datum, None, prm.L, prm.mode, max_terms=ctx.config.truncations.max_terms)
        document["L"] = {"s": prm.L, **L.to_dict()}
    name = _slug("ldata", datum.spec().replace(":", "-").replace(",", "_"))
    ctx.add_value(name, "ldata", document)
    ctx.result.payload.update(to_jsonable(document))
    ctx.add_table(name, ["m", "a_re", "a_im"], [[m, *_complex_cells(coeffs[m])] for m in range(1, prm.coeffs + 1)])


def _run_series(ctx: _Context) -> None:
    from hkv.arith.modulus import PrimePowerModulus
    from hkv.ldata.datum import datum_from_spec
    from hkv.series.families import FamilyParams, SeriesQuery, eval_series
    from hkv.series.functional import check_id, verify_functional_identity

    prm = validate_params(SeriesParams, ctx.config.params, "series")
    params = FamilyParams(datum_from_spec(prm.components), PrimePowerModulus(prm.p, prm.beta), prm.h, prm.n)
    name = _slug("series", prm.family.value, f"p{prm.p}", f"b{prm.beta}", f"h{prm.h}")
    if prm.verify:
        report = verify_functional_identity(
            prm.family,
            params,
            prm.s_left,
            prm.s,
            tolerance=ctx.config.tolerances.series,
            progression_mode=prm.progression_mode,
        )
        ctx.add_check(_slug(name, report.check_id), report)
        ctx.result.payload["check_id"] = report.check_id
        ctx.result.payload["relative_residual"] = report.relative_residual
        ctx.add_table(_slug(name, "terms"), ["term", "re", "im"], _term_rows(report, report.diagnostics["right_terms"]))
        return
    value = eval_series(
        SeriesQuery(
            prm.family,
            params,
            prm.s,
            side=prm.side,
            progression_mode=prm.progression_mode,
            M=prm.M,
            tol=ctx.config.truncations.tail_target,
        )
    )
    document = {"check_id": check_id(prm.family, params), "params": params.to_dict(), "s": prm.s, **value.to_dict()}
    ctx.add_value(_slug(name, prm.side.value), "series_value", document)
    ctx.result.payload.update({"value_re": value.value.real, "value_im": value.value.imag, "error": value.error})
    ctx.add_table(
        _slug(name, prm.side.value),
        ["side", "mode", "value_re", "value_im", "error"],
        [[value.side, value.mode, *_complex_cells(value.value), value.error]],
    )


def _run_average(ctx: _Context) -> None:
    from hkv.arith.modulus import PrimePowerModulus
    from hkv.ldata.datum import datum_from_spec
    from hkv.voronoi.moments import (
        MomentQuery,
        moment_decomposition,
        moment_direct_value,
        moment_recursion,
        vsfts_u_sweep,
    )

    prm = validate_params(AverageParams, ctx.config.params, "average")
    query = MomentQuery(
        datum_from_spec(prm.components),
        PrimePowerModulus(prm.p, prm.beta),
        prm.delta,
        prm.u,
        width=ctx.config.quadrature.kernel_width,
        allow_prime=prm.allow_prime,
    )
    tol = ctx.config.tolerances.moment
    name = _slug("average", prm.mode, f"p{prm.p}", f"b{prm.beta}", f"u{prm.u}")

    if prm.mode == "direct":
        value, bar = moment_direct_value(query, cache_dir=ctx.cache_dir)
        ctx.add_value(name, "moment_direct", {"params": query.to_dict(), "value": value, "bar": bar})
        ctx.result.payload.update({"value_re": value.real, "value_im": value.imag, "bar": bar})
        ctx.add_table(name, ["term", "re", "im"], [["X_beta", *_complex_cells(value)]])
        return

    if prm.mode == "decompose":
        direct, direct_bar = moment_direct_value(query, cache_dir=ctx.cache_dir)
        decomposition = moment_decomposition(query, route=prm.route)
        report = VerificationReport(
            check_id="X1+X2",
            params=query.to_dict(),
            lhs=direct,
            rhs=decomposition.total,
            tolerance=tol,
            error_bar=ErrorBar().add("direct", direct_bar).add("X1", decomposition.X1_bar).add("X2", decomposition.X2_bar),
            diagnostics={"decomposition": decomposition.to_dict()},
        )
        ctx.add_check(name, report)
        ctx.result.payload.update({"X1": decomposition.X1, "X2": decomposition.X2, "route": decomposition.route})
        ctx.add_table(name, ["term", "re", "im"], _term_rows(report, {"X1": decomposition.X1, "X2": decomposition.X2}))
        return

    report = moment_recursion(query, tolerance=tol, route=prm.route, cache_dir=ctx.cache_dir)
    ctx.add_check(name, report)
    ctx.result.payload.update({"worst_route": report.diagnostics["worst_route"], "relative_residual": report.relative_residual})
    ctx.add_table(name, ["term", "re", "im"], _term_rows(report, report.diagnostics["routes"]))
    if prm.u_sweep:
        try:
            sweep = vsfts_u_sweep(query, cache_dir=ctx.cache_dir)
        except SalieUnavailable as exc:
            logger.info("u sweep skipped: %s", exc.message)
            ctx.result.payload["u_sweep"] = {"skipped": exc.message}
            return
        values = list(sweep["values"].values())
        base = values[0]
        far = max(values, key=lambda v: abs(v - base))
        sweep_report = VerificationReport(
            check_id="VSFts_u_invariance",
            params=query.to_dict(),
            lhs=base,
            rhs=far,
            tolerance=tol,
            error_bar=ErrorBar(dict(sweep["bars"])),
            diagnostics=sweep,
        )
        ctx.add_check(_slug("average", "u_sweep", f"p{prm.p}", f"b{prm.beta}"), sweep_report)
        ctx.result.payload["u_sweep"] = {"spread": sweep["spread"], "passed": sweep_report.passed}


def _run_voronoi(ctx: _Context) -> None:
    from hkv.arith.modulus import PrimePowerModulus
    from hkv.ldata.datum import datum_from_spec
    from hkv.series.families import FamilyParams
    from hkv.voronoi.summation import VoronoiWeight, voronoi_check

    prm = validate_params(VoronoiParams, ctx.config.params, "voronoi")
    params = FamilyParams(datum_from_spec(prm.components), PrimePowerModulus(prm.p, prm.beta), prm.h, prm.n)
    kind = prm.weight or VoronoiWeight.default_for(prm.theorem).kind
    weight = VoronoiWeight(
        kind=kind, center=prm.center, delta=prm.delta, u=prm.u, width=ctx.config.quadrature.kernel_width
    )
    report = voronoi_check(prm.theorem, params, weight, tolerance=ctx.config.tolerances.voronoi, literal=prm.literal)
    name = _slug("voronoi", prm.theorem.value, f"p{prm.p}", f"b{prm.beta}", f"h{prm.h}")
    ctx.add_check(name, report)
    ctx.result.payload.update({"check_id": report.check_id, "relative_residual": report.relative_residual})
    ctx.add_table(name, ["term", "re", "im"], _term_rows(report, report.diagnostics["right_terms"]))


def _run_bench(ctx: _Context) -> None:
    from hkv.arith.kloosterman import KloostermanMethod, time_method
    from hkv.arith.modulus import PrimePowerModulus

    prm = validate_params(BenchParams, ctx.config.params, "bench")
    rows: List[Sequence[Any]] = []
    timing_rows: List[Dict[str, Any]] = []
    for beta in prm.sweep():
        modulus = PrimePowerModulus(prm.p, beta)
        values: Dict[str, complex] = {}
        skipped: Dict[str, str] = {}
        for method in prm.methods:
            method = KloostermanMethod(method)
            if method is KloostermanMethod.SALIE:
                try:
                    _ensure_salie(prm.p, beta, prm.n, ctx)
                except (SalieUnavailable, NoConventionMatches) as exc:
                    skipped[method.value] = exc.message
                    continue
            value, elapsed_ns = time_method(prm.n, prm.c, modulus, method)
            values[method.value] = value
            key = f"bench_kl_p{prm.p}_b{beta}_n{prm.n}_{method.value}"
            ctx.result.timings[key] = elapsed_ns / 1e9
            timing_rows.append({"beta": beta, "method": method.value, "runtime_ns": elapsed_ns})
            rows.append([beta, method.value, *_complex_cells(value)])
        if not values:
            continue
        # 各方法两两一致，以 p^{β(n−1)/2} 为单位。 / Methods agree in units of p^{β(n−1)/2}.
        reference_name = next(iter(values))
        reference = values[reference_name]
        worst = max(values, key=lambda m: abs(values[m] - reference))
        report = VerificationReport(
            check_id="kl_methods",
            params={"p": prm.p, "beta": beta, "n": prm.n, "c": prm.c, "reference": reference_name, "worst": worst},
            lhs=reference,
            rhs=values[worst],
            tolerance=ctx.config.tolerances.kloosterman,
            scale=float(prm.p) ** (beta * (prm.n - 1) / 2.0),
            diagnostics={"values": values, "skipped": skipped},
        )
        ctx.add_check(_slug("bench_kl", f"p{prm.p}", f"b{beta}", f"n{prm.n}"), report)
    ctx.result.payload["timings"] = timing_rows
    ctx.add_table(_slug("bench_kl", f"p{prm.p}", f"n{prm.n}"), ["beta", "method", "value_re", "value_im"], rows)


_COMMANDS: Dict[Command, Callable[[_Context], None]] = {
    Command.KL: _run_kl,
    Command.VERIFY: _run_verify,
    Command.KERNEL: _run_kernel,
    Command.LDATA: _run_ldata,
    Command.SERIES: _run_series,
    Command.AVERAGE: _run_average,
    Command.VORONOI: _run_voronoi,
    Command.BENCH: _run_bench,
}


# -----------------------------------------------------------------------------
# 入口 / Entry point
# -----------------------------------------------------------------------------
def _persist(result: RunResult, config: RunConfig, recorder: ReportRecorder) -> None:
    """报告写入串行进行。 / Report writing is serialized."""
    config_path = atomic_write_text(recorder.output_dir / CONFIG_FILE_NAME, config.to_yaml())
    recorder.written.append(config_path)
    for record in result.records:
        record.path = recorder.write_json(record.name, record.report, kind=record.kind)
    if config.output_format is OutputFormat.CSV:
        for table in result.tables:
            recorder.write_csv(table.name, table.header, table.rows)
    for name, seconds in result.timings.items():
        recorder.record_timing(name, seconds)
    timings_path = recorder.flush_timings()
    result.written = list(recorder.written) + ([timings_path] if timings_path else [])


def run(config: RunConfig, *, raise_on_failure: bool = False, persist: bool = True) -> RunResult:
    """执行一次运行。 / Execute one run.

    返回 RunResult；exit_code 为 0 当且仅当全部检查通过。
    raise_on_failure=True 时失败抛 CheckFailed（extra 含失败报告路径）。
    / Returns a RunResult whose exit_code is 0 iff every check passed; with
      raise_on_failure a failing run raises CheckFailed listing the report paths.
    """
    command = Command(config.command)
    result = RunResult(command=command.value)
    ctx = _Context(config=config, cache_dir=resolve_cache_dir(config.cache_dir), result=result)
    logger.info("run %s with params %s", command.value, config.params)

    start = time.perf_counter()
    try:
        _COMMANDS[command](ctx)
    finally:
        result.timings.setdefault(f"{command.value}_total", time.perf_counter() - start)

    if persist:
        recorder = ReportRecorder(resolve_output_dir(config.output_dir))
        result.output_dir = recorder.output_dir
        _persist(result, config, recorder)

    failing = result.failing
    for record in failing:
        logger.warning("check %s failed (report %s)", record.name, record.path)
    if failing and raise_on_failure:
        paths = [str(record.path) for record in failing]
        raise CheckFailed(
            f"{len(failing)} of {len(result.records)} check(s) failed",
            extra={"failing_reports": paths},
        )
    return result


def replay(path: str | Path, **kwargs: Any) -> RunResult:
    """按落盘的 RunConfig 重跑。 / Re-run a persisted RunConfig."""
    return run(RunConfig.from_yaml(path), **kwargs)


__all__ = ["CONFIG_FILE_NAME", "CheckRecord", "CsvTable", "RunResult", "replay", "run"]
