from __future__ import annotations

import json
import logging
import os
import platform as runtime_platform
import sys
from dataclasses import dataclass
from typing import Annotated, Any, Optional

import click
import typer
from dotenv import load_dotenv
from rich.console import Console, Group
from rich.table import Table
from typer.core import TyperCommand, TyperGroup

from hkv.analytic.kernels import KernelKind
from hkv.arith.kloosterman import KloostermanMethod
from hkv.config import Command, OutputFormat, RunConfig
from hkv.engine.recorder import to_jsonable
from hkv.engine.runner import RunResult, run
from hkv.errors import (
    CONFIG_INVALID,
    LIFT_CONVENTION_UNCALIBRATED,
    NO_CONVENTION_MATCHES,
    SALIE_UNAVAILABLE,
    SIDE_ILLEGAL_AT_S,
    TAIL_BOUND_EXCEEDS_TOLERANCE,
    USAGE_ERROR_CODES,
    HkvError,
)
from hkv.ldata.progression import ProgressionMode
from hkv.ldata.twisted import LMode
from hkv.series.families import SeriesFamily, Side
from hkv.version import get_version
from hkv.voronoi.moments import X2Route
from hkv.voronoi.summation import Theorem, WeightKind


logger = logging.getLogger(__name__)
console = Console()


class _ChineseHelpMixin:
    """统一中文化 --help 选项。 / Localize the built-in help option to Chinese."""

    _HELP_TEXT = "显示帮助并退出。"

    def get_help_option(self, ctx):  # type: ignore[override]
        help_options = self.get_help_option_names(ctx)
        if not help_options or not self.add_help_option:
            return None

        def show_help(current_ctx: click.Context, param: click.Parameter, value: bool) -> None:
            if value and not current_ctx.resilient_parsing:
                click.echo(current_ctx.get_help(), color=current_ctx.color)
                current_ctx.exit()

        return click.Option(
            help_options,
            is_flag=True,
            is_eager=True,
            expose_value=False,
            callback=show_help,
            help=self._HELP_TEXT,
        )


class ChineseHelpCommand(_ChineseHelpMixin, TyperCommand):
    """带中文帮助选项的命令。 / Command with localized help option."""


class ChineseHelpGroup(_ChineseHelpMixin, TyperGroup):
    """带中文帮助选项的命令组。 / Command group with localized help option."""


_HELP_CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"]}

app = typer.Typer(
    cls=ChineseHelpGroup,
    add_completion=False,
    context_settings=_HELP_CONTEXT_SETTINGS,
    pretty_exceptions_enable=False,
    help="hkv 命令行工具：超 Kloosterman 和、Dirichlet 特征、函数恒等式与 Voronoi 求和公式的两侧数值校验。",
    epilog=(
        "常用示例：\n"
        "  hkv kl --p 5 --beta 4 --n 2 --c 3\n"
        "  hkv verify --suite all --p 5 --beta 3 --n 2\n"
        "  hkv voronoi check --theorem VSF_i --p 3 --beta 2\n"
        "  hkv average recursion --json"
    ),
)
series_app = typer.Typer(
    cls=ChineseHelpGroup,
    no_args_is_help=True,
    context_settings=_HELP_CONTEXT_SETTINGS,
    help="级数族 D、𝔎_n、𝔎_n⁰ 的单侧求值与两侧函数恒等式校验。",
    epilog=(
        "示例：\n"
        "  hkv series eval --family hk_gl1 --components 7:2 --p 5 --beta 2 --n 2 --s 2,0\n"
        "  hkv series verify --family hk_gl1 --components 7:2 --p 5 --beta 2 --n 2 --h 2"
    ),
)
average_app = typer.Typer(
    cls=ChineseHelpGroup,
    no_args_is_help=True,
    context_settings=_HELP_CONTEXT_SETTINGS,
    help="本原偶特征上扭曲 L 值一阶矩：直接求值、X1 + X2 分解、三路对照。",
    epilog=(
        "示例：\n"
        "  hkv average direct --p 5 --beta 2 --u 0.5\n"
        "  hkv average decompose --p 5 --beta 3 --u 1.0\n"
        "  hkv average recursion --u-sweep"
    ),
)
voronoi_app = typer.Typer(
    cls=ChineseHelpGroup,
    no_args_is_help=True,
    context_settings=_HELP_CONTEXT_SETTINGS,
    help="Voronoi 求和公式的两侧校验（对数高斯权或 φ_∞ 权）。",
    epilog="示例：\n  hkv voronoi check --theorem D_B_i --components 7:2 --p 5 --beta 2 --n 2",
)
bench_app = typer.Typer(
    cls=ChineseHelpGroup,
    no_args_is_help=True,
    context_settings=_HELP_CONTEXT_SETTINGS,
    help="性能基准：Kloosterman 各算法在 β 扫描上的耗时与一致性。",
    epilog="示例：\n  hkv bench kl --p 11 --beta 4 --n 3",
)
app.add_typer(series_app, name="series")
app.add_typer(average_app, name="average")
app.add_typer(voronoi_app, name="voronoi")
app.add_typer(bench_app, name="bench")


JsonOption = Annotated[
    bool,
    typer.Option("--json", help="以 JSON 输出到标准输出，适合脚本和管道消费。"),
]
QuietOption = Annotated[
    bool,
    typer.Option("--quiet", "-q", help="静默模式。隐藏非关键的人类可读输出，只保留最终结果或错误。"),
]
VerboseOption = Annotated[
    int,
    typer.Option("--verbose", "-v", count=True, help="增加日志详细程度。可重复使用，例如 `-v`、`-vv`。"),
]
EmitOption = Annotated[
    OutputFormat,
    typer.Option("--emit", help="报告格式：`json` 只写 JSON 报告；`csv` 另写逐项 CSV 表。"),
]
OutputDirOption = Annotated[
    Optional[str],
    typer.Option("--output-dir", help="报告目录。未传时读取 `HKV_OUTPUT_DIR`，否则使用 `./hkv_reports`。"),
]
CacheDirOption = Annotated[
    Optional[str],
    typer.Option("--cache-dir", help="缓存目录（Salié 校准、矩缓存）。未传时读取 `HKV_CACHE_DIR`。"),
]
ToleranceOption = Annotated[
    Optional[float],
    typer.Option("--tolerance", help="覆盖该命令的通过容差。"),
]
ComponentsOption = Annotated[
    str,
    typer.Option("--components", help="L 数据分量 `q1:t1,q2:t2`（导子:特征下标）。"),
]
PrimeOption = Annotated[int, typer.Option("--p", help="奇素数 p。")]
BetaOption = Annotated[int, typer.Option("--beta", help="指数 β，模数 q = p^β。")]


class CLIError(Exception):
    """CLI 结构化错误。 / Structured CLI error."""

    def __init__(
        self,
        code: str,
        message: str,
        *,
        exit_code: int = 1,
        fix: str | None = None,
        extra: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.exit_code = exit_code
        self.fix = fix
        self.extra = extra or {}


_FIX_HINTS = {
    CONFIG_INVALID: "用 `hkv <命令> -h` 核对参数名与取值范围。",
    SALIE_UNAVAILABLE: "Salié 方法要求 β 为不小于 4 的偶数且 p ∤ n；改用 `--method fft_dp`。",
    LIFT_CONVENTION_UNCALIBRATED: "先以 `--method salie` 运行一次以完成提升约定校准。",
    NO_CONVENTION_MATCHES: "查看缓存目录中的校准报告；该参数下 Salié 路径保持关闭。",
    SIDE_ILLEGAL_AT_S: "右侧级数要求 Re(s) < 0；改用 `--side left` 或调整 `--s`。",
    TAIL_BOUND_EXCEEDS_TOLERANCE: "增大 `--T` 或放宽容差。",
}


def _cli_error(exc: HkvError) -> CLIError:
    exit_code = 2 if exc.code in USAGE_ERROR_CODES else 1
    return CLIError(exc.code, exc.message, exit_code=exit_code, fix=_FIX_HINTS.get(exc.code), extra=to_jsonable(exc.extra))


class OutputHandler:
    """双通道输出。 / Dual-mode output handler."""

    def __init__(self, json_mode: bool, quiet: bool = False) -> None:
        self.json_mode = json_mode
        self.quiet = quiet

    def success(self, data: dict[str, Any], human_text: Any) -> None:
        if self.json_mode:
            typer.echo(json.dumps({"ok": True, **data}, ensure_ascii=False))
            return
        if human_text is None:
            return
        if isinstance(human_text, (Table, Group)):
            console.print(human_text)
        elif isinstance(human_text, (dict, list)):
            console.print_json(json.dumps(human_text, ensure_ascii=False))
        else:
            console.print(human_text)

    def error(self, exc: CLIError) -> None:
        if self.json_mode:
            payload = {
                "ok": False,
                "exit_code": exc.exit_code,
                "error": {"code": exc.code, "message": exc.message},
            }
            if exc.fix:
                payload["fix"] = exc.fix
            payload.update(exc.extra)
            typer.echo(json.dumps(payload, ensure_ascii=False))
            return
        console.print(f"[red]Error:[/red] {exc.message}")
        if exc.fix:
            console.print(f"[dim]Fix: {exc.fix}[/dim]")
        for key, value in exc.extra.items():
            if key == "report":
                continue
            console.print(f"[dim]{key}: {value}[/dim]")


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        env_level = os.getenv("HKV_LOG_LEVEL", "WARNING").upper()
        level = getattr(logging, env_level, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _handle_cli_error(output: OutputHandler, exc: CLIError) -> None:
    output.error(exc)
    raise typer.Exit(exc.exit_code)


# -----------------------------------------------------------------------------
# 渲染 / Rendering
# -----------------------------------------------------------------------------
def _format_value(value: Any) -> str:
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return f"{value['re']:.12g} {'+' if value['im'] >= 0 else '-'} {abs(value['im']):.12g}i"
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def _render_values_table(payload: dict[str, Any], keys: list[str]) -> Optional[Table]:
    rows = [(key, _format_value(payload[key])) for key in keys if key in payload]
    if not rows:
        return None
    table = Table(title="结果")
    table.add_column("字段")
    table.add_column("值")
    for row in rows:
        table.add_row(*row)
    return table


def _render_checks_table(payload: dict[str, Any]) -> Optional[Table]:
    checks = payload.get("checks") or []
    if not checks:
        return None
    table = Table(title="检查")
    table.add_column("名称")
    table.add_column("状态")
    table.add_column("报告")
    for check in checks:
        passed = check.get("passed")
        status = "-" if passed is None else ("✅" if passed else "❌")
        table.add_row(check["name"], status, str(check.get("path") or ""))
    return table


def _render_bench_table(payload: dict[str, Any]) -> Optional[Table]:
    rows = payload.get("timings") or []
    if not rows:
        return None
    naive = {row["beta"]: row["runtime_ns"] for row in rows if row["method"] == KloostermanMethod.NAIVE.value}
    table = Table(title="Kloosterman 耗时")
    table.add_column("β")
    table.add_column("方法")
    table.add_column("耗时 (ms)")
    table.add_column("相对 naive")
    for row in rows:
        base = naive.get(row["beta"])
        speedup = f"{base / max(row['runtime_ns'], 1):.1f}×" if base else ""
        table.add_row(str(row["beta"]), row["method"], f"{row['runtime_ns'] / 1e6:.3f}", speedup)
    return table


_VALUE_KEYS = [
    "value_re",
    "value_im",
    "method",
    "runtime_ns",
    "tail_bound",
    "error",
    "bar",
    "check_id",
    "relative_residual",
    "worst_route",
    "X1",
    "X2",
    "route",
    "identities",
    "u_sweep",
]


def _render_result(payload: dict[str, Any]) -> Group:
    parts = [
        part
        for part in (
            _render_values_table(payload, _VALUE_KEYS),
            _render_bench_table(payload),
            _render_checks_table(payload),
        )
        if part is not None
    ]
    return Group(*parts)


# -----------------------------------------------------------------------------
# 执行 / Execution
# -----------------------------------------------------------------------------
@dataclass
class _RunOptions:
    json_mode: bool = False
    quiet: bool = False
    verbose: int = 0
    emit: OutputFormat = OutputFormat.JSON
    output_dir: Optional[str] = None
    cache_dir: Optional[str] = None
    tolerance: Optional[float] = None


# 各命令的 --tolerance 覆盖哪一项。 / Which tolerance --tolerance overrides per command.
_TOLERANCE_FIELDS = {
    Command.KL: "kloosterman",
    Command.VERIFY: "identity",
    Command.KERNEL: "kernel",
    Command.LDATA: "series",
    Command.SERIES: "series",
    Command.AVERAGE: "moment",
    Command.VORONOI: "voronoi",
    Command.BENCH: "kloosterman",
}


def _build_config(command: Command, params: dict[str, Any], opts: _RunOptions) -> RunConfig:
    params = {key: value for key, value in params.items() if value is not None}
    config = RunConfig.from_env(
        command,
        params,
        output_format=opts.emit,
        output_dir=opts.output_dir,
        cache_dir=opts.cache_dir,
    )
    if opts.tolerance is not None:
        field_name = _TOLERANCE_FIELDS[command]
        tolerances = config.tolerances.model_copy(update={field_name: opts.tolerance})
        config = RunConfig.validated({**config.model_dump(), "tolerances": tolerances.model_dump()})
    return config


def _emit_result(output: OutputHandler, result: RunResult) -> None:
    payload = result.to_dict()
    payload["ok"] = result.passed
    output.success(payload, None if output.quiet else _render_result(payload))
    if not result.passed:
        if not output.json_mode:
            failing = ", ".join(str(record.path) for record in result.failing)
            console.print(f"[red]检查未通过 / checks failed:[/red] {failing}")
        raise typer.Exit(result.exit_code)


def _execute(command: Command, params: dict[str, Any], opts: _RunOptions) -> None:
    output = OutputHandler(opts.json_mode, opts.quiet)
    _configure_logging(opts.verbose, opts.quiet)
    try:
        config = _build_config(command, params, opts)
        result = run(config)
    except HkvError as exc:
        _handle_cli_error(output, _cli_error(exc))
        return
    _emit_result(output, result)


@app.callback(invoke_without_command=True)
def _root(ctx: typer.Context) -> None:
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
        raise typer.Exit(2)


# -----------------------------------------------------------------------------
# 命令 / Commands
# -----------------------------------------------------------------------------
@app.command(
    cls=ChineseHelpCommand,
    help="计算超 Kloosterman 和 Kl_n(c, p^β)；`--pm` 给出对称和 Kl_n(c) + Kl_n(−c)。",
    short_help="计算 Kloosterman 和",
    epilog="示例：\n  hkv kl --p 5 --beta 4 --n 2 --c 3\n  hkv kl --p 5 --beta 4 --n 2 --c 1 --method salie --json",
)
def kl(
    p: PrimeOption,
    n: Annotated[int, typer.Option("--n", help="维数 n。")],
    beta: BetaOption = 1,
    c: Annotated[int, typer.Option("--c", help="与 p 互素的类 c。")] = 1,
    method: Annotated[KloostermanMethod, typer.Option("--method", help="naive、dp、fft_dp 或 salie。")] = KloostermanMethod.FFT_DP,
    pm: Annotated[bool, typer.Option("--pm", help="计算 Kl_n(c) + Kl_n(−c)。")] = False,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    cache_dir: CacheDirOption = None,
) -> None:
    params = {"p": p, "beta": beta, "n": n, "c": c, "method": method.value, "pm": pm}
    _execute(Command.KL, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir, cache_dir))


@app.command(
    cls=ChineseHelpCommand,
    help="有限恒等式套件（QO、SOGS、lcAC、gauss_twist、hK2、hKsum）的穷举或抽样校验。全部通过时退出码为 0。",
    short_help="校验有限恒等式",
    epilog="示例：\n  hkv verify --suite all --p 5 --beta 3 --n 2\n  hkv verify --suite qo,hk2 --p 7 --beta 2 --json",
)
def verify(
    p: PrimeOption,
    suite: Annotated[str, typer.Option("--suite", help="qo|sogs|lcac|gausstwist|hk2|hksum|all，可用逗号组合。")] = "all",
    beta: BetaOption = 1,
    n: Annotated[int, typer.Option("--n", help="维数 n。")] = 2,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    cache_dir: CacheDirOption = None,
    tolerance: ToleranceOption = None,
) -> None:
    params = {"suite": suite, "p": p, "beta": beta, "n": n}
    _execute(Command.VERIFY, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir, cache_dir, tolerance))


@app.command(
    cls=ChineseHelpCommand,
    help="在竖直线上求截断核 V₁、V₂、Φ_u、Φ̃_u、φ_∞ 与 Voronoi 核的值，附截断误差上界。",
    short_help="求截断核的值",
    epilog="示例：\n  hkv kernel --kind V1 --y 0.001,10\n  hkv kernel --kind Phi_u --y 1 --delta 0.6,0.3 --u 1.5 --p 5",
)
def kernel(
    kind: Annotated[KernelKind, typer.Option("--kind", help="核的种类。")],
    y: Annotated[str, typer.Option("--y", help="求值点，逗号分隔。")],
    delta: Annotated[Optional[str], typer.Option("--delta", help="δ，写作 `re,im`。")] = None,
    u: Annotated[Optional[float], typer.Option("--u", help="不平衡指数 u。")] = None,
    p: Annotated[Optional[int], typer.Option("--p", help="素数 p（Φ_u 的 p^u 与欧拉因子）。")] = None,
    f: Annotated[Optional[float], typer.Option("--f", help="φ_∞ 的长度 f。")] = None,
    mu: Annotated[Optional[str], typer.Option("--mu", help="阿基米德参数 μ_j，逗号分隔。")] = None,
    sigma: Annotated[Optional[float], typer.Option("--sigma", help="积分线横坐标；缺省按鞍点选择。")] = None,
    T: Annotated[Optional[float], typer.Option("--T", help="积分截断高度。")] = None,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    tolerance: ToleranceOption = None,
) -> None:
    params = {"kind": kind.value, "y": y, "delta": delta, "u": u, "p": p, "f": f, "mu": mu, "sigma": sigma, "T": T}
    _execute(Command.KERNEL, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir, None, tolerance))


@app.command(
    cls=ChineseHelpCommand,
    help="构造同构特征 L 数据，输出系数、系数上界检查与可选的 L 值（附误差条）。",
    short_help="查看 L 数据与 L 值",
    epilog="示例：\n  hkv ldata --components 7:2,13:4 --coeffs 30\n  hkv ldata --components 7:2 --L 2,0 --json",
)
def ldata(
    components: ComponentsOption = "7:2,13:4",
    coeffs: Annotated[int, typer.Option("--coeffs", help="输出前 M 个系数。")] = 20,
    L: Annotated[Optional[str], typer.Option("--L", help="求 L(s, π)，写作 `re,im`。")] = None,
    mode: Annotated[LMode, typer.Option("--mode", help="L 值的求法。")] = LMode.PRODUCT,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
) -> None:
    params = {"components": components, "coeffs": coeffs, "L": L, "mode": mode.value}
    _execute(Command.LDATA, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir))


FamilyOption = Annotated[SeriesFamily, typer.Option("--family", help="级数族。")]
HOption = Annotated[int, typer.Option("--h", help="与 p 互素的类 h。")]
TwistOption = Annotated[Optional[int], typer.Option("--n", help="GL₁ 族的扭曲指数 n。")]
ProgressionOption = Annotated[
    ProgressionMode, typer.Option("--progression-mode", help="右侧级数：hurwitz（加速）或 direct（直接截断）。")
]


@series_app.command(
    "eval",
    cls=ChineseHelpCommand,
    help="在 s 处求一侧的值：左侧经特征分解延拓，右侧为收敛的剩余类级数（要求 Re s < 0）。",
    short_help="单侧求值",
)
def series_eval(
    family: FamilyOption,
    p: PrimeOption,
    components: ComponentsOption = "7:2,13:4",
    beta: BetaOption = 1,
    h: HOption = 1,
    n: TwistOption = None,
    s: Annotated[str, typer.Option("--s", help="s，写作 `re,im`。")] = "-0.7,0.4",
    side: Annotated[Side, typer.Option("--side", help="left 或 right。")] = Side.LEFT,
    M: Annotated[Optional[int], typer.Option("--M", help="直接截断的最大项数。")] = None,
    progression_mode: ProgressionOption = ProgressionMode.HURWITZ,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
) -> None:
    params = {
        "family": family.value,
        "components": components,
        "p": p,
        "beta": beta,
        "h": h,
        "n": n,
        "s": s,
        "side": side.value,
        "M": M,
        "progression_mode": progression_mode.value,
    }
    _execute(Command.SERIES, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir))


@series_app.command(
    "verify",
    cls=ChineseHelpCommand,
    help="两侧函数恒等式校验：s_right（Re < 0）处比较两侧，s_left 处比较左侧两条路径。",
    short_help="两侧校验",
)
def series_verify(
    family: FamilyOption,
    p: PrimeOption,
    components: ComponentsOption = "7:2,13:4",
    beta: BetaOption = 1,
    h: HOption = 1,
    n: TwistOption = None,
    s: Annotated[str, typer.Option("--s", help="右侧求值点 s_right。")] = "-0.7,0.4",
    s_left: Annotated[str, typer.Option("--s-left", help="左侧两路径对照点。")] = "2,0",
    progression_mode: ProgressionOption = ProgressionMode.HURWITZ,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    tolerance: ToleranceOption = None,
) -> None:
    params = {
        "family": family.value,
        "components": components,
        "p": p,
        "beta": beta,
        "h": h,
        "n": n,
        "s": s,
        "s_left": s_left,
        "verify": True,
        "progression_mode": progression_mode.value,
    }
    _execute(Command.SERIES, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir, None, tolerance))


AveragePrimeOption = Annotated[int, typer.Option("--p", help="奇素数 p。")]
DeltaOption = Annotated[str, typer.Option("--delta", help="δ，写作 `re,im`，0 < Re δ < 1。")]
UOption = Annotated[float, typer.Option("--u", help="Z = p^u，0 < u < β − 1。")]


def _average(
    mode: str,
    components: str,
    p: int,
    beta: int,
    delta: str,
    u: float,
    extra: dict[str, Any],
    opts: _RunOptions,
) -> None:
    params = {"mode": mode, "components": components, "p": p, "beta": beta, "delta": delta, "u": u, **extra}
    _execute(Command.AVERAGE, params, opts)


@average_app.command("direct", cls=ChineseHelpCommand, help="逐个本原偶特征求 L(δ, π⊗χ) 得 X_β。", short_help="直接求值")
def average_direct(
    components: ComponentsOption = "7:2,13:4",
    p: AveragePrimeOption = 5,
    beta: BetaOption = 4,
    delta: DeltaOption = "0.6,0.3",
    u: UOption = 1.5,
    allow_prime: Annotated[bool, typer.Option("--allow-prime", help="允许 β = 1。")] = False,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    cache_dir: CacheDirOption = None,
) -> None:
    opts = _RunOptions(json_mode, quiet, verbose, emit, output_dir, cache_dir)
    _average("direct", components, p, beta, delta, u, {"allow_prime": allow_prime}, opts)


@average_app.command(
    "decompose", cls=ChineseHelpCommand, help="X_β = X1 + X2，对照直接值。", short_help="X1 + X2 分解"
)
def average_decompose(
    components: ComponentsOption = "7:2,13:4",
    p: AveragePrimeOption = 5,
    beta: BetaOption = 4,
    delta: DeltaOption = "0.6,0.3",
    u: UOption = 1.5,
    route: Annotated[X2Route, typer.Option("--route", help="X2 的求法：mellin、direct 或 auto。")] = X2Route.AUTO,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    cache_dir: CacheDirOption = None,
    tolerance: ToleranceOption = None,
) -> None:
    opts = _RunOptions(json_mode, quiet, verbose, emit, output_dir, cache_dir, tolerance)
    _average("decompose", components, p, beta, delta, u, {"route": route.value}, opts)


@average_app.command(
    "recursion",
    cls=ChineseHelpCommand,
    help="直接值对照 X1 + X2、VSFK 与 VSFts 三条路径；`--u-sweep` 另查 VSFts 对 u 的不变性。",
    short_help="三路对照",
)
def average_recursion(
    components: ComponentsOption = "7:2,13:4",
    p: AveragePrimeOption = 5,
    beta: BetaOption = 4,
    delta: DeltaOption = "0.6,0.3",
    u: UOption = 1.5,
    route: Annotated[X2Route, typer.Option("--route", help="X2 的求法：mellin、direct 或 auto。")] = X2Route.AUTO,
    u_sweep: Annotated[bool, typer.Option("--u-sweep", help="u ∈ {1.0, 1.5, 2.0} 上的不变性。")] = False,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    cache_dir: CacheDirOption = None,
    tolerance: ToleranceOption = None,
) -> None:
    opts = _RunOptions(json_mode, quiet, verbose, emit, output_dir, cache_dir, tolerance)
    _average("recursion", components, p, beta, delta, u, {"route": route.value, "u_sweep": u_sweep}, opts)


@voronoi_app.command(
    "check",
    cls=ChineseHelpCommand,
    help="Voronoi 求和公式两侧校验；权函数缺省随定理而定（VSF2、VSFK 用 φ_∞，其余用对数高斯）。",
    short_help="两侧校验",
)
def voronoi_check(
    theorem: Annotated[Theorem, typer.Option("--theorem", help="定理与分支，例如 VSF_i、D_B_ii、VSFK。")],
    components: ComponentsOption = "7:2,13:4",
    p: PrimeOption = 3,
    beta: BetaOption = 2,
    h: HOption = 1,
    n: TwistOption = None,
    weight: Annotated[Optional[WeightKind], typer.Option("--weight", help="gaussian_log 或 phi_inf。")] = None,
    center: Annotated[float, typer.Option("--center", help="对数高斯权的中心 y₀。")] = 50.0,
    delta: DeltaOption = "0.6,0.3",
    u: Annotated[float, typer.Option("--u", help="φ_∞ 权的 u。")] = 0.5,
    literal: Annotated[bool, typer.Option("--literal/--no-literal", help="是否同时求原式字面读法。")] = True,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    tolerance: ToleranceOption = None,
) -> None:
    params = {
        "theorem": theorem.value,
        "components": components,
        "p": p,
        "beta": beta,
        "h": h,
        "n": n,
        "weight": weight.value if weight else None,
        "center": center,
        "delta": delta,
        "u": u,
        "literal": literal,
    }
    _execute(Command.VORONOI, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir, None, tolerance))


@bench_app.command(
    "kl",
    cls=ChineseHelpCommand,
    help="在 β = 1..beta（或 `--betas`）上计时 naive、dp、fft_dp 与 salie，并检查各方法一致。耗时写入 timings.json。",
    short_help="Kloosterman 计时",
)
def bench_kl(
    p: PrimeOption = 11,
    beta: BetaOption = 4,
    n: Annotated[int, typer.Option("--n", help="维数 n。")] = 3,
    c: Annotated[int, typer.Option("--c", help="与 p 互素的类 c。")] = 1,
    betas: Annotated[Optional[str], typer.Option("--betas", help="显式 β 列表，逗号分隔。")] = None,
    methods: Annotated[Optional[str], typer.Option("--methods", help="方法列表，逗号分隔。")] = None,
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    emit: EmitOption = OutputFormat.JSON,
    output_dir: OutputDirOption = None,
    cache_dir: CacheDirOption = None,
) -> None:
    params = {
        "target": "kl",
        "p": p,
        "beta": beta,
        "n": n,
        "c": c,
        "betas": betas,
        "methods": [part.strip() for part in methods.split(",") if part.strip()] if methods else None,
    }
    _execute(Command.BENCH, params, _RunOptions(json_mode, quiet, verbose, emit, output_dir, cache_dir))


@app.command(
    "run",
    cls=ChineseHelpCommand,
    help="按 YAML 运行配置执行；每次运行会在报告目录写出 `run_config.yaml`，可原样重放。",
    short_help="按配置文件运行",
    epilog="示例：\n  hkv run --config ./hkv_reports/run_config.yaml",
)
def run_command(
    config: Annotated[str, typer.Option("--config", help="RunConfig YAML 文件路径。")],
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
    verbose: VerboseOption = 0,
    output_dir: OutputDirOption = None,
) -> None:
    output = OutputHandler(json_mode, quiet)
    _configure_logging(verbose, quiet)
    try:
        loaded = RunConfig.from_yaml(config)
        if output_dir:
            loaded = RunConfig.validated({**loaded.model_dump(), "output_dir": output_dir})
        result = run(loaded)
    except HkvError as exc:
        _handle_cli_error(output, _cli_error(exc))
        return
    _emit_result(output, result)


@app.command(
    cls=ChineseHelpCommand,
    help="查看 hkv 自身版本、Python 版本以及当前操作系统/架构信息。",
    short_help="查看版本信息",
    epilog="示例：\n  hkv version\n  hkv version --json",
)
def version(
    json_mode: JsonOption = False,
    quiet: QuietOption = False,
) -> None:
    output = OutputHandler(json_mode, quiet)
    payload = {
        "version": get_version(),
        "python": ".".join(str(part) for part in sys.version_info[:3]),
        "platform": runtime_platform.system().lower(),
        "arch": runtime_platform.machine(),
    }
    output.success(payload, f"hkv {payload['version']}")


def main() -> None:
    load_dotenv(override=False)
    app()


if __name__ == "__main__":
    main()
