# params.py
# =============================================================================
# 各命令参数的校验模型。RunConfig.params 是自由映射，这里按命令收紧。
# / Per-command parameter models; RunConfig.params is a free mapping and is
#   narrowed here, one model per command.
#
# 复数接受 "re,im" 字符串、[re, im] 列表或实数。
# / Complex values accept "re,im" strings, [re, im] pairs or plain reals.
# =============================================================================

from __future__ import annotations

from typing import Annotated, Any, List, Literal, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, WithJsonSchema

from hkv.analytic.kernels import KernelKind
from hkv.arith.kloosterman import KloostermanMethod
from hkv.errors import ConfigInvalid, InvalidArgument
from hkv.ldata.progression import ProgressionMode
from hkv.ldata.twisted import LMode
from hkv.series.families import SeriesFamily, Side
from hkv.voronoi.moments import X2Route
from hkv.voronoi.summation import Theorem, WeightKind

DEFAULT_DATUM = "7:2,13:4"


def parse_complex(value: Any) -> complex:
    """"re,im"、[re, im]、实数或 complex → complex。 / Parse the accepted complex spellings."""
    if isinstance(value, complex):
        return value
    if isinstance(value, bool):
        raise InvalidArgument(f"not a complex number: {value!r}")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, Mapping) and {"re", "im"} <= set(value):
        return complex(float(value["re"]), float(value["im"]))
    if isinstance(value, str):
        parts = [part.strip() for part in value.split(",")]
        try:
            if len(parts) == 1:
                return complex(parts[0].replace("i", "j").replace(" ", ""))
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            pass
    raise InvalidArgument(f"cannot parse complex value {value!r}; expected 're,im'")


def parse_float_list(value: Any) -> list[float]:
    if value is None or value == "":
        return []
    if isinstance(value, str):
        try:
            return [float(part) for part in value.split(",") if part.strip()]
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse number list {value!r}") from exc
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(part) for part in value]


def parse_int_list(value: Any) -> list[int]:
    return [int(v) for v in parse_float_list(value)]


ComplexValue = Annotated[
    complex,
    BeforeValidator(parse_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
    WithJsonSchema({"type": "array", "items": {"type": "number"}}),
]
FloatList = Annotated[List[float], BeforeValidator(parse_float_list)]
IntList = Annotated[List[int], BeforeValidator(parse_int_list)]


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)


class KlParams(_Params):
    p: int = Field(ge=3)
    beta: int = Field(default=1, ge=1)
    n: int = Field(default=2, ge=1)
    c: int = 1
    method: KloostermanMethod = KloostermanMethod.FFT_DP
    pm: bool = False


class VerifyParams(_Params):
    suite: str = "all"
    p: int = Field(ge=3)
    beta: int = Field(default=1, ge=1)
    n: int = Field(default=2, ge=1)
    method: KloostermanMethod = KloostermanMethod.FFT_DP


class KernelParams(_Params):
    kind: KernelKind
    y: FloatList = Field(min_length=1)
    delta: ComplexValue = complex(0.6, 0.3)
    u: float = 0.5
    p: int = 5
    f: float = Field(default=1.0, gt=0)
    mu: FloatList = Field(default_factory=list)
    n: int = Field(default=1, ge=1)
    center: float = Field(default=50.0, gt=0)
    sigma: Optional[float] = None
    T: Optional[float] = Field(default=None, gt=0)


class LdataParams(_Params):
    components: str = DEFAULT_DATUM
    coeffs: int = Field(default=20, ge=1)
    L: Optional[ComplexValue] = None
    mode: LMode = LMode.PRODUCT


class SeriesParams(_Params):
    family: SeriesFamily
    components: str = DEFAULT_DATUM
    p: int = Field(ge=3)
    beta: int = Field(default=1, ge=1)
    h: int = 1
    n: Optional[int] = Field(default=None, ge=1)
    s: ComplexValue = complex(-0.7, 0.4)
    side: Side = Side.LEFT
    M: Optional[int] = Field(default=None, ge=1)
    verify: bool = False
    s_left: ComplexValue = complex(2.0, 0.0)
    progression_mode: ProgressionMode = ProgressionMode.HURWITZ


class AverageParams(_Params):
    mode: Literal["direct", "decompose", "recursion"]
    components: str = DEFAULT_DATUM
    p: int = Field(default=5, ge=3)
    beta: int = Field(default=4, ge=1)
    delta: ComplexValue = complex(0.6, 0.3)
    u: float = 1.5
    route: X2Route = X2Route.AUTO
    u_sweep: bool = False
    allow_prime: bool = False


class VoronoiParams(_Params):
    theorem: Theorem
    components: str = DEFAULT_DATUM
    p: int = Field(default=3, ge=3)
    beta: int = Field(default=2, ge=1)
    h: int = 1
    n: Optional[int] = Field(default=None, ge=1)
    weight: Optional[WeightKind] = None
    center: float = Field(default=50.0, gt=0)
    delta: ComplexValue = complex(0.6, 0.3)
    u: float = 0.5
    literal: bool = True


class BenchParams(_Params):
    target: Literal["kl"] = "kl"
    p: int = Field(default=11, ge=3)
    beta: int = Field(default=4, ge=1)
    betas: IntList = Field(default_factory=list)
    n: int = Field(default=3, ge=1)
    c: int = 1
    methods: List[KloostermanMethod] = Field(default_factory=lambda: list(KloostermanMethod))

    def sweep(self) -> list[int]:
        """显式 betas 优先，否则 1..beta。 / Explicit betas first, else 1..beta."""
        return sorted(set(self.betas)) if self.betas else list(range(1, self.beta + 1))


P = TypeVar("P", bound=_Params)


def validate_params(model: Type[P], params: Mapping[str, Any], command: str) -> P:
    try:
        return model.model_validate(dict(params))
    except ValidationError as exc:
        errors = [
            f"{'.'.join(str(part) for part in err.get('loc', ())) or '<root>'}: {err.get('msg', '')}"
            for err in exc.errors()
        ]
        raise ConfigInvalid(f"invalid parameters for '{command}': {'; '.join(errors)}", extra={"errors": errors}) from exc


__all__ = [
    "AverageParams",
    "BenchParams",
    "ComplexValue",
    "DEFAULT_DATUM",
    "KernelParams",
    "KlParams",
    "LdataParams",
    "SeriesParams",
    "VerifyParams",
    "VoronoiParams",
    "parse_complex",
    "parse_float_list",
    "validate_params",
]
