"""素数幂模上的精确算术。 / Exact arithmetic modulo odd prime powers."""

from hkv.arith.characters import (
    CharacterFilter,
    CharacterProduct,
    DirichletCharacter,
    character_indices,
    character_sum_over,
    gauss_sum,
    gauss_sum_table,
    list_characters,
)
from hkv.arith.kloosterman import (
    KloostermanMethod,
    KloostermanQuery,
    kloosterman,
    kloosterman_class_at_multiple,
    kloosterman_class_table,
    kloosterman_pm_table,
    kloosterman_table,
    kloosterman_zero_pm_table,
)
from hkv.arith.modulus import PrimePowerModulus, UnitGroup, build_unit_group
from hkv.arith.salie import (
    LiftConvention,
    calibrate_salie_lift,
    nth_roots,
    power_residue_symbol,
    salie_registry,
)

__all__ = [
    "CharacterFilter",
    "CharacterProduct",
    "DirichletCharacter",
    "KloostermanMethod",
    "KloostermanQuery",
    "LiftConvention",
    "PrimePowerModulus",
    "UnitGroup",
    "build_unit_group",
    "calibrate_salie_lift",
    "character_indices",
    "character_sum_over",
    "gauss_sum",
    "gauss_sum_table",
    "kloosterman",
    "kloosterman_class_at_multiple",
    "kloosterman_class_table",
    "kloosterman_pm_table",
    "kloosterman_table",
    "kloosterman_zero_pm_table",
    "list_characters",
    "nth_roots",
    "power_residue_symbol",
    "salie_registry",
]
