"""L 函数数据与 L 值。 / L-function data and L-values."""

from hkv.ldata.datum import (
    EulerFactorP,
    LData,
    coeff_range,
    datum_from_spec,
    isobaric_character_data,
    molteni_check,
    parse_components,
)
from hkv.ldata.hurwitz import dirichlet_L, hurwitz_zeta, periodic_series
from hkv.ldata.progression import ClassSeries, ProgressionMode, class_series_for, progression_sum
from hkv.ldata.twisted import LMode, LValue, functional_equation_residual, twisted_L, twisted_L_values

IsobaricCharacterData = isobaric_character_data

__all__ = [
    "ClassSeries",
    "EulerFactorP",
    "IsobaricCharacterData",
    "LData",
    "LMode",
    "LValue",
    "ProgressionMode",
    "class_series_for",
    "coeff_range",
    "datum_from_spec",
    "dirichlet_L",
    "functional_equation_residual",
    "hurwitz_zeta",
    "isobaric_character_data",
    "molteni_check",
    "parse_components",
    "periodic_series",
    "progression_sum",
    "twisted_L",
    "twisted_L_values",
]
