"""级数族与函数恒等式。 / Series families and their functional identities."""

from hkv.series.families import (
    FamilyParams,
    LeftRoute,
    SeriesFamily,
    SeriesQuery,
    SeriesValue,
    Side,
    base_weights,
    character_decomposition,
    eval_series,
    left_weights,
)
from hkv.series.functional import (
    check_id,
    derived_reading,
    dual_class_weights,
    even_functional_equation_chain,
    literal_readings,
    right_side,
    verify_functional_identity,
)

__all__ = [
    "FamilyParams",
    "LeftRoute",
    "SeriesFamily",
    "SeriesQuery",
    "SeriesValue",
    "Side",
    "base_weights",
    "character_decomposition",
    "check_id",
    "derived_reading",
    "dual_class_weights",
    "eval_series",
    "even_functional_equation_chain",
    "left_weights",
    "literal_readings",
    "right_side",
    "verify_functional_identity",
]
