# powers.py
# =============================================================================
# 正实底数的复指数幂 base^z = exp(z log base)。
# / Complex powers of a positive real base.
# =============================================================================

from __future__ import annotations

import math

import numpy as np

from hkv.errors import InvalidArgument


def complex_power(base: float, exponent: complex) -> complex:
    if base <= 0:
        raise InvalidArgument(f"complex_power needs a positive base, got {base}")
    return complex(np.exp(complex(exponent) * math.log(base)))


__all__ = ["complex_power"]
