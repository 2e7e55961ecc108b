"""Voronoi 求和公式与矩。 / Voronoi summation formulas and moments."""

from hkv.voronoi.moments import (
    MomentDecomposition,
    MomentQuery,
    X2Route,
    moment_decomposition,
    moment_direct,
    moment_direct_value,
    moment_recursion,
    vsfts_u_sweep,
)
from hkv.voronoi.summation import (
    Theorem,
    VoronoiWeight,
    WeightKind,
    residue_block_from_characters,
    voronoi_check,
)
from hkv.voronoi.twisted_sum import TwistedSumDecomposition, twisted_sum_voronoi

__all__ = [
    "MomentDecomposition",
    "MomentQuery",
    "Theorem",
    "TwistedSumDecomposition",
    "VoronoiWeight",
    "WeightKind",
    "X2Route",
    "moment_decomposition",
    "moment_direct",
    "moment_direct_value",
    "moment_recursion",
    "residue_block_from_characters",
    "twisted_sum_voronoi",
    "voronoi_check",
    "vsfts_u_sweep",
]
