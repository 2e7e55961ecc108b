"""Γ 因子比、竖直线求积与截断核。 / Gamma ratios, line quadrature and cutoff kernels."""

from hkv.analytic.gamma import F_ratio, Fbar_ratio, GammaData, log_F_ratio, log_gamma, stirling_majorant
from hkv.analytic.kernels import (
    CutoffFunction,
    GaussianLogWeight,
    KernelKind,
    TestFunctionK,
    decay_profile,
    eval_cutoff,
    evaluate_kernel,
)
from hkv.analytic.quadrature import LineIntegral

__all__ = [
    "CutoffFunction",
    "F_ratio",
    "Fbar_ratio",
    "GammaData",
    "GaussianLogWeight",
    "KernelKind",
    "LineIntegral",
    "TestFunctionK",
    "decay_profile",
    "eval_cutoff",
    "evaluate_kernel",
    "log_F_ratio",
    "log_gamma",
    "stirling_majorant",
]
