# summation.py
# =============================================================================
# 补偿求和。 / Compensated summation.
#
# csum 对实部、虚部分别做 math.fsum（无误差变换，结果为正确舍入）；
# ComplexAccumulator 为分块累加提供 Neumaier 运行和。
# / csum applies math.fsum to real and imaginary parts separately (error-free
#   transforms, correctly rounded result); ComplexAccumulator keeps a
#   Neumaier running sum for block-wise accumulation.
# =============================================================================

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def csum(values: Iterable[complex] | np.ndarray) -> complex:
    """复数正确舍入求和。 / Correctly rounded complex sum."""
    arr = np.asarray(values, dtype=np.complex128).ravel()
    if arr.size == 0:
        return 0j
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def rsum(values: Iterable[float] | np.ndarray) -> float:
    arr = np.asarray(values, dtype=np.float64).ravel()
    return math.fsum(arr.tolist())


def _two_sum(u: float, v: float) -> tuple[float, float]:
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


class _RealChannel:
    __slots__ = ("_s", "_t")

    def __init__(self) -> None:
        self._s = 0.0
        self._t = 0.0

    def add(self, y: float) -> None:
        s, err = _two_sum(self._s, float(y))
        self._s = s
        self._t += err

    @property
    def value(self) -> float:
        return self._s + self._t


class ComplexAccumulator:
    """复数 Neumaier 累加器。 / Neumaier accumulator for complex values.

    每次 add 的误差项单独保存，value 时再折回主和。数组通过 csum 先做
    一次正确舍入，再作为单个项入账，因此块顺序固定时结果逐位可复现。
    / Each add keeps its rounding error apart and folds it back on read.
    Arrays are first reduced with csum and booked as one term, so with a
    fixed block order the result is bit-reproducible.
    """

    def __init__(self, initial: complex = 0j) -> None:
        self._re = _RealChannel()
        self._im = _RealChannel()
        self.count = 0
        if initial:
            self.add(initial)

    def add(self, value: complex) -> "ComplexAccumulator":
        z = complex(value)
        self._re.add(z.real)
        self._im.add(z.imag)
        self.count += 1
        return self

    def add_array(self, values: Iterable[complex] | np.ndarray) -> "ComplexAccumulator":
        arr = np.asarray(values, dtype=np.complex128).ravel()
        if arr.size:
            self._re.add(math.fsum(arr.real.tolist()))
            self._im.add(math.fsum(arr.imag.tolist()))
            self.count += int(arr.size)
        return self

    def __iadd__(self, value: complex) -> "ComplexAccumulator":
        return self.add(value)

    @property
    def value(self) -> complex:
        return complex(self._re.value, self._im.value)

    def __complex__(self) -> complex:
        return self.value


class ArrayAccumulator:
    """逐元素 Neumaier 累加（复数向量）。 / Element-wise Neumaier accumulation of complex vectors."""

    def __init__(self, size: int) -> None:
        self._s = np.zeros(size, dtype=np.complex128)
        self._c = np.zeros(size, dtype=np.complex128)

    def add(self, values: np.ndarray) -> None:
        self._s, err = _two_sum_vec(self._s, np.asarray(values, dtype=np.complex128))
        self._c += err

    @property
    def value(self) -> np.ndarray:
        return self._s + self._c


def _two_sum_vec(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Knuth two-sum, applied to the real and imaginary parts at once.
    s = a + b
    bp = s - a
    err = (a - (s - bp)) + (b - bp)
    return s, err


def csum_rows(matrix: np.ndarray) -> np.ndarray:
    """沿第 0 轴的补偿成对求和。 / Compensated pairwise sum over axis 0.

    每轮把相邻两行做 two-sum，舍入误差另行累加，最后折回。
    / Each pass two-sums adjacent rows and books the rounding errors apart.
    """
    s = np.array(matrix, dtype=np.complex128, copy=True)
    if s.shape[0] == 0:
        return np.zeros(s.shape[1:], dtype=np.complex128)
    c = np.zeros(s.shape[1:], dtype=np.complex128)
    while s.shape[0] > 1:
        if s.shape[0] % 2:
            s = np.concatenate([s, np.zeros((1,) + s.shape[1:], dtype=np.complex128)])
        s, err = _two_sum_vec(s[0::2], s[1::2])
        c += err.sum(axis=0)
    return s[0] + c


def cdot(v: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """补偿的 v @ matrix。 / Compensated v @ matrix."""
    v = np.asarray(v, dtype=np.complex128)
    return csum_rows(v[:, None] * np.asarray(matrix, dtype=np.complex128))


__all__ = ["ArrayAccumulator", "ComplexAccumulator", "cdot", "csum", "csum_rows", "rsum"]
