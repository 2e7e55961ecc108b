import math

import numpy as np
import pytest
from scipy import special

from hkv.errors import InvalidArgument
from hkv.numerics.powers import complex_power
from hkv.numerics.sieve import dirichlet_convolve, divisor_table, smallest_prime_factor
from hkv.numerics.summation import ArrayAccumulator, ComplexAccumulator, cdot, csum, csum_rows, rsum
from hkv.numerics.tails import dn_tail, dn_tail_exact, dn_tail_majorant, weighted_tail_bound


class TestSummation:
    def test_csum_cancellation(self):
        values = [1e16, 1.0, -1e16, 1j]
        assert csum(values) == complex(1.0, 1.0)

    def test_rsum_matches_fsum(self):
        values = np.random.default_rng(1).normal(size=1000)
        assert rsum(values) == math.fsum(values.tolist())

    def test_accumulator_keeps_small_terms(self):
        acc = ComplexAccumulator(1e16)
        for _ in range(10):
            acc += 1.0
        acc.add(-1e16)
        assert acc.value == 10.0
        assert acc.count == 12

    def test_accumulator_arrays(self):
        acc = ComplexAccumulator()
        acc.add_array(np.full(100, 0.1 + 0.2j))
        assert abs(acc.value - (10 + 20j)) < 1e-13
        assert acc.count == 100

    def test_array_accumulator(self):
        acc = ArrayAccumulator(3)
        acc.add(np.array([1e16, 1.0, 0.0]))
        acc.add(np.array([1.0, 1e-16, 1j]))
        acc.add(np.array([-1e16, 0.0, 0.0]))
        assert np.allclose(acc.value, [1.0, 1.0 + 1e-16, 1j], rtol=0, atol=1e-15)

    def test_csum_rows_cancellation(self):
        matrix = np.array([[1e16, 1.0], [1.0, 1j], [-1e16, 2.0]])
        assert np.array_equal(csum_rows(matrix), [1.0, 3.0 + 1j])

    def test_cdot_cancellation(self):
        v = np.array([1e16, 1.0, -1e16])
        table = np.ones((3, 2))
        assert np.array_equal(cdot(v, table), [1.0, 1.0])

    def test_csum_rows_empty(self):
        assert np.array_equal(csum_rows(np.zeros((0, 4))), np.zeros(4))


class TestComplexPower:
    def test_matches_builtin_power(self):
        assert abs(complex_power(5.0, 0.3 - 1.2j) - 5.0 ** (0.3 - 1.2j)) < 1e-14

    def test_real_exponent(self):
        assert complex_power(4.0, 0.5) == pytest.approx(2.0)

    def test_rejects_non_positive_base(self):
        with pytest.raises(InvalidArgument):
            complex_power(0.0, 1.0)


class TestSieve:
    def test_divisor_function(self):
        d2 = divisor_table(30, 2)
        assert d2[1] == 1 and d2[12] == 6 and d2[30] == 8
        d3 = divisor_table(30, 3)
        assert d3[4] == 6 and d3[12] == 18

    def test_convolve_matches_bruteforce(self):
        rng = np.random.default_rng(3)
        f = rng.normal(size=61)
        g = rng.normal(size=61) + 1j * rng.normal(size=61)
        f[0] = g[0] = 0
        out = dirichlet_convolve(f, g)
        for m in (1, 12, 36, 60):
            direct = sum(f[d] * g[m // d] for d in range(1, m + 1) if m % d == 0)
            assert abs(out[m] - direct) < 1e-12

    def test_table_is_read_only(self):
        with pytest.raises(ValueError):
            divisor_table(10, 2)[3] = 0

    def test_smallest_prime_factor(self):
        spf = smallest_prime_factor(50)
        assert spf[49] == 7 and spf[47] == 47 and spf[12] == 2


class TestTails:
    def test_majorant_dominates_exact(self):
        for n in (1, 2, 3):
            exact, _ = dn_tail_exact(10_000, 2.5, n)
            assert 0 < exact <= dn_tail_majorant(10_000, 2.5, n)

    def test_exact_tail_n1(self):
        exact, rounding = dn_tail_exact(1000, 2.0, 1)
        reference = float(special.zeta(2.0, 1001.0))
        assert abs(exact - reference) < 1e-12 + rounding

    def test_dn_tail_picks_smaller(self):
        assert dn_tail(1000, 3.0, 2) <= dn_tail_majorant(1000, 3.0, 2)

    def test_divergent_sigma(self):
        assert dn_tail_majorant(100, 1.0, 2) == math.inf

    def test_weighted_tail_for_gaussian_weight(self):
        def weight(y):
            return np.exp(-np.log(y / 50.0) ** 2)

        bound = weighted_tail_bound(weight, 50_000, 2)
        direct = float(np.sum(divisor_table(2_000_000, 2)[50_001:] * weight(np.arange(50_001, 2_000_001))))
        assert direct <= bound
        assert bound < 1e-6
