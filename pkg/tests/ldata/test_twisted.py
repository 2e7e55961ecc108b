import numpy as np
import pytest

from hkv.arith.characters import DirichletCharacter, character_indices
from hkv.arith.kloosterman import kloosterman_pm_table
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import ModeUnavailable, TailBoundExceedsTolerance
from hkv.ldata.datum import character_from_spec, datum_from_spec, isobaric_character_data
from hkv.ldata.progression import class_series_for, direct_progression_sum, progression_sum
from hkv.ldata.twisted import functional_equation_residual, twisted_L, twisted_L_values


@pytest.fixture(scope="module")
def datum():
    return datum_from_spec("7:2,13:4")


def char(p, beta, t):
    return DirichletCharacter(build_unit_group(PrimePowerModulus(p, beta)), t)


class TestModes:
    def test_series_matches_product(self, datum):
        chi = char(5, 3, 1)
        series = twisted_L(datum, chi, 2.5, "series")
        product = twisted_L(datum, chi, 2.5, "product")
        assert abs(series.value - product.value) < 1e-9
        assert product.error < 1e-11

    def test_afe_matches_product(self, datum):
        chi = char(5, 2, 2)
        delta = 0.6 + 0.3j
        afe = twisted_L(datum, chi, delta, "afe")
        product = twisted_L(datum, chi, delta, "product")
        assert abs(afe.value - product.value) < 1e-6
        assert afe.error < 1e-6

    @pytest.mark.parametrize("u", [0.5, 1.0, 1.5])
    def test_afe_split_point_invariance(self, u):
        d = isobaric_character_data([character_from_spec(7, 2)])
        chi = char(5, 2, 2)
        delta = 0.6 + 0.3j
        reference = twisted_L(d, chi, delta).value
        afe = twisted_L(d, chi, delta, "afe", Z=5.0**u)
        assert abs(afe.value - reference) < 1e-8 + afe.error

    def test_series_mode_gated(self, datum):
        with pytest.raises(ModeUnavailable):
            twisted_L(datum, char(5, 2, 2), 1.1, "series")

    def test_afe_needs_primitive_twist(self, datum):
        with pytest.raises(ModeUnavailable):
            twisted_L(datum, char(5, 2, 5), 0.6, "afe")

    def test_untwisted_product(self, datum):
        value = twisted_L(datum, None, 3.0).value
        expected = twisted_L(datum, None, 3.0, "series").value
        assert abs(value - expected) < 1e-8


class TestBatch:
    def test_batch_matches_single(self, datum):
        m = PrimePowerModulus(5, 2)
        indices = character_indices(build_unit_group(m), "primitive_even")
        values, bars = twisted_L_values(datum, m, indices, 0.6 + 0.3j)
        for t, v in zip(indices[:3], values[:3]):
            single = twisted_L(datum, char(5, 2, int(t)), 0.6 + 0.3j).value
            assert abs(v - single) < 1e-12
        assert np.all(bars < 1e-9)


class TestFunctionalEquation:
    @pytest.mark.parametrize("s", [0.3 + 0.2j, 0.5, 0.1 - 4j, 0.8 + 7j, -0.5 + 0.4j])
    def test_twisted_functional_equation(self, datum, s):
        chi = char(5, 2, 2)
        assert functional_equation_residual(datum, chi, s) < 1e-8

    def test_odd_twist(self, datum):
        chi = char(5, 3, 3)
        # odd twists change the gamma factor; the even form must fail
        assert functional_equation_residual(datum, chi, 0.3 + 0.2j) > 1e-6


class TestProgression:
    def test_euler_factor_removes_p(self, datum):
        p = 5
        for s in (2.0, 0.3 + 2j):
            full = twisted_L(datum, None, s).value
            removed, bar = class_series_for(datum, PrimePowerModulus(p, 1), s).total()
            assert abs(datum.euler_factor(p).eps(s) * full - removed) < 1e-10 + bar

    def test_direct_matches_hurwitz(self, datum):
        m = PrimePowerModulus(5, 2)
        K = kloosterman_pm_table(2, m)
        w = 3.0 + 0.5j
        fast, fast_bar = progression_sum(datum, m, w, K)
        slow, slow_bar, M = direct_progression_sum(datum, m, w, K, tol=1e-8)
        assert M % m.modulus == 0
        assert abs(fast - slow) < fast_bar + slow_bar + 1e-12

    def test_direct_cap_with_large_tail_raises(self):
        datum = datum_from_spec("7:2")
        m = PrimePowerModulus(5, 2)
        with pytest.raises(TailBoundExceedsTolerance) as info:
            direct_progression_sum(datum, m, 1.05, np.ones(25), tol=1e-9, max_terms=1000)
        assert info.value.extra["M"] == 1000
        assert info.value.extra["tail"] >= info.value.extra["tol"] == 1e-9

    def test_direct_without_tol_sums_to_cap(self):
        datum = datum_from_spec("7:2")
        m = PrimePowerModulus(5, 2)
        value, bar, M = direct_progression_sum(datum, m, 1.05, np.ones(25), tol=None, max_terms=1000)
        assert M == 1000
        assert bar > 1e-9
        assert np.isfinite(value)

    def test_character_pairing(self, datum):
        m = PrimePowerModulus(5, 2)
        chi = char(5, 2, 2)
        paired, _ = progression_sum(datum, m, 0.4 + 1j, chi.values())
        assert abs(paired - twisted_L(datum, chi, 0.4 + 1j).value) < 1e-10
