import math

import mpmath
import numpy as np
import pytest

from hkv.analytic.gamma import (
    F_ratio,
    Fbar_ratio,
    GammaData,
    log_F_ratio,
    log_gamma,
    log_gamma_reflection,
    stirling_majorant,
)
from hkv.errors import InvalidArgument, PoleAtNonPositiveInteger, PoleHit


class TestLogGamma:
    def test_gamma_one(self):
        assert abs(log_gamma(1.0)) < 1e-15

    def test_gamma_half(self):
        assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14

    def test_recursion_self_test(self):
        s = 3 + 4j
        ratio = np.exp(log_gamma(s + 1) - log_gamma(s)) / s
        assert abs(ratio - 1) < 1e-12

    def test_reflection_agrees_modulo_2pi_i(self):
        s = 0.3 + 2.1j
        diff = log_gamma_reflection(s) - log_gamma(s)
        assert abs(np.exp(diff) - 1) < 1e-12

    def test_against_mpmath(self):
        for s in (0.25 + 0.5j, 7.5 - 3j, 40 + 60j):
            reference = complex(mpmath.loggamma(s))
            assert abs(log_gamma(s) - reference) < 1e-12 * max(1.0, abs(reference))

    @pytest.mark.parametrize("s", [0, -1, -7])
    def test_poles(self, s):
        with pytest.raises(PoleAtNonPositiveInteger):
            log_gamma(s)


class TestGammaRatio:
    def test_symmetric_point_gl1(self):
        assert abs(F_ratio(0.5, GammaData(n=1)) - 1) < 1e-14

    @pytest.mark.parametrize("s", [0.3 + 0.2j, -0.5 + 0.4j, 0.8 - 5j, 2.0 + 1j])
    def test_dual_cancellation(self, s):
        g = GammaData(n=3, mu=(0.1 + 1j, -0.2 - 0.5j, 0.1 - 0.5j))
        assert abs(Fbar_ratio(s, g) * F_ratio(1 - s, g) - 1) < 1e-10

    def test_two_paths(self):
        g = GammaData(n=2, mu=(0, 0))
        direct = F_ratio(2.0, g)
        reflected = F_ratio(2.0, g, path="reflection")
        assert abs(direct - reflected) < 1e-12 * abs(direct)

    def test_log_form_matches(self):
        g = GammaData(n=2)
        s = np.array([0.2 + 1j, -0.7 + 0.4j])
        assert np.allclose(np.exp(log_F_ratio(s, g)), F_ratio(s, g), rtol=1e-12)

    def test_numerator_pole(self):
        with pytest.raises(PoleHit):
            F_ratio(1.0, GammaData(n=1))

    def test_denominator_pole_gives_zero(self):
        assert F_ratio(-2.0, GammaData(n=1)) == 0
        assert np.real(log_F_ratio(np.array([-2.0 + 0j]), GammaData(n=1)))[0] == -np.inf

    def test_sanity_bound(self):
        with pytest.raises(InvalidArgument):
            GammaData(n=2, mu=(0.45, 0))
        with pytest.raises(InvalidArgument):
            GammaData(n=2, mu=(0,))

    def test_stirling_band(self):
        g = GammaData(n=2)
        for t in (10.0, 20.0, 35.0, 50.0):
            s = 0.3 + 1j * t
            ratio = abs(F_ratio(s, g)) / stirling_majorant(s, g)
            assert 0.5 < ratio < 2.0

    def test_gamma_data_properties(self):
        g = GammaData(n=2, mu=(0.1 + 2j, -0.1))
        assert g.mu_bar == (0.1 - 2j, -0.1 + 0j)
        assert g.delta0 == pytest.approx(0.1)
        assert g.dual().dual() == g
        assert GammaData.trivial(3).is_trivial
