import mpmath
import numpy as np
import pytest

from hkv.analytic.gamma import F_ratio, GammaData
from hkv.arith.characters import gauss_sum
from hkv.errors import PoleHit, TrivialCharacter
from hkv.ldata.datum import character_from_spec
from hkv.ldata.hurwitz import dirichlet_L, hurwitz_zeta, periodic_series


class TestHurwitzZeta:
    @pytest.mark.parametrize("s", [2.0, 0.3 + 0.2j, -0.7 + 0.4j, 1.7 - 25j, 0.5 + 30j])
    def test_against_mpmath(self, s):
        a = np.array([0.1, 0.5, 1.0])
        values, bound = hurwitz_zeta(s, a)
        assert bound < 1e-12
        for ai, v in zip(a, values):
            reference = complex(mpmath.zeta(s, ai))
            assert abs(v - reference) < 1e-11 * max(1.0, abs(reference))

    def test_pole(self):
        with pytest.raises(PoleHit):
            hurwitz_zeta(1.0, 0.5)


class TestDirichletL:
    def test_quadratic_mod_5_against_series(self):
        xi = character_from_spec(5, 2)
        m = np.arange(1, 100_001)
        direct = np.sum(xi(m) / m.astype(float) ** 2)
        assert abs(dirichlet_L(xi, 2.0) - direct) < 1e-9

    def test_against_mpmath(self):
        xi = character_from_spec(7, 2)
        chi = [complex(xi(r)) for r in range(7)]
        s = 0.3 + 0.2j
        assert abs(dirichlet_L(xi, s) - complex(mpmath.dirichlet(s, chi))) < 1e-10

    @pytest.mark.parametrize("spec", [(5, 2), (7, 2), (13, 4)])
    def test_even_functional_equation(self, spec):
        xi = character_from_spec(*spec)
        s = 0.3 + 0.2j
        q = xi.q
        rhs = q ** (-s) * gauss_sum(xi) * F_ratio(s, GammaData(n=1)) * dirichlet_L(xi.conj(), 1 - s)
        assert abs(dirichlet_L(xi, s) - rhs) < 1e-9

    def test_real_character_conjugation(self):
        xi = character_from_spec(5, 2)
        s = 0.4 + 3j
        assert abs(dirichlet_L(xi, s.conjugate()) - dirichlet_L(xi, s).conjugate()) < 1e-12

    def test_trivial_character(self):
        with pytest.raises(TrivialCharacter):
            dirichlet_L(character_from_spec(7, 0), 2.0)

    def test_periodic_series_bar(self):
        xi = character_from_spec(13, 4)
        value, bar = periodic_series(xi.values(), -0.5 + 0.4j)
        assert np.isfinite(abs(value))
        assert bar < 1e-10
