import math

import numpy as np
import pytest

from hkv.errors import InvalidArgument, TrivialCharacter
from hkv.ldata.datum import (
    character_from_spec,
    coeff_range,
    datum_from_dict,
    datum_from_spec,
    isobaric_character_data,
    molteni_check,
    parse_components,
)


class TestCoefficients:
    def test_degree_one_datum(self):
        xi = character_from_spec(7, 2)
        a = coeff_range(isobaric_character_data([xi]), 50)
        m = np.arange(1, 51)
        assert np.allclose(a[1:], xi(m))

    def test_two_term_convolution(self):
        d = datum_from_spec("5:2,5:2")
        assert abs(coeff_range(d, 10)[2] - (-2)) < 1e-14

    def test_multiplicativity(self):
        d = datum_from_spec("7:2,13:4")
        a = coeff_range(d, 500)
        for x, y in [(2, 3), (4, 9), (5, 7), (8, 25), (11, 13)]:
            assert abs(a[x * y] - a[x] * a[y]) < 1e-12
        assert a[1] == 1

    def test_bounded_by_divisor_function(self):
        d = datum_from_spec("7:2,13:4,5:2")
        ok, ratio = molteni_check(d, 20_000)
        assert ok and ratio <= 1.0

    def test_dual_round_trip(self):
        d = datum_from_spec("7:2,13:4")
        assert d.dual().dual() == d
        assert np.max(np.abs(coeff_range(d.dual().dual(), 300) - coeff_range(d, 300))) < 1e-15
        assert np.allclose(coeff_range(d.dual(), 300), np.conj(coeff_range(d, 300)))


class TestDatum:
    def test_arithmetic_data(self):
        d = datum_from_spec("7:2,13:4")
        assert d.n == 2 and d.N == 91
        assert abs(abs(d.W) - 1) < 1e-12
        assert d.gamma.is_trivial
        assert abs(d.omega(3) - character_from_spec(7, 2)(3) * character_from_spec(13, 4)(3)) < 1e-15

    def test_dual_root_number(self):
        d = datum_from_spec("7:2,13:4")
        assert abs(d.dual().W - d.W.conjugate()) < 1e-12

    def test_euler_factor(self):
        d = datum_from_spec("7:2,13:4")
        e = d.euler_factor(5)
        assert len(e.roots) == 2
        assert abs(e.eps_bar(2.0) - np.conj(e.eps(2.0))) < 1e-15
        with pytest.raises(InvalidArgument):
            d.euler_factor(7)

    def test_rejects_odd_component(self):
        with pytest.raises(InvalidArgument):
            datum_from_spec("7:1")

    def test_rejects_trivial_component(self):
        with pytest.raises(TrivialCharacter):
            datum_from_spec("7:0")

    def test_document_round_trip(self):
        d = datum_from_spec("7:2,13:4")
        doc = d.to_dict()
        assert doc["schema"] == 1 and doc["N"] == 91
        assert datum_from_dict(doc) == d

    @pytest.mark.parametrize("text", ["7", "12:1", "7:x", ""])
    def test_parse_errors(self, text):
        with pytest.raises(InvalidArgument):
            parse_components(text)

    def test_parse(self):
        comps = parse_components("7:2, 13:4")
        assert [c.q for c in comps] == [7, 13]
        assert [c.index for c in comps] == [2, 4]
        assert math.prod(c.q for c in comps) == 91
