import cmath
import math

import numpy as np
import pytest

from hkv.arith.characters import (
    CharacterFilter,
    DirichletCharacter,
    character_sum_over,
    character_table,
    gauss_sum,
    gauss_sum_table,
    list_characters,
)
from hkv.arith.modulus import PrimePowerModulus, build_unit_group
from hkv.errors import InvalidArgument, ModulusOverflow, NotCyclic


class TestPrimePowerModulus:
    def test_fields(self):
        m = PrimePowerModulus(5, 4)
        assert m.modulus == 625
        assert m.alpha == 2
        assert m.phi == 500
        assert m.phi_star == 400

    def test_alpha_absent_for_odd_beta(self):
        assert PrimePowerModulus(5, 3).alpha is None

    def test_p_two_is_not_cyclic(self):
        with pytest.raises(NotCyclic):
            PrimePowerModulus(2, 3)

    def test_composite_rejected(self):
        with pytest.raises(InvalidArgument):
            PrimePowerModulus(9, 1)

    def test_overflow(self):
        with pytest.raises(ModulusOverflow):
            PrimePowerModulus(3, 40)


class TestUnitGroup:
    @pytest.mark.parametrize(
        "p,beta,generator,order",
        [(5, 1, 2, 4), (5, 2, 2, 20), (3, 1, 2, 2)],
    )
    def test_examples(self, p, beta, generator, order):
        group = build_unit_group(PrimePowerModulus(p, beta))
        assert group.generator == generator
        assert group.order == order

    @pytest.mark.parametrize("p,beta", [(3, 4), (5, 3), (7, 4), (11, 2)])
    def test_generator_half_order_is_minus_one(self, p, beta):
        group = build_unit_group(PrimePowerModulus(p, beta))
        assert pow(group.generator, group.order // 2, group.q) == group.q - 1
        assert len(set(group.powers.tolist())) == group.order

    def test_dlog_on_random_units(self):
        group = build_unit_group(PrimePowerModulus(7, 4))
        rng = np.random.default_rng(0x5EED)
        units = rng.choice(group.powers, size=10_000)
        for u in units[:200].tolist():
            assert pow(group.generator, group.log(u), group.q) == u
        assert np.array_equal(group.powers[group.dlog[units]], units)

    def test_dlog_negative_on_non_units(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        assert group.dlog[0] == -1
        assert group.dlog[10] == -1
        assert not group.is_unit(15)

    def test_inverse_table(self):
        group = build_unit_group(PrimePowerModulus(5, 3))
        inv = group.inverse_table()
        for x in group.powers.tolist():
            assert x * int(inv[x]) % group.q == 1

    def test_unit_mask(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        mask = group.unit_mask()
        assert mask.sum() == 20
        assert not mask[0] and not mask[10] and mask[7]

    def test_pm_indicator(self):
        group = build_unit_group(PrimePowerModulus(7, 1))
        assert np.array_equal(np.flatnonzero(group.pm_indicator(9)), [2, 5])


class TestCharacters:
    def test_counts(self):
        group = build_unit_group(PrimePowerModulus(5, 3))
        assert len(list_characters(group, CharacterFilter.PRIMITIVE)) == 80
        assert len(list_characters(group, CharacterFilter.PRIMITIVE_EVEN)) == 40
        assert len(list_characters(group)) == 100

    def test_beta_one_primitive_even(self):
        group = build_unit_group(PrimePowerModulus(5, 1))
        chars = list_characters(group, "primitive_even")
        assert len(chars) == 1
        assert chars[0].index == 2

    def test_flags_and_values(self):
        group = build_unit_group(PrimePowerModulus(7, 2))
        for chi in list_characters(group):
            values = chi.values()
            assert values[0] == 0
            assert values[7] == 0
            assert np.allclose(np.abs(values[group.powers]), 1.0)
            assert (abs(chi(group.q - 1) - 1) < 1e-12) == chi.even
            assert chi.primitive == (chi.conductor == group.q)

    def test_conj_and_mul(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        chi = DirichletCharacter(group, 3)
        assert (chi * chi.conj()).is_trivial
        assert abs(chi(2) * chi.conj()(2) - 1) < 1e-14

    def test_character_table_matches_values(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        table = character_table(group, [1, 4, 7])
        assert np.allclose(table[1], DirichletCharacter(group, 4).values())

    def test_character_sum_over_orthogonality(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        total = character_sum_over(group, range(group.order))
        assert abs(total[1] - group.order) < 1e-10
        assert np.allclose(np.delete(total, 1), 0.0, atol=1e-9)


class TestGaussSums:
    def test_quadratic_mod_5(self):
        group = build_unit_group(PrimePowerModulus(5, 1))
        chi = DirichletCharacter(group, 2)
        assert abs(gauss_sum(chi) - math.sqrt(5)) < 1e-12

    def test_trivial_mod_5(self):
        group = build_unit_group(PrimePowerModulus(5, 1))
        assert abs(gauss_sum(DirichletCharacter(group, 0)) + 1) < 1e-12

    def test_primitive_mod_25_modulus(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        for chi in list_characters(group, "primitive"):
            assert abs(abs(gauss_sum(chi)) ** 2 - 25) < 1e-10

    def test_all_primitive_mod_125(self):
        group = build_unit_group(PrimePowerModulus(5, 3))
        table = gauss_sum_table(group)
        for chi in list_characters(group, "primitive"):
            assert abs(abs(table[chi.index]) ** 2 - 125) < 1e-8

    def test_table_matches_direct_sum(self):
        group = build_unit_group(PrimePowerModulus(7, 2))
        table = gauss_sum_table(group)
        for t in (1, 5, 14, 21):
            assert abs(table[t] - gauss_sum(DirichletCharacter(group, t))) < 1e-10

    def test_even_conjugation(self):
        group = build_unit_group(PrimePowerModulus(7, 2))
        table = gauss_sum_table(group)
        for chi in list_characters(group, "primitive_even"):
            assert abs(table[chi.conj().index] - table[chi.index].conjugate()) < 1e-10

    def test_direct_definition(self):
        group = build_unit_group(PrimePowerModulus(5, 2))
        chi = DirichletCharacter(group, 3)
        direct = sum(chi(a) * cmath.exp(2j * math.pi * a / 25) for a in range(25))
        assert abs(gauss_sum(chi) - direct) < 1e-12
