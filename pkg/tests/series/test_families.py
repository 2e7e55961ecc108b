import numpy as np
import pytest

from hkv.arith.modulus import PrimePowerModulus
from hkv.errors import IdentityViolated, InvalidArgument, ModeUnavailable, SideIllegalAtS, TailBoundExceedsTolerance
from hkv.ldata.datum import character_from_spec, datum_from_spec
from hkv.series import (
    FamilyParams,
    SeriesFamily,
    SeriesQuery,
    base_weights,
    eval_series,
    even_functional_equation_chain,
    verify_functional_identity,
)
from hkv.series.families import left_smoothness

CUBIC_7 = "7:2"  # 模 7 的偶三次特征 / even cubic character mod 7


def params(spec, p, beta, h=2, n=None):
    return FamilyParams(datum_from_spec(spec), PrimePowerModulus(p, beta), h, n)


class TestLeftSide:
    def test_raw_matches_characters_gl1(self):
        prm = params(CUBIC_7, 5, 2, n=2)
        raw = eval_series(SeriesQuery("hk_gl1", prm, 2.0, route="raw", tol=None))
        chars = eval_series(SeriesQuery("hk_gl1", prm, 2.0, route="characters"))
        assert abs(raw.value - chars.value) < 1e-8

    def test_additive_twist_decomposition(self):
        prm = params(CUBIC_7, 5, 2, h=3)
        raw = eval_series(SeriesQuery("additive_D", prm, 2.0, route="raw", tol=None))
        chars = eval_series(SeriesQuery("additive_D", prm, 2.0, route="characters"))
        assert abs(raw.value - chars.value) < 1e-8

    def test_progression_matches_characters_off_the_half_plane(self):
        prm = params("7:2,13:4", 5, 2)
        s = complex(0.3, 2.0)
        prog = eval_series(SeriesQuery("hk_gln", prm, s, route="progression"))
        chars = eval_series(SeriesQuery("hk_gln", prm, s, route="characters"))
        assert abs(prog.value - chars.value) < 1e-8 * max(1.0, abs(chars.value))

    def test_prime_modulus_carries_trivial_character(self):
        prm = params("11:2", 7, 1, n=2)
        chars = eval_series(SeriesQuery("hk_gl1", prm, 2.5, route="characters"))
        prog = eval_series(SeriesQuery("hk_gl1", prm, 2.5, route="progression"))
        assert "trivial_character_term" in chars.details
        assert abs(chars.value - prog.value) < 1e-10

    def test_raw_illegal_left_of_one(self):
        with pytest.raises(SideIllegalAtS):
            eval_series(SeriesQuery("additive_D", params(CUBIC_7, 5, 2), 0.5, route="raw"))

    @pytest.mark.parametrize("family,n", [("additive_D", None), ("hk_gln", None), ("hk_gl1", 2), ("hk_gl1_base", None)])
    def test_h_sign_symmetry(self, family, n):
        s = complex(1.5, 0.5)
        plus = eval_series(SeriesQuery(family, params(CUBIC_7, 5, 2, h=2, n=n), s, route="progression"))
        minus = eval_series(SeriesQuery(family, params(CUBIC_7, 5, 2, h=-2, n=n), s, route="progression"))
        assert abs(plus.value - minus.value) < 1e-12 * max(1.0, abs(plus.value))

    def test_continuation_is_smooth(self):
        prm = params(CUBIC_7, 5, 2, n=2)
        s = complex(-0.5, 0.4)
        coarse = left_smoothness("hk_gl1", prm, s, step=1e-4)
        fine = left_smoothness("hk_gl1", prm, s, step=1e-5)
        assert np.isfinite(coarse)
        assert abs(coarse - fine) < 1e-3 * max(1.0, fine)


class TestBaseCase:
    def test_weights_prime_power(self):
        w = base_weights(PrimePowerModulus(5, 2), 1)
        assert w[1] == w[24] == 1.0
        assert all(w[u] == pytest.approx(-0.2) for u in (4, 6, 9, 11, 14, 16, 19, 21))
        assert w[2] == 0.0
        assert w[5] == 0.0

    def test_weights_prime(self):
        w = base_weights(PrimePowerModulus(7, 1), 1)
        assert w[1] == w[6] == 1.0
        assert all(w[u] == pytest.approx(-0.5) for u in (2, 3, 4, 5))
        assert w[0] == 0.0

    @pytest.mark.parametrize("p,beta", [(5, 2), (7, 1)])
    def test_raw_matches_progression(self, p, beta):
        prm = params("11:2" if p == 7 else CUBIC_7, p, beta, h=1)
        raw = eval_series(SeriesQuery("hk_gl1_base", prm, 2.0, route="raw", tol=None))
        prog = eval_series(SeriesQuery("hk_gl1_base", prm, 2.0))
        assert prog.mode == "progression"
        assert abs(raw.value - prog.value) < 1e-8

    def test_no_character_route_or_right_side(self):
        prm = params(CUBIC_7, 5, 2)
        with pytest.raises(ModeUnavailable):
            eval_series(SeriesQuery("hk_gl1_base", prm, 2.0, route="characters"))
        with pytest.raises(ModeUnavailable):
            eval_series(SeriesQuery("hk_gl1_base", prm, -0.5, side="right"))

    def test_prime_three_rejected(self):
        with pytest.raises(InvalidArgument):
            SeriesQuery("hk_gl1_base", params(CUBIC_7, 3, 1, h=1), 2.0)


class TestFunctionalIdentities:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("beta", [2, 3])
    def test_gl1_prime_power(self, n, beta):
        report = verify_functional_identity(
            SeriesFamily.HK_GL1, params(CUBIC_7, 5, beta, n=n), s_right=complex(-0.7, 0.4), check_left_paths=False
        )
        assert report.check_id == "D_A(i)"
        assert report.relative_residual < 1e-6, report.to_dict()
        assert "D_A(i)" in report.literal

    def test_gln_prime_power(self):
        report = verify_functional_identity("hk_gln", params("7:2,13:4", 5, 2), s_right=complex(-0.5, 0.4))
        assert report.check_id == "DAFI_A(i)"
        assert report.relative_residual < 1e-5, report.to_dict()
        assert report.diagnostics["also_covers"] == "AFIhK"
        paths = report.diagnostics["left_paths"]
        assert paths["abs_diff"] < 1e-6 * max(1.0, abs(paths["characters"]))

    def test_additive_prime(self):
        report = verify_functional_identity("additive_D", params("11:2,13:4", 7, 1), check_left_paths=False)
        assert report.check_id == "AFI(ii)"
        assert report.relative_residual < 1e-5, report.to_dict()
        assert report.literal["AFI(ii)"] is not None

    def test_additive_prime_power(self):
        report = verify_functional_identity("additive_D", params("7:2,13:4", 5, 3), check_left_paths=False)
        assert report.check_id == "AFI(i)"
        assert report.passed, report.to_dict()
        assert report.literal == {}

    def test_gln_prime(self):
        report = verify_functional_identity(
            "hk_gln", params("7:2,13:4", 5, 1), s_right=complex(-0.5, -0.4), check_left_paths=False
        )
        assert report.check_id == "DAFI_A(ii)"
        assert report.passed, report.to_dict()
        assert "partial_L" in report.diagnostics["right_terms"]

    @pytest.mark.parametrize("n", [1, 2])
    def test_gl1_prime(self, n):
        report = verify_functional_identity("hk_gl1", params(CUBIC_7, 5, 1, n=n), check_left_paths=False)
        assert report.check_id == "D_A(ii)"
        assert report.passed, report.to_dict()

    def test_gl1_degree_one_twist(self):
        report = verify_functional_identity("hk_gl1", params(CUBIC_7, 5, 2, n=1), check_left_paths=False)
        assert report.passed, report.to_dict()

    def test_direct_right_side_agrees(self):
        prm = params(CUBIC_7, 5, 2, n=2)
        s = complex(-0.7, 0.4)
        hurwitz = eval_series(SeriesQuery("hk_gl1", prm, s, side="right"))
        direct = eval_series(
            SeriesQuery("hk_gl1", prm, s, side="right", progression_mode="direct", M=200_000, tol=None)
        )
        assert abs(direct.value - hurwitz.value) < 1e-4 * abs(hurwitz.value)

    def test_direct_right_side_cap_raises(self):
        prm = params(CUBIC_7, 5, 2, n=2)
        query = SeriesQuery("hk_gl1", prm, complex(-0.7, 0.4), side="right", progression_mode="direct", M=1000)
        with pytest.raises(TailBoundExceedsTolerance) as info:
            eval_series(query)
        assert info.value.extra["M"] == 1000

    def test_right_side_illegal(self):
        with pytest.raises(SideIllegalAtS):
            eval_series(SeriesQuery("additive_D", params(CUBIC_7, 5, 2), 0.5, side="right"))
        with pytest.raises(SideIllegalAtS):
            verify_functional_identity("additive_D", params(CUBIC_7, 5, 2), s_right=0.2)

    def test_prime_three_rejected(self):
        with pytest.raises(InvalidArgument):
            verify_functional_identity("additive_D", params(CUBIC_7, 3, 1, h=1))

    def test_violation_raises_with_report(self):
        with pytest.raises(IdentityViolated) as info:
            verify_functional_identity(
                "additive_D", params(CUBIC_7, 5, 2), tolerance=1e-30, check_left_paths=False, raise_on_failure=True
            )
        assert info.value.extra["report"]["check_id"] == "AFI(i)"

    def test_gl1_needs_degree_one(self):
        with pytest.raises(InvalidArgument):
            verify_functional_identity("hk_gl1", params("7:2,13:4", 5, 2, n=2))


class TestFunctionalEquationChain:
    @pytest.mark.parametrize("s", [complex(0.3, 0.7), complex(-0.6, 0.2), complex(1.8, -1.0)])
    def test_chain_recovers_input(self, s):
        xi = character_from_spec(7, 2)
        chain = even_functional_equation_chain(xi, params(CUBIC_7, 5, 2), s)
        scale = max(1.0, abs(chain["direct"]))
        assert abs(chain["once"] - chain["direct"]) < 1e-8 * scale
        assert abs(chain["twice"] - chain["direct"]) < 1e-8 * scale
