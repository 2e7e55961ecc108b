import json
from pathlib import Path

import numpy as np
import pytest

from hkv.arith.kloosterman import KloostermanQuery, kloosterman, kloosterman_table
from hkv.arith.modulus import PrimePowerModulus
from hkv.arith.salie import (
    LiftConvention,
    calibrate_salie_lift,
    calibration_file_name,
    calibration_report,
    nth_roots,
    power_residue_symbol,
    salie_registry,
    salie_value,
)
from hkv.errors import LiftConventionUncalibrated, SalieUnavailable


class TestResidueSymbol:
    def test_one_is_always_a_residue(self):
        assert power_residue_symbol(1, 3, PrimePowerModulus(7, 2)) == 1

    def test_two_is_not_a_square_mod_five(self):
        assert power_residue_symbol(2, 2, PrimePowerModulus(5, 1)) == 0

    def test_four_is_a_square_mod_125(self):
        assert power_residue_symbol(4, 2, PrimePowerModulus(5, 3)) == 1


class TestNthRoots:
    def test_square_roots_of_four_mod_five(self):
        assert nth_roots(4, 2, PrimePowerModulus(5, 1)) == [2, 3]

    def test_non_residue_has_no_roots(self):
        assert nth_roots(2, 2, PrimePowerModulus(5, 1)) == []

    def test_first_root(self):
        assert nth_roots(1, 1, PrimePowerModulus(7, 3)) == [1]

    @pytest.mark.parametrize("c,n", [(4, 2), (6, 3), (11, 4), (24, 2)])
    def test_roots_are_exact(self, c, n):
        m = PrimePowerModulus(5, 4)
        roots = nth_roots(c, n, m)
        for w in roots:
            assert pow(w, n, m.modulus) == c % m.modulus
        expected = np.gcd(n, 4) if power_residue_symbol(c, n, m) else 0
        assert len(roots) == expected

    def test_level_option(self):
        roots = nth_roots(4, 2, PrimePowerModulus(5, 4), level=2)
        assert all(pow(w, 2, 25) == 4 for w in roots)
        assert len(roots) == 2


class TestCalibration:
    def test_uncalibrated_method_is_gated(self):
        query = KloostermanQuery(n=2, c=1, modulus=PrimePowerModulus(5, 4), method="salie")
        with pytest.raises(LiftConventionUncalibrated):
            kloosterman(query)

    def test_odd_beta_rejected(self):
        with pytest.raises(SalieUnavailable):
            calibrate_salie_lift(5, 3, 2)

    def test_n2_selects_c1_and_matches_naive(self, isolated_dirs: Path):
        convention = calibrate_salie_lift(5, 4, 2, oracle="naive")
        assert convention is LiftConvention.C1
        m = PrimePowerModulus(5, 4)
        naive = kloosterman_table(2, m, "naive")
        salie = kloosterman_table(2, m, "salie")
        assert np.max(np.abs(naive - salie)) < 1e-8 * 25
        report = calibration_report(5, 4, 2)
        assert report["classes_checked"] == 500
        assert report["max_residuals"]["C2"] < 1e-8
        assert report["max_residuals"]["C3"] < 1e-8
        assert (isolated_dirs / "cache" / calibration_file_name(5, 4, 2)).is_file()

    def test_n3_exactly_one_convention(self):
        convention = calibrate_salie_lift(5, 4, 3, oracle="fft_dp")
        report = calibration_report(5, 4, 3)
        passing = [name for name, r in report["max_residuals"].items() if r < report["tolerance"]]
        assert passing == [convention.value]
        assert convention is LiftConvention.C2

    def test_registry_restored_from_cache(self, isolated_dirs: Path):
        calibrate_salie_lift(5, 4, 2)
        salie_registry.clear()
        value = kloosterman(KloostermanQuery(n=2, c=6, modulus=PrimePowerModulus(5, 4), method="salie"))
        reference = kloosterman_table(2, PrimePowerModulus(5, 4))[6]
        assert abs(value - reference) < 1e-7

    def test_non_residue_value_is_zero(self):
        m = PrimePowerModulus(5, 4)
        assert salie_value(2, 2, m, LiftConvention.C2) == 0
        assert abs(kloosterman_table(2, m)[2]) < 1e-9

    def test_report_document_shape(self, isolated_dirs: Path):
        calibrate_salie_lift(5, 4, 2)
        document = json.loads((isolated_dirs / "cache" / calibration_file_name(5, 4, 2)).read_text())
        assert document["schema"] == 1
        assert document["kind"] == "salie_calibration"
        assert document["report"]["matched"] == "C1"
