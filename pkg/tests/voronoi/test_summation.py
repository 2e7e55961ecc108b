import pytest

from hkv.arith.modulus import PrimePowerModulus
from hkv.errors import IdentityViolated, InvalidArgument
from hkv.ldata.datum import datum_from_spec
from hkv.series import FamilyParams
from hkv.voronoi import Theorem, VoronoiWeight, WeightKind, residue_block_from_characters, voronoi_check
from hkv.voronoi.summation import derived_voronoi_reading, phi_inf_length

GL2 = "7:2,13:4"


def params(spec, p, beta, h=1, n=None):
    return FamilyParams(datum_from_spec(spec), PrimePowerModulus(p, beta), h, n)


def phi_inf(u=0.5, delta=complex(0.6, 0.3)):
    return VoronoiWeight(kind=WeightKind.PHI_INF, delta=delta, u=u)


class TestTheorem:
    @pytest.mark.parametrize(
        "name,label", [("VSF_i", "VSF(i)"), ("DAFI_B_ii", "DAFI_B(ii)"), ("D_B_i", "D_B(i)"), ("VSFK", "VSFK")]
    )
    def test_labels(self, name, label):
        assert Theorem(name).label == label

    def test_dual_datum_theorems(self):
        assert Theorem.VSF2_I.on_dual_datum
        assert Theorem.VSFK.on_dual_datum
        assert not Theorem.D_B_II.on_dual_datum

    def test_default_weight_follows_theorem(self):
        assert VoronoiWeight.default_for(Theorem.VSF_I).kind is WeightKind.GAUSSIAN_LOG
        assert VoronoiWeight.default_for(Theorem.VSFK).kind is WeightKind.PHI_INF

    def test_phi_inf_length(self):
        assert phi_inf_length(params(GL2, 3, 2), phi_inf(u=0.5)) == pytest.approx(91 * 3**3.5)


class TestGaussianWeight:
    def test_gl1_twist_prime_power(self):
        report = voronoi_check("D_B_i", params("7:2", 5, 2, h=1, n=2))
        assert report.check_id == "D_B(i)"
        assert report.relative_residual < 1e-6, report.to_dict()
        assert "D_B(i)" in report.literal

    def test_additive_prime_power(self):
        report = voronoi_check(Theorem.VSF_I, params(GL2, 3, 2))
        assert report.relative_residual < 1e-6, report.to_dict()
        assert report.diagnostics["weight"] == {"kind": "gaussian_log", "center": 50.0}

    def test_hyper_kloosterman_prime_power(self):
        report = voronoi_check("DAFI_B_i", params(GL2, 3, 2, h=2))
        assert report.passed, report.to_dict()

    @pytest.mark.parametrize("theorem", ["VSF_ii", "DAFI_B_ii"])
    def test_prime_modulus_carries_partial_L(self, theorem):
        report = voronoi_check(theorem, params(GL2, 5, 1))
        assert report.passed, report.to_dict()
        assert "partial_L" in report.diagnostics["right_terms"]

    def test_gl1_twist_prime(self):
        report = voronoi_check("D_B_ii", params("7:2", 5, 1, n=2))
        assert report.passed, report.to_dict()
        assert "D_B(ii)" in report.literal


class TestPhiInfinityWeight:
    def test_residue_block_consistent(self):
        prm = params(GL2, 3, 2)
        report = voronoi_check("VSF2_i", prm, phi_inf())
        block = report.diagnostics["residue_block"]
        assert block["consistent"], block
        assert report.passed, report.to_dict()

    def test_residue_block_matches_reading(self):
        prm = params(GL2, 3, 2)
        weight = phi_inf()
        reading = derived_voronoi_reading(Theorem.VSF2_I, prm, weight)
        block, _ = residue_block_from_characters(Theorem.VSF2_I, prm, weight)
        assert abs(block - reading.residue) < 1e-7 * max(1.0, abs(block))

    def test_direct_hyper_kloosterman(self):
        report = voronoi_check("VSFK", params(GL2, 3, 2, h=2), phi_inf())
        assert report.passed, report.to_dict()
        assert report.diagnostics["residue_block"]["consistent"]

    def test_prime_modulus_literal_reading(self):
        report = voronoi_check("VSF2_ii", params(GL2, 5, 1), phi_inf())
        assert report.passed, report.to_dict()
        assert "VSF2(ii)" in report.literal


class TestValidation:
    def test_branch_must_match_modulus(self):
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF_ii", params(GL2, 5, 2))
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF_i", params(GL2, 5, 1))

    def test_prime_three_rejected_for_prime_modulus(self):
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF_ii", params(GL2, 3, 1))

    def test_weight_kind_must_match(self):
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF_i", params(GL2, 3, 2), phi_inf())
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF2_i", params(GL2, 3, 2), VoronoiWeight())

    def test_u_range(self):
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF2_i", params(GL2, 3, 2), phi_inf(u=1.5))

    def test_degree_two_needed(self):
        with pytest.raises(InvalidArgument):
            voronoi_check("VSF_i", params("7:2", 3, 2))
        with pytest.raises(InvalidArgument):
            voronoi_check("D_B_i", params("7:2", 5, 2, n=1))

    def test_violation_raises_with_report(self):
        with pytest.raises(IdentityViolated) as info:
            voronoi_check("D_B_i", params("7:2", 5, 2, n=2), tolerance=1e-30, literal=False, raise_on_failure=True)
        assert info.value.extra["report"]["check_id"] == "D_B(i)"
