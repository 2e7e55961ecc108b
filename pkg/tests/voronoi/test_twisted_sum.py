from pathlib import Path

import pytest

from hkv.arith.modulus import PrimePowerModulus
from hkv.arith.salie import LiftConvention, calibration_file_name
from hkv.errors import SalieUnavailable
from hkv.ldata.datum import datum_from_spec
from hkv.voronoi import MomentQuery, twisted_sum_voronoi
from hkv.voronoi.moments import x2_sum
from hkv.voronoi.twisted_sum import residue_classes

GL2 = "7:2,13:4"


def query(p=5, beta=4, u=1.5, spec=GL2):
    return MomentQuery(datum_from_spec(spec), PrimePowerModulus(p, beta), complex(0.6, 0.3), u)


@pytest.fixture(scope="module")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("salie_cache"))


@pytest.fixture(scope="module")
def decomposition(cache_dir):
    return twisted_sum_voronoi(query(), cache_dir=cache_dir)


class TestResidueClasses:
    def test_half_the_units_are_squares(self):
        xs = residue_classes(query())
        assert xs.size == 250
        assert all(pow(int(x) % 5, 2, 5) == 1 for x in xs)

    def test_ascending(self):
        xs = residue_classes(query())
        assert list(xs) == sorted(xs)


class TestTwistedSum:
    def test_matches_x2(self, decomposition):
        x2, _, details = x2_sum(query())
        assert details["route"] == "mellin"
        assert abs(decomposition.value - x2) < 1e-5 * max(1.0, abs(x2))

    def test_root_sum_and_kloosterman_routes_agree(self, decomposition):
        scale = max(1.0, abs(decomposition.vsf4_value))
        assert abs(decomposition.value - decomposition.vsf4_value) < 1e-9 * scale

    def test_second_block_averages_out(self, decomposition):
        assert abs(decomposition.frak_S[1]) < 1e-8

    def test_blocks_recombine(self, decomposition):
        total = decomposition.S1_block + sum(decomposition.S2_blocks) + decomposition.S2_boundary
        assert abs(total - decomposition.value) < 1e-10 * max(1.0, abs(decomposition.value))
        assert len(decomposition.S2_blocks) == 2

    def test_calibration_persisted(self, decomposition, cache_dir):
        assert LiftConvention(decomposition.convention) in set(LiftConvention)
        assert (Path(cache_dir) / calibration_file_name(5, 4, 2)).is_file()

    def test_summary_is_plain(self, decomposition):
        summary = decomposition.summary()
        assert summary["classes"] == 250
        assert summary["vsf3"] == decomposition.value

    def test_boundary_skipped_at_three(self, cache_dir):
        result = twisted_sum_voronoi(query(p=3, beta=4, u=1.5), cache_dir=cache_dir)
        assert result.notes
        assert result.frak_S[2] == 0
        assert abs(result.value - result.vsf4_value) < 1e-9 * max(1.0, abs(result.vsf4_value))

    def test_odd_beta_unavailable(self, cache_dir):
        with pytest.raises(SalieUnavailable):
            twisted_sum_voronoi(query(beta=3, u=1.0), cache_dir=cache_dir)
