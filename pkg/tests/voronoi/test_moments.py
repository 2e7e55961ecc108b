import json

import pytest

from hkv.arith.modulus import PrimePowerModulus
from hkv.errors import InvalidArgument
from hkv.ldata.datum import datum_from_spec
from hkv.voronoi import (
    MomentQuery,
    X2Route,
    moment_decomposition,
    moment_direct,
    moment_direct_value,
    moment_recursion,
    vsfts_u_sweep,
)
from hkv.voronoi.moments import MomentCache, moment_cache, x1_weights, x2_sum

GL2 = "7:2,13:4"
DELTA = complex(0.6, 0.3)


def query(p=5, beta=4, u=1.5, spec=GL2, delta=DELTA, **kwargs):
    return MomentQuery(datum_from_spec(spec), PrimePowerModulus(p, beta), delta, u, **kwargs)


@pytest.fixture(scope="module")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("moment_cache"))


@pytest.fixture(scope="module")
def default_recursion(cache_dir):
    return moment_recursion(query(), cache_dir=cache_dir)


class TestMomentQuery:
    def test_derived_lengths(self):
        q = query()
        assert q.Z == pytest.approx(5**1.5)
        assert q.conductor == pytest.approx(91 * 5**8)
        assert q.f == pytest.approx(91 * 5**8 / 5**1.5)
        assert q.c == 1 - DELTA

    def test_prime_modulus_gate(self):
        with pytest.raises(InvalidArgument):
            query(beta=1, u=0.5)
        assert query(beta=1, u=0.5, allow_prime=True).modulus.beta == 1

    @pytest.mark.parametrize("u", [0.0, 3.0, 3.5])
    def test_u_range(self, u):
        with pytest.raises(InvalidArgument):
            query(u=u)

    def test_conductor_coprime(self):
        with pytest.raises(InvalidArgument):
            query(p=7, beta=2, u=0.5)

    def test_prime_must_not_divide_degree(self):
        with pytest.raises(InvalidArgument):
            query(p=3, beta=2, u=0.5, spec="7:2,13:4,19:6")

    def test_delta_in_strip(self):
        with pytest.raises(InvalidArgument):
            query(delta=1.2)


class TestMomentDirect:
    def test_small_instance_has_tight_bar(self):
        value, bar = moment_direct_value(query(beta=2, u=0.5))
        assert bar < 1e-9
        assert abs(value) > 0

    def test_value_is_cached_on_disk(self, isolated_dirs):
        q = query(beta=2, u=0.5)
        value = moment_direct(q)
        path = isolated_dirs / "cache" / MomentCache.FILE_NAME
        document = json.loads(path.read_text(encoding="utf-8"))
        assert document["kind"] == "moment_cache"
        assert q.cache_key() in document["entries"]
        moment_cache.clear()
        assert moment_cache.get(q)[0] == value

    def test_conjugation_symmetry(self):
        q = query(beta=2, u=0.5)
        dual = MomentQuery(q.datum.dual(), q.modulus, DELTA.conjugate(), 0.5)
        assert abs(moment_direct(dual) - moment_direct(q).conjugate()) < 1e-10

    def test_prime_modulus_when_allowed(self):
        value, bar = moment_direct_value(query(p=7, beta=1, u=0.5, spec="11:2,13:4", allow_prime=True))
        assert bar < 1e-8
        assert abs(value) > 0


class TestDecomposition:
    def test_x1_weights(self):
        w = x1_weights(PrimePowerModulus(5, 2))
        assert w[1] == pytest.approx(1.0)
        assert w[24] == pytest.approx(1.0)
        assert w[6] == pytest.approx(-0.25)
        assert w[2] == 0.0

    def test_mellin_route_matches_direct_route(self):
        q = query(beta=2, u=0.5, spec="7:2")
        direct, _, details = x2_sum(q, X2Route.DIRECT)
        mellin, bar, info = x2_sum(q, X2Route.MELLIN)
        assert details["route"] == "direct"
        assert info["route"] == "mellin"
        assert abs(direct - mellin) < 1e-8 * max(1.0, abs(direct))

    def test_closure_at_beta_three(self):
        q = query(beta=3, u=1.0)
        decomposition = moment_decomposition(q)
        assert decomposition.route == "mellin"
        assert abs(decomposition.total - moment_direct(q)) < 1e-6

    def test_first_term_and_lower_envelope(self):
        decomposition = moment_decomposition(query(beta=3, u=1.0))
        assert abs(decomposition.details["first_term"] - 1.0) < 1e-6
        assert decomposition.details["envelopes"]["lower"]["value"] < 0.1
        assert decomposition.details["envelopes"]["trivialX2"]["within"]

    def test_prime_modulus_rejected(self):
        with pytest.raises(InvalidArgument):
            moment_decomposition(query(beta=1, u=0.5, allow_prime=True))


class TestRecursion:
    def test_routes_agree_at_default_instance(self, default_recursion):
        report = default_recursion
        assert report.check_id == "VSFts"
        assert report.passed, report.to_dict()
        routes = report.diagnostics["routes"]
        assert set(routes) == {"decomposition", "VSFK", "VSFts"}
        for name, residual in report.diagnostics["route_residuals"].items():
            assert residual < 1e-5 * max(1.0, abs(report.lhs)), name

    def test_decomposition_closure(self, default_recursion):
        decomposition = default_recursion.diagnostics["decomposition"]
        assert abs(decomposition["total"] - default_recursion.lhs) < 1e-6
        assert abs(decomposition["X1"] - 1.0) < 0.1

    def test_leading_term(self, default_recursion):
        assert abs(default_recursion.diagnostics["leading_phi_u_term"] + 1.0) < 1e-3

    def test_twisted_bound(self, default_recursion):
        envelope = default_recursion.diagnostics["envelopes"]["twistedbound"]
        assert envelope["within"], envelope
        assert envelope["theta_record"] == pytest.approx(7 / 64)

    def test_u_invariance(self, cache_dir):
        sweep = vsfts_u_sweep(query(), cache_dir=cache_dir)
        assert len(sweep["values"]) == 3
        assert sweep["spread"] < 1e-5

    def test_odd_beta_skips_root_sum_route(self, cache_dir):
        report = moment_recursion(query(beta=3, u=1.0), cache_dir=cache_dir)
        assert report.check_id == "VSFK"
        assert "skipped" in report.diagnostics["VSFts"]
        assert report.passed, report.to_dict()
