import math

from hkv.primitives.models import ErrorBar, IdentityReport, VerificationReport


class TestErrorBar:
    def test_parts_accumulate(self):
        bar = ErrorBar().add("tail", 1e-9).add("tail", -2e-9).add("quad", 1e-12)
        assert math.isclose(bar.parts["tail"], 3e-9)
        assert math.isclose(bar.total, 3.001e-9)


class TestVerificationReport:
    def test_relative_to_scale(self):
        report = VerificationReport("c", {}, lhs=100.0, rhs=100.0 + 1e-5, tolerance=1e-6, scale=100.0)
        assert math.isclose(report.relative_residual, 1e-7, rel_tol=1e-6)
        assert report.passed

    def test_default_scale_is_larger_side(self):
        report = VerificationReport("c", {}, lhs=2.0, rhs=1.0, tolerance=0.6)
        assert report.relative_residual == 0.5
        assert report.passed

    def test_nan_never_passes(self):
        report = VerificationReport("c", {}, lhs=float("nan"), rhs=0.0, tolerance=1.0)
        assert not report.passed

    def test_literal_is_diagnostic_only(self):
        report = VerificationReport("c", {}, lhs=1.0, rhs=1.0, tolerance=1e-9, literal={"shown": 2.0, "missing": None})
        assert report.passed
        document = report.to_dict()
        assert document["literal"]["shown"]["relative_residual"] == 0.5
        assert document["literal"]["missing"]["relative_residual"] is None

    def test_certified(self):
        bar = ErrorBar().add("tail", 1e-3)
        report = VerificationReport("c", {}, lhs=1.0, rhs=1.0, tolerance=1e-6, error_bar=bar)
        assert report.passed
        assert not report.certified


class TestIdentityReport:
    def test_status(self):
        report = IdentityReport("QO", {}, tolerance=1e-8, max_abs_residual=1e-10, cases_checked=25, declared_cases=25)
        assert report.status == "pass"

    def test_incomplete_sweep_fails(self):
        report = IdentityReport("QO", {}, tolerance=1e-8, cases_checked=24, declared_cases=25)
        assert report.status == "fail"

    def test_scaled_residual(self):
        report = IdentityReport("hK2", {}, tolerance=1e-8, scale=1e4, max_abs_residual=1e-5, cases_checked=1, declared_cases=1)
        assert math.isclose(report.max_scaled_residual, 1e-9)
        assert report.passed

    def test_skipped(self):
        report = IdentityReport("hKsum", {}, tolerance=1e-8, skipped="needs beta >= 2")
        assert report.status == "skipped"
        assert report.to_dict()["skipped"] == "needs beta >= 2"
