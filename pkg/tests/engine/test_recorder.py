import json
import math

import numpy as np

from hkv.engine.recorder import ReportRecorder, dumps_report, format_cell, to_jsonable
from hkv.primitives.models import VerificationReport


class TestEncoding:
    def test_complex_as_re_im(self):
        assert to_jsonable({"z": 1 + 2j}) == {"z": {"im": 2.0, "re": 1.0}}

    def test_numpy_values(self):
        doc = to_jsonable({"a": np.arange(3), "b": np.float64(0.5), "c": np.complex128(1j), "d": np.bool_(True)})
        assert doc == {"a": [0, 1, 2], "b": 0.5, "c": {"im": 1.0, "re": 0.0}, "d": True}

    def test_sorted_keys_and_stable(self):
        first = dumps_report({"b": 1, "a": [1 + 0j]})
        assert first == dumps_report({"a": [1 + 0j], "b": 1})
        assert first.index('"a"') < first.index('"b"')

    def test_objects_with_to_dict(self):
        report = VerificationReport("x", {}, 1.0, 1.0, 1e-9)
        assert to_jsonable(report)["passed"] is True

    def test_csv_cells(self):
        assert format_cell(True) == "true"
        assert format_cell(np.int64(7)) == "7"
        assert format_cell(math.pi) == "3.14159265358979"
        assert format_cell("fft_dp") == "fft_dp"


class TestReportRecorder:
    def test_json_envelope(self, tmp_path):
        recorder = ReportRecorder(tmp_path / "out")
        path = recorder.write_json("demo", {"value": 1j}, kind="kloosterman")
        document = json.loads(path.read_text(encoding="utf-8"))
        assert document == {"kind": "kloosterman", "report": {"value": {"im": 1.0, "re": 0.0}}, "schema": 1}
        assert recorder.written == [path]
        assert not list((tmp_path / "out").glob("*.tmp"))

    def test_csv_table(self, tmp_path):
        recorder = ReportRecorder(tmp_path)
        path = recorder.write_csv("terms", ["term", "re", "im"], [["lhs", 0.5, -1.0]])
        assert path.read_text(encoding="utf-8") == "term,re,im\nlhs,0.5,-1\n"

    def test_timings_sidecar(self, tmp_path):
        recorder = ReportRecorder(tmp_path)
        assert recorder.flush_timings() is None
        recorder.record_timing("kl", 0.1234567891)
        path = recorder.flush_timings()
        assert json.loads(path.read_text(encoding="utf-8")) == {"kl": 0.123457}
