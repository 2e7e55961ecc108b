import json
import math

import pytest

from hkv.config import OutputFormat, RunConfig
from hkv.engine.runner import CONFIG_FILE_NAME, replay, run
from hkv.errors import CheckFailed, ConfigInvalid


def _config(command, params, **overrides):
    return RunConfig.from_env(command, params, **overrides)


class TestKl:
    def test_value_and_files(self, isolated_dirs):
        result = run(_config("kl", {"p": 5, "n": 2}))
        assert result.passed
        assert result.exit_code == 0
        assert abs(result.payload["value_re"] - (2 + 2 * math.cos(4 * math.pi / 5))) < 1e-12
        names = sorted(path.name for path in result.written)
        assert names == [CONFIG_FILE_NAME, "kl_p5_b1_n2_c1.json", "timings.json"]
        timings = json.loads((isolated_dirs / "reports" / "timings.json").read_text(encoding="utf-8"))
        assert "kl_total" in timings

    def test_csv_output_format(self):
        result = run(_config("kl", {"p": 5, "beta": 2, "n": 2, "pm": True}, output_format=OutputFormat.CSV))
        assert any(path.name == "kl_p5_b2_n2_c1_pm.csv" for path in result.written)

    def test_persist_off_writes_nothing(self, isolated_dirs):
        result = run(_config("kl", {"p": 7, "n": 3}), persist=False)
        assert result.written == []
        assert not (isolated_dirs / "reports").exists()

    def test_salie_is_calibrated_on_demand(self):
        fft = run(_config("kl", {"p": 5, "beta": 4, "n": 2, "c": 3}), persist=False)
        salie = run(_config("kl", {"p": 5, "beta": 4, "n": 2, "c": 3, "method": "salie"}), persist=False)
        assert abs(fft.payload["value_re"] - salie.payload["value_re"]) < 1e-8 * 25
        assert abs(fft.payload["value_im"] - salie.payload["value_im"]) < 1e-8 * 25


class TestChecks:
    def test_verify_records_each_identity(self):
        result = run(_config("verify", {"suite": "qo,lcac", "p": 7, "beta": 2}))
        assert result.passed
        assert [record.kind for record in result.records] == ["identity_report", "identity_report"]
        assert result.payload["identities"] == {"QO": "pass", "lcAC": "pass"}

    def test_raise_on_failure(self):
        config = _config(
            "series",
            {"family": "hk_gl1", "components": "7:2", "p": 5, "beta": 2, "n": 2, "verify": True},
        )
        config = RunConfig.validated({**config.model_dump(), "tolerances": {"series": 1e-300}})
        result = run(config)
        assert result.exit_code == 1
        assert result.failing[0].path.is_file()
        with pytest.raises(CheckFailed) as info:
            run(config, raise_on_failure=True)
        assert info.value.extra["failing_reports"]

    def test_bad_params_are_config_invalid(self):
        with pytest.raises(ConfigInvalid):
            run(_config("average", {"mode": "sideways"}))

    def test_average_decompose_matches_direct(self):
        result = run(_config("average", {"mode": "decompose", "p": 5, "beta": 3, "u": 1.0}))
        assert result.passed, result.records[0].report
        assert result.records[0].name.startswith("average")

    def test_bench_agreement(self):
        result = run(_config("bench", {"p": 5, "betas": [1, 2], "n": 2, "methods": ["naive", "dp", "fft_dp"]}))
        assert result.passed
        assert len(result.records) == 2
        assert len(result.payload["timings"]) == 6
        assert all("bench_kl_p5" in key for key in result.timings if key != "bench_total")


class TestReplay:
    def test_replay_reproduces_reports(self, isolated_dirs):
        run(_config("ldata", {"components": "7:2,13:4", "coeffs": 12}))
        reports = isolated_dirs / "reports"
        before = {path.name: path.read_bytes() for path in reports.iterdir() if path.name != "timings.json"}
        replay(reports / CONFIG_FILE_NAME)
        after = {path.name: path.read_bytes() for path in reports.iterdir() if path.name != "timings.json"}
        assert after == before
