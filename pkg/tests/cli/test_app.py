from __future__ import annotations

import json
import math
from pathlib import Path

import pytest
from typer.testing import CliRunner

from hkv.cli.app import app


runner = CliRunner()


def _read_json(result) -> dict:
    """解析 CLI JSON 输出（取最后一行）。 / Parse the JSON line the CLI emits last."""
    return json.loads(result.stdout.strip().splitlines()[-1])


class TestBasics:
    def test_version_json(self) -> None:
        result = runner.invoke(app, ["version", "--json"])
        assert result.exit_code == 0
        payload = _read_json(result)
        assert payload["ok"] is True
        assert payload["version"]

    def test_empty_command_prints_usage_and_exits_two(self) -> None:
        result = runner.invoke(app, [])
        assert result.exit_code == 2
        assert "kl" in result.stdout

    def test_help_pages_are_chinese_and_include_examples(self) -> None:
        root_help = runner.invoke(app, ["--help"])
        assert root_help.exit_code == 0
        assert "hkv 命令行工具" in root_help.stdout
        assert "显示帮助并退出" in root_help.stdout

        kl_help = runner.invoke(app, ["kl", "--help"])
        assert kl_help.exit_code == 0
        assert "hkv kl --p 5 --beta 4" in kl_help.stdout

        voronoi_help = runner.invoke(app, ["voronoi", "check", "-h"])
        assert voronoi_help.exit_code == 0
        assert "--theorem" in voronoi_help.stdout

    def test_unknown_option_is_usage_error(self) -> None:
        result = runner.invoke(app, ["kl", "--p", "5", "--n", "2", "--bogus"])
        assert result.exit_code == 2


class TestKl:
    def test_json_value(self, isolated_dirs: Path) -> None:
        result = runner.invoke(app, ["kl", "--p", "5", "--n", "2", "--c", "1", "--json", "-q"])
        assert result.exit_code == 0, result.stdout
        payload = _read_json(result)
        assert payload["ok"] is True
        assert abs(payload["value_re"] - (2 + 2 * math.cos(4 * math.pi / 5))) < 1e-12
        assert abs(payload["value_im"]) < 1e-12
        assert payload["runtime_ns"] > 0
        report = json.loads((isolated_dirs / "reports" / "kl_p5_b1_n2_c1.json").read_text(encoding="utf-8"))
        assert report["kind"] == "kloosterman"
        assert "runtime_ns" not in json.dumps(report)
        assert (isolated_dirs / "reports" / "timings.json").is_file()

    def test_human_output_renders_table(self) -> None:
        result = runner.invoke(app, ["kl", "--p", "7", "--beta", "2", "--n", "3", "--c", "2"])
        assert result.exit_code == 0
        assert "value_re" in result.stdout

    def test_invalid_prime_is_usage_error(self) -> None:
        result = runner.invoke(app, ["kl", "--p", "2", "--n", "2", "--json"])
        assert result.exit_code == 2
        payload = _read_json(result)
        assert payload["ok"] is False
        assert payload["error"]["code"] == "CONFIG_INVALID"
        assert "fix" in payload

    def test_salie_precondition_is_usage_error(self) -> None:
        result = runner.invoke(app, ["kl", "--p", "5", "--beta", "3", "--n", "2", "--method", "salie", "--json"])
        assert result.exit_code == 2
        assert _read_json(result)["error"]["code"] == "SALIE_UNAVAILABLE"

    def test_csv_emit(self, isolated_dirs: Path) -> None:
        result = runner.invoke(app, ["kl", "--p", "5", "--beta", "2", "--n", "2", "--emit", "csv", "--json", "-q"])
        assert result.exit_code == 0
        table = (isolated_dirs / "reports" / "kl_p5_b2_n2_c1.csv").read_text(encoding="utf-8").splitlines()
        assert table[0] == "c,pm,method,value_re,value_im"
        assert len(table) == 2


class TestChecks:
    def test_verify_suite_passes(self) -> None:
        result = runner.invoke(app, ["verify", "--suite", "qo,gausstwist", "--p", "5", "--beta", "2", "--json", "-q"])
        assert result.exit_code == 0, result.stdout
        payload = _read_json(result)
        assert payload["ok"] is True
        assert set(payload["identities"]) == {"QO", "gauss_twist"}
        assert all(check["passed"] for check in payload["checks"])

    def test_impossible_tolerance_fails_with_exit_one(self) -> None:
        result = runner.invoke(
            app,
            ["series", "verify", "--family", "hk_gl1", "--components", "7:2", "--p", "5", "--beta", "2", "--n", "2",
             "--tolerance", "1e-300", "--json", "-q"],
        )
        assert result.exit_code == 1
        payload = _read_json(result)
        assert payload["ok"] is False
        assert payload["checks"][0]["passed"] is False
        assert Path(payload["checks"][0]["path"]).is_file()

    def test_series_verify(self) -> None:
        result = runner.invoke(
            app,
            ["series", "verify", "--family", "hk_gl1", "--components", "7:2", "--p", "5", "--beta", "2", "--n", "2",
             "--json", "-q"],
        )
        assert result.exit_code == 0, result.stdout
        assert _read_json(result)["check_id"] == "D_A(i)"

    def test_right_side_left_of_line_is_usage_error(self) -> None:
        result = runner.invoke(
            app,
            ["series", "eval", "--family", "hk_gl1", "--components", "7:2", "--p", "5", "--beta", "2", "--n", "2",
             "--side", "right", "--s", "2,0", "--json"],
        )
        assert result.exit_code == 2
        assert _read_json(result)["error"]["code"] == "SIDE_ILLEGAL_AT_S"

    def test_voronoi_check(self) -> None:
        result = runner.invoke(
            app,
            ["voronoi", "check", "--theorem", "D_B_i", "--components", "7:2", "--p", "5", "--beta", "2", "--n", "2",
             "--json", "-q"],
        )
        assert result.exit_code == 0, result.stdout
        payload = _read_json(result)
        assert payload["check_id"] == "D_B(i)"
        assert payload["relative_residual"] < 1e-6

    def test_kernel_closed_form_check(self) -> None:
        result = runner.invoke(app, ["kernel", "--kind", "V1", "--y", "0.5,2", "--json", "-q"])
        assert result.exit_code == 0, result.stdout
        payload = _read_json(result)
        assert len(payload["values"]) == 2
        assert [check["name"] for check in payload["checks"]][-1] == "kernel_V1_closed_form"

    def test_ldata_coefficients(self) -> None:
        result = runner.invoke(app, ["ldata", "--components", "7:2", "--coeffs", "8", "--json", "-q"])
        assert result.exit_code == 0, result.stdout
        payload = _read_json(result)
        assert len(payload["coefficients"]) == 8
        assert payload["coefficient_bound"]["holds"] is True


class TestReplay:
    def test_run_config_replays_byte_identical(self, isolated_dirs: Path) -> None:
        first = runner.invoke(app, ["kl", "--p", "7", "--beta", "2", "--n", "3", "--c", "3", "--json", "-q"])
        assert first.exit_code == 0
        reports = isolated_dirs / "reports"
        report_path = reports / "kl_p7_b2_n3_c3.json"
        before = report_path.read_bytes()
        config_before = (reports / "run_config.yaml").read_bytes()

        again = runner.invoke(app, ["run", "--config", str(reports / "run_config.yaml"), "--json", "-q"])
        assert again.exit_code == 0, again.stdout
        assert report_path.read_bytes() == before
        assert (reports / "run_config.yaml").read_bytes() == config_before

    def test_missing_config_is_usage_error(self, tmp_path: Path) -> None:
        result = runner.invoke(app, ["run", "--config", str(tmp_path / "nope.yaml"), "--json"])
        assert result.exit_code == 2
        assert _read_json(result)["error"]["code"] == "CONFIG_INVALID"


class TestBench:
    @pytest.mark.parametrize("methods", ["naive,dp,fft_dp", "naive,fft_dp,salie"])
    def test_methods_agree(self, methods: str) -> None:
        result = runner.invoke(
            app, ["bench", "kl", "--p", "5", "--betas", "1,2,4", "--n", "2", "--methods", methods, "--json", "-q"]
        )
        assert result.exit_code == 0, result.stdout
        payload = _read_json(result)
        assert {row["beta"] for row in payload["timings"]} == {1, 2, 4}
        assert all(check["passed"] for check in payload["checks"])
