from pathlib import Path

import pytest

from hkv.config import DEFAULT_SEED, Command, OutputFormat, RunConfig
from hkv.errors import ConfigInvalid


class TestFromEnv:
    def test_reads_directories_and_seed(self, monkeypatch, tmp_path: Path):
        monkeypatch.setenv("HKV_SEED", "0x10")
        config = RunConfig.from_env("kl", {"p": 5})
        assert config.command is Command.KL
        assert config.seed == 16
        assert config.cache_dir == str(tmp_path / "cache")
        assert config.output_dir == str(tmp_path / "reports")

    def test_default_seed(self, monkeypatch):
        monkeypatch.delenv("HKV_SEED", raising=False)
        assert RunConfig.from_env("verify").seed == DEFAULT_SEED

    def test_overrides_skip_none(self, tmp_path: Path):
        config = RunConfig.from_env("kl", output_dir=None, output_format=OutputFormat.CSV, cache_dir=str(tmp_path / "c"))
        assert config.output_dir == str(tmp_path / "reports")
        assert config.cache_dir == str(tmp_path / "c")
        assert config.output_format is OutputFormat.CSV

    def test_bad_seed(self, monkeypatch):
        monkeypatch.setenv("HKV_SEED", "seven")
        with pytest.raises(ConfigInvalid):
            RunConfig.from_env("kl")

    def test_unknown_command(self):
        with pytest.raises(ConfigInvalid) as info:
            RunConfig.from_env("plot")
        assert info.value.extra["errors"]


class TestValidation:
    def test_tolerances_must_be_positive(self):
        with pytest.raises(ConfigInvalid):
            RunConfig.validated({"command": "kl", "tolerances": {"series": 0.0}})

    def test_unknown_tolerance_key(self):
        with pytest.raises(ConfigInvalid):
            RunConfig.validated({"command": "kl", "tolerances": {"everything": 1e-3}})

    def test_abscissa_choice(self):
        with pytest.raises(ConfigInvalid):
            RunConfig.validated({"command": "kernel", "quadrature": {"abscissa": "random"}})

    def test_defaults(self):
        config = RunConfig(command="voronoi")
        assert config.tolerances.voronoi == 1e-6
        assert config.tolerances.identity == 1e-8
        assert config.quadrature.h == 0.05
        assert config.truncations.series_M == 1_000_000


class TestYaml:
    def test_round_trip(self, tmp_path: Path):
        config = RunConfig(command="series", params={"family": "hk_gl1", "p": 5, "s": [-0.7, 0.4]}, seed=3)
        path = tmp_path / "run.yaml"
        path.write_text(config.to_yaml(), encoding="utf-8")
        assert RunConfig.from_yaml(path) == config

    def test_yaml_is_sorted_and_stable(self):
        text = RunConfig(command="kl", params={"p": 5}).to_yaml()
        assert text == RunConfig(command="kl", params={"p": 5}).to_yaml()
        keys = [line.split(":")[0] for line in text.splitlines() if line and not line.startswith(" ")]
        assert keys == sorted(keys)

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(ConfigInvalid):
            RunConfig.from_yaml(tmp_path / "absent.yaml")

    @pytest.mark.parametrize("text", ["command: [kl", "- kl\n- verify\n"])
    def test_malformed_documents(self, tmp_path: Path, text: str):
        path = tmp_path / "bad.yaml"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigInvalid):
            RunConfig.from_yaml(path)
