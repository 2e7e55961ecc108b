from __future__ import annotations

from pathlib import Path

from hkv.runtime_paths import hkv_home_dir, resolve_cache_dir, resolve_output_dir


def _make_workspace(path: Path) -> None:
    (path / "pyproject.toml").write_text("[project]\nname='hkv-local'\n", encoding="utf-8")
    (path / "hkv").mkdir(parents=True, exist_ok=True)
    (path / "tests").mkdir(parents=True, exist_ok=True)


def test_explicit_dirs_win_over_environment(tmp_path: Path) -> None:
    env = {"HKV_CACHE_DIR": str(tmp_path / "env-cache"), "HKV_OUTPUT_DIR": str(tmp_path / "env-out")}

    assert resolve_cache_dir(str(tmp_path / "mine"), env=env) == str(tmp_path / "mine")
    assert resolve_output_dir(str(tmp_path / "out"), env=env) == str(tmp_path / "out")


def test_environment_wins_over_workspace(tmp_path: Path) -> None:
    workspace = tmp_path / "workspace"
    workspace.mkdir()
    _make_workspace(workspace)
    env = {"HKV_CACHE_DIR": str(tmp_path / "env-cache"), "HKV_OUTPUT_DIR": str(tmp_path / "env-out")}

    assert resolve_cache_dir(env=env, current_dir=workspace) == str(tmp_path / "env-cache")
    assert resolve_output_dir(env=env, current_dir=workspace) == str(tmp_path / "env-out")


def test_workspace_defaults_inside_a_checkout(tmp_path: Path) -> None:
    workspace = tmp_path / "workspace"
    workspace.mkdir()
    _make_workspace(workspace)

    assert resolve_cache_dir(env={}, current_dir=workspace) == str(workspace / ".hkv_cache")
    assert resolve_output_dir(env={}, current_dir=workspace) == str(workspace / "hkv_reports")


def test_existing_report_dir_counts_as_workspace(tmp_path: Path) -> None:
    current_dir = tmp_path / "random-dir"
    (current_dir / "hkv_reports").mkdir(parents=True)

    assert resolve_output_dir(env={}, current_dir=current_dir) == str(current_dir / "hkv_reports")


def test_fall_back_to_installed_layout(tmp_path: Path) -> None:
    current_dir = tmp_path / "random-dir"
    current_dir.mkdir()
    home = tmp_path / "home" / ".hkv"
    env = {"HKV_HOME_DIR": str(home)}

    assert resolve_cache_dir(env=env, current_dir=current_dir) == str(home / "cache")
    assert resolve_output_dir(env=env, current_dir=current_dir) == str(home / "reports")


def test_home_dir_defaults_under_user_home(tmp_path: Path) -> None:
    assert hkv_home_dir(env={}, home_dir=tmp_path) == tmp_path / ".hkv"
    assert hkv_home_dir(env={"HKV_HOME_DIR": "  "}, home_dir=tmp_path) == tmp_path / ".hkv"
