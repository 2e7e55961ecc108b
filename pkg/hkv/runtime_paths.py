from __future__ import annotations

import os
from pathlib import Path
from typing import Mapping


def _env(env: Mapping[str, str] | None = None) -> Mapping[str, str]:
    return env if env is not None else os.environ


def _path_from_text(value: str | None) -> Path | None:
    text = str(value or "").strip()
    if not text:
        return None
    return Path(text).expanduser()


def _workspace_markers_present(current_dir: Path) -> bool:
    marker_hits = 0
    for present in (
        (current_dir / "pyproject.toml").is_file(),
        (current_dir / "hkv").is_dir(),
        (current_dir / "tests").is_dir(),
    ):
        marker_hits += 1 if present else 0
    return marker_hits >= 2


def hkv_home_dir(
    env: Mapping[str, str] | None = None,
    home_dir: Path | None = None,
) -> Path:
    env_map = _env(env)
    configured = _path_from_text(env_map.get("HKV_HOME_DIR"))
    if configured is not None:
        return configured
    return (home_dir or Path.home()) / ".hkv"


def installed_cache_dir(
    env: Mapping[str, str] | None = None,
    home_dir: Path | None = None,
) -> Path:
    return hkv_home_dir(env, home_dir) / "cache"


def installed_output_dir(
    env: Mapping[str, str] | None = None,
    home_dir: Path | None = None,
) -> Path:
    return hkv_home_dir(env, home_dir) / "reports"


def current_workspace_cache_dir(current_dir: Path | None = None) -> Path:
    return (current_dir or Path.cwd()) / ".hkv_cache"


def current_workspace_output_dir(current_dir: Path | None = None) -> Path:
    return (current_dir or Path.cwd()) / "hkv_reports"


def _resolve_dir(
    explicit: str | None,
    env_key: str,
    workspace_path: Path,
    installed_path: Path,
    env_map: Mapping[str, str],
    cwd: Path,
) -> str:
    explicit_path = _path_from_text(explicit)
    if explicit_path is not None:
        return str(explicit_path)

    env_path = _path_from_text(env_map.get(env_key))
    if env_path is not None:
        return str(env_path)

    if workspace_path.exists() or _workspace_markers_present(cwd):
        return str(workspace_path)

    return str(installed_path)


def resolve_cache_dir(
    cache_dir: str | None = None,
    *,
    env: Mapping[str, str] | None = None,
    current_dir: Path | None = None,
    home_dir: Path | None = None,
) -> str:
    """缓存目录：显式参数 > HKV_CACHE_DIR > 工作区 > 安装目录。
    / Cache directory: explicit > HKV_CACHE_DIR > workspace > installed layout.
    """
    env_map = _env(env)
    cwd = current_dir or Path.cwd()
    return _resolve_dir(
        cache_dir,
        "HKV_CACHE_DIR",
        current_workspace_cache_dir(cwd),
        installed_cache_dir(env_map, home_dir),
        env_map,
        cwd,
    )


def resolve_output_dir(
    output_dir: str | None = None,
    *,
    env: Mapping[str, str] | None = None,
    current_dir: Path | None = None,
    home_dir: Path | None = None,
) -> str:
    env_map = _env(env)
    cwd = current_dir or Path.cwd()
    return _resolve_dir(
        output_dir,
        "HKV_OUTPUT_DIR",
        current_workspace_output_dir(cwd),
        installed_output_dir(env_map, home_dir),
        env_map,
        cwd,
    )
