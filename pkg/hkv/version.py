from __future__ import annotations

from functools import lru_cache
from importlib import metadata
from pathlib import Path
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

_DIST_NAME = "hkv"


@lru_cache(maxsize=1)
def _find_pyproject() -> Path | None:
    current = Path(__file__).resolve()
    for parent in current.parents:
        candidate = parent / "pyproject.toml"
        if candidate.is_file():
            return candidate
    return None


def _version_from_pyproject(path: Path) -> str | None:
    with path.open("rb") as fh:
        data = tomllib.load(fh)
    project = data.get("project") or {}
    if project.get("name") != _DIST_NAME:
        return None
    version = project.get("version")
    return str(version) if version else None


@lru_cache(maxsize=1)
def get_version() -> str:
    """源码树优先，其次已安装分发包。 / Source tree first, then installed distribution metadata."""
    pyproject = _find_pyproject()
    if pyproject is not None:
        found = _version_from_pyproject(pyproject)
        if found:
            return found
    try:
        return metadata.version(_DIST_NAME)
    except metadata.PackageNotFoundError as exc:
        raise RuntimeError("hkv version unavailable: no pyproject.toml and no installed metadata") from exc


VERSION = get_version()

__all__ = ["VERSION", "get_version"]
