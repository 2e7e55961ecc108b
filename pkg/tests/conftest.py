from pathlib import Path

import pytest

from hkv.arith.salie import salie_registry
from hkv.voronoi.moments import moment_cache


@pytest.fixture(autouse=True)
def isolated_dirs(monkeypatch, tmp_path: Path) -> Path:
    """缓存与输出目录指向临时目录。 / Point cache and output directories at a temp dir."""
    monkeypatch.setenv("HKV_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("HKV_OUTPUT_DIR", str(tmp_path / "reports"))
    salie_registry.clear()
    moment_cache.clear()
    yield tmp_path
    salie_registry.clear()
    moment_cache.clear()
