# recorder.py
# =============================================================================
# 报告落盘: 每份检查报告一个 JSON 文件，可选 CSV 逐项表。
# / Report persistence: one JSON file per check, optional CSV term tables.
#
# 1. 崩溃安全：临时文件 + 原子重命名，任意时刻文件都是合法 JSON。
#    / Crash-safe: temp file + atomic rename; files are always valid JSON.
# 2. 可重放：报告内不含时间戳，键排序；耗时写入独立的 timings.json。
#    / Replayable: no timestamps inside reports, sorted keys; runtimes go to
#      a separate timings.json sidecar.
# 3. 复数统一编码为 {"re", "im"}。 / Complex numbers are encoded as {"re", "im"}.
# =============================================================================

"""报告记录器。 / Report recorder."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _encode(obj: Any) -> Any:
    """json.dumps 的 default 钩子。 / default hook for json.dumps."""
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"im": z.imag, "re": z.real}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dumps_report(document: Any, *, indent: Optional[int] = 2) -> str:
    """确定性序列化。 / Deterministic serialization."""
    return json.dumps(document, default=_encode, sort_keys=True, indent=indent, ensure_ascii=False)


def to_jsonable(document: Any) -> Any:
    """转换为纯 JSON 结构。 / Round-trip through the encoder to plain JSON values."""
    return json.loads(json.dumps(document, default=_encode))


def atomic_write_text(path: Path, content: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # 原子写入：先写 .tmp 再重命名 / Atomic write: .tmp then rename
    tmp_path = path.with_name(path.name + ".tmp")
    tmp_path.write_text(content, encoding="utf-8")
    os.chmod(tmp_path, 0o600)
    tmp_path.replace(path)
    return path


def atomic_write_json(path: Path, document: Any) -> Path:
    return atomic_write_text(path, dumps_report(document) + "\n")


def format_cell(value: Any) -> str:
    """CSV 单元格：浮点数 15 位有效数字。 / CSV cell, floats at 15 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.15g}"
    return str(value)


class ReportRecorder:
    """把报告写入输出目录。 / Writes reports into an output directory.

    输出文件 / Output files:
        <name>.json   {"schema": 1, "kind": ..., "report": {...}}
        <name>.csv    header row + one row per term/class
        timings.json  {name: seconds}
    """

    def __init__(self, output_dir: Path | str):
        self._dir = Path(output_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._timings: Dict[str, float] = {}
        self.written: List[Path] = []

    @property
    def output_dir(self) -> Path:
        return self._dir

    def write_json(self, name: str, payload: Any, *, kind: str) -> Path:
        document = {"schema": SCHEMA_VERSION, "kind": kind, "report": payload}
        path = atomic_write_json(self._dir / f"{name}.json", document)
        self.written.append(path)
        logger.debug("report written: %s", path)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
        path = atomic_write_text(self._dir / f"{name}.csv", buffer.getvalue())
        self.written.append(path)
        return path

    def record_timing(self, name: str, seconds: float) -> None:
        self._timings[name] = round(float(seconds), 6)

    def flush_timings(self) -> Optional[Path]:
        """写入耗时侧文件；失败仅记录日志。 / Write the timing sidecar; failures are only logged."""
        if not self._timings:
            return None
        try:
            return atomic_write_json(self._dir / "timings.json", self._timings)
        except OSError as exc:
            logger.warning("timings sidecar not written: %s", exc)
            return None


__all__ = [
    "SCHEMA_VERSION",
    "ReportRecorder",
    "atomic_write_json",
    "atomic_write_text",
    "dumps_report",
    "format_cell",
    "to_jsonable",
]
