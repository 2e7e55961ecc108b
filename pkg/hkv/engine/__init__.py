"""报告持久化与运行编排。 / Report persistence and run orchestration.

run() 位于 hkv.engine.runner，按需导入。 / run() lives in hkv.engine.runner and is imported on demand.
"""

from hkv.engine.recorder import ReportRecorder, atomic_write_json, dumps_report

__all__ = ["ReportRecorder", "atomic_write_json", "dumps_report"]
