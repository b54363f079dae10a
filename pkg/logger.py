"""
Модуль записи результатов сканов: CSV (pandas) и JSON.

Каждый файл несёт метаданные запуска (schema_version, tool_version, config, seed)
и не содержит отметок времени: повторный запуск с тем же конфигом даёт
побайтно тот же файл.
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import numpy as np
import pandas as pd

from models.config import META_PREFIX
from models.scan import SCHEMA_VERSION, TOOL_VERSION, ScanResult

log = logging.getLogger(__name__)


def _plain(obj: Any) -> Any:
    """numpy-скаляры и NaN → JSON-совместимые значения."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if np.isnan(obj) else float(obj)
    return obj


def dumps(record: Dict[str, Any]) -> str:
    return json.dumps(_plain(record), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


class ScanLogger:

    def __init__(self, run_meta: Optional[Dict[str, Any]] = None):
        self.run_meta = {"schema_version": SCHEMA_VERSION, "tool_version": TOOL_VERSION}
        self.run_meta.update(run_meta or {})

    @staticmethod
    def _ensure_parent(path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def meta_for(self, result: Optional[ScanResult] = None) -> Dict[str, Any]:
        meta = dict(result.meta) if result is not None else {}
        meta.update(self.run_meta)
        return meta

    # ── CSV ───────────────────────────────────────────────────────────────────

    def write_table(self, df: pd.DataFrame, path: str | Path, meta: Optional[Dict[str, Any]] = None) -> Path:
        """Первая строка — метаданные в JSON; числа в кратчайшей точной записи."""
        path = self._ensure_parent(Path(path))
        header = json.dumps(_plain(meta if meta is not None else self.run_meta),
                            sort_keys=True, ensure_ascii=False, allow_nan=False)
        with path.open("w", newline="", encoding="utf-8") as f:
            f.write(f"{META_PREFIX}{header}\n")
            df.to_csv(f, index=False, na_rep="", lineterminator="\n")
        log.info(f"CSV: {len(df)} строк → {path}")
        return path

    @staticmethod
    def scan_frame(result: ScanResult, value_column: Optional[str] = None) -> pd.DataFrame:
        """Скан в длинном формате: оси, значение, доп. столбцы; строчный порядок."""
        value_column = value_column or result.meta.get("functional", "value")
        columns: Dict[str, Any] = dict(result.grid_columns())
        columns[value_column] = result.values.ravel()
        for name, col in result.extras.items():
            columns[name] = np.asarray(col).ravel()
        return pd.DataFrame(columns)

    def write_scan_csv(self, result: ScanResult, path: str | Path, value_column: Optional[str] = None) -> Path:
        return self.write_table(self.scan_frame(result, value_column), path, self.meta_for(result))

    # ── JSON ──────────────────────────────────────────────────────────────────

    def write_scan_json(self, result: ScanResult, path: str | Path) -> Path:
        record = result.to_dict()
        record["meta"] = self.meta_for(result)
        return self.write_record(record, path)

    def write_record(self, record: Dict[str, Any], path: str | Path) -> Path:
        path = self._ensure_parent(Path(path))
        path.write_text(dumps(record), encoding="utf-8")
        log.info(f"JSON → {path}")
        return path

    def emit(self, record: Dict[str, Any], stream: Optional[TextIO] = None) -> None:
        """Запись в stdout: логи идут в stderr, stdout остаётся для данных."""
        (stream or sys.stdout).write(dumps(record))

    # ── Сводка ────────────────────────────────────────────────────────────────

    @staticmethod
    def log_summary(title: str, result: ScanResult) -> None:
        log.info("=" * 60)
        log.info(title)
        log.info("=" * 60)
        log.info(f"Ячеек: {result.values.size}, пропущено: {result.missing_cells}")
        for e in result.extrema:
            where = ", ".join(f"{k}={v:.6g}" for k, v in e.location.items())
            log.info(f"  {e.kind}: {e.value:.10f}  ({where})")
        log.info("=" * 60)
