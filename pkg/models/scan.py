"""
ScanResult — прямоугольная сетка значений функционала с метаданными.

Пропущенные ячейки (вырожденное условие) хранятся как NaN; при выгрузке
в JSON они становятся null, в CSV — пустым полем.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from models.errors import DegenerateScan, EmptyGrid

SCHEMA_VERSION = 1
TOOL_VERSION   = "0.1.0"


def as_grid(values: Any, name: str) -> np.ndarray:
    grid = np.asarray(values, dtype=float).ravel()
    if grid.size == 0:
        raise EmptyGrid(f"сетка {name} пуста")
    if not np.all(np.isfinite(grid)):
        raise EmptyGrid(f"сетка {name} содержит нечисловые значения")
    return grid


@dataclass(frozen=True)
class Extremum:
    value: float
    location: Dict[str, float]
    kind: str   # "max" | "min"

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "location": dict(self.location), "kind": self.kind}


def find_extremum(axes: Dict[str, np.ndarray], values: np.ndarray, kind: str) -> Extremum:
    """Глобальный максимум/минимум без NaN; при равенстве — первая ячейка в строчном порядке."""
    if np.all(np.isnan(values)):
        raise DegenerateScan("в скане нет ни одной вычислимой ячейки")
    flat = np.nanargmax(values) if kind == "max" else np.nanargmin(values)
    index = np.unravel_index(flat, values.shape)
    location = {name: float(grid[i]) for (name, grid), i in zip(axes.items(), index)}
    return Extremum(value=float(values[index]), location=location, kind=kind)


@dataclass(frozen=True, eq=False)
class ScanResult:
    axes: Dict[str, np.ndarray]
    values: np.ndarray
    extrema: Tuple[Extremum, ...]
    meta: Dict[str, Any] = field(default_factory=dict)
    extras: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(grid) for grid in self.axes.values())
        values = np.asarray(self.values, dtype=float)
        if values.size != int(np.prod(shape)):
            raise ValueError(f"{values.size} значений на сетку {shape}")
        values = values.reshape(shape)
        for name, column in self.extras.items():
            if np.asarray(column).size != values.size:
                raise ValueError(f"столбец {name!r} не совпадает по размеру с сеткой")
        finite = values[~np.isnan(values)]
        for e in self.extrema:
            if not np.any(finite == e.value):
                raise ValueError(f"экстремум {e.value!r} отсутствует среди значений")
        object.__setattr__(self, "values", values)
        meta = {"schema_version": SCHEMA_VERSION, "tool_version": TOOL_VERSION}
        meta.update(self.meta)
        meta["missing_cells"] = int(np.isnan(values).sum())
        object.__setattr__(self, "meta", meta)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def extremum(self) -> Optional[Extremum]:
        return self.extrema[0] if self.extrema else None

    @property
    def missing_cells(self) -> int:
        return self.meta["missing_cells"]

    def grid_columns(self) -> Dict[str, np.ndarray]:
        """Координаты каждой ячейки в строчном порядке (первая ось — самая медленная)."""
        mesh = np.meshgrid(*self.axes.values(), indexing="ij")
        return {name: m.ravel() for name, m in zip(self.axes, mesh)}

    def to_dict(self) -> Dict[str, Any]:
        def _nullable(array: np.ndarray) -> list:
            return [None if (isinstance(v, float) and np.isnan(v)) else v
                    for v in np.asarray(array).ravel().tolist()]

        return {
            "schema_version": SCHEMA_VERSION,
            "axes": {name: grid.tolist() for name, grid in self.axes.items()},
            "values": _nullable(self.values),
            "extremum": self.extremum.to_dict() if self.extremum else None,
            "extrema": [e.to_dict() for e in self.extrema],
            "extras": {name: _nullable(col) for name, col in self.extras.items()},
            "meta": self.meta,
        }
