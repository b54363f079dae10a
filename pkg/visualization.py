"""
Генерация gnuplot-скриптов к данным сканов (рисунки 1 и 2).

Изображения не рендерятся: рядом с CSV кладётся текстовый скрипт,
`gnuplot fig1.gp` строит график из этих данных.
"""

from __future__ import annotations

import logging
import traceback
from pathlib import Path
from typing import Callable, List, Optional, Tuple

from models.scan import ScanResult

log = logging.getLogger(__name__)

# ─── Оформление ──────────────────────────────────────────────────────────────
_TERMINAL   = "pngcairo size 900,600 enhanced font 'DejaVu Sans,11'"
_UPPER      = 0.75
_LOWER      = 0.25


class PlotScripts:
    """Скрипты gnuplot для CSV, записанных ScanLogger."""

    def __init__(self, terminal: str = _TERMINAL):
        self.terminal = terminal

    # ── Вспомогательные методы ────────────────────────────────────────────────

    def _preamble(self, data: Path, image: Path, title: str) -> List[str]:
        return [
            f"# данные: {data.name}",
            f"set terminal {self.terminal}",
            f"set output '{image.name}'",
            "set datafile separator ','",
            "set datafile commentschars '#'",
            "set key autotitle columnhead",
            f"set title \"{title}\"",
            "set grid",
            f"data = '{data.name}'",
        ]

    @staticmethod
    def _bounds() -> List[str]:
        return [
            f"set arrow from graph 0, first {_UPPER} to graph 1, first {_UPPER} nohead dashtype 2",
            f"set arrow from graph 0, first {_LOWER} to graph 1, first {_LOWER} nohead dashtype 2",
        ]

    @staticmethod
    def _write(path: Path, lines: List[str]) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    # ── Рисунок 1 ─────────────────────────────────────────────────────────────

    def fig1_script(self, data: Path, script: Path) -> Path:
        """sup_β чётной и inf_β нечётной определённости как функции γ."""
        lines = self._preamble(data, script.with_suffix(".png"), "Средняя определённость смещённой чётности")
        lines += self._bounds()
        lines += [
            "set xlabel 'γ'",
            "set ylabel '½[P(b_β) + P(b_{−β})]'",
            "set yrange [0:1]",
            "plot data using (column('gamma')):(column('even_sup')) with lines lw 2 title 'чётная, sup_β', \\",
            "     data using (column('gamma')):(column('odd_inf')) with lines lw 2 dashtype 3 title 'нечётная, inf_β'",
        ]
        return self._write(script, lines)

    # ── Рисунок 2 ─────────────────────────────────────────────────────────────

    def steering_script(self, data: Path, script: Path, result: ScanResult) -> Path:
        """Функционал управляемости от β при α, дающем максимум скана."""
        best = result.extremum
        alpha = best.location["alpha"]
        title = f"Функционал управляемости, b={result.meta.get('b')}, a={result.meta.get('a')}, α={alpha:.6g}"
        lines = self._preamble(data, script.with_suffix(".png"), title)
        lines += self._bounds()
        lines += [
            f"alpha_best = {alpha!r}",
            "set xlabel 'β'",
            "set ylabel '½[P(b_β|a_α) + P(b_{−β}|a_{−α})]'",
            "set yrange [0:1]",
            "plot data using (column('alpha') == alpha_best ? column('beta') : NaN):(column('steering')) "
            "with linespoints pt 7 ps 0.4 title sprintf('α = %g', alpha_best)",
        ]
        return self._write(script, lines)

    # ── Все скрипты ───────────────────────────────────────────────────────────

    def create_all_scripts(self, tasks: List[Tuple[Path, Callable[[Path], Optional[Path]]]]) -> List[Path]:
        log.info("=" * 60)
        log.info("СОЗДАНИЕ СКРИПТОВ ГРАФИКОВ")
        log.info("=" * 60)

        created: List[Path] = []
        for filepath, build in tasks:
            try:
                result = build(filepath)
                if result is not None:
                    created.append(result)
            except Exception:
                log.error(f"Ошибка при создании {filepath.name}:\n{traceback.format_exc()}")

        log.info(f"Создано скриптов: {len(created)} / {len(tasks)}")
        log.info("=" * 60)
        return created
