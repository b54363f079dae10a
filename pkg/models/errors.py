"""
Иерархия исключений фоковского симулятора.

Все ошибки наследуются от FockError; ошибки «плохого аргумента» дополнительно
являются ValueError, чтобы их можно было ловить привычным способом.
CLI отображает их в коды выхода в одном месте (simulation.runner).
"""
from __future__ import annotations

from typing import Optional


class FockError(Exception):
    """Базовая ошибка пакета."""


class TruncationError(FockError):
    """Хвост распределения за пределами усечения превышает допуск."""


class InvalidDim(FockError, ValueError):
    """Недопустимая размерность усечения."""


class DimensionMismatch(FockError, ValueError):
    """Размерности оператора и моды (или набор мод) не согласованы."""


class NonHermitianOperator(FockError):
    """Оператор, используемый как вероятность, не эрмитов."""


class NumericalConsistencyError(FockError):
    """Численный результат вышел за пределы шума округления."""


class DegenerateConditioning(FockError):
    """Условие с нулевой (< 1e-12) маргинальной вероятностью."""


class EmptyGrid(FockError, ValueError):
    """Пустая или нечисловая сетка параметров."""


class DegenerateScan(FockError):
    """Скан не содержит ни одной вычислимой ячейки."""


class OutOfRange(FockError, ValueError):
    """Аргумент вне области определения."""


class InvalidDistribution(FockError, ValueError):
    """Таблица не является распределением вероятностей."""


class ConfigError(FockError, ValueError):
    """Некорректная конфигурация запуска."""


class StateFileError(FockError):
    """Ошибка чтения файла состояния (с позицией для JSON)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (строка {line}, позиция {column})"
        super().__init__(message)
