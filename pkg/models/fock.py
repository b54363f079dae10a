"""
Типы данных усечённого фоковского пространства.

FockVector     — чистое одномодовое состояние (амплитуды по |0⟩..|dim−1⟩).
DenseOperator  — плотная матрица на одной моде (или на совместном пространстве).
MultiModeState — чистое состояние или матрица плотности на тензорном произведении мод
                 (строчный порядок, мода 0 — самая «медленная»).
ProductMixture — сепарабельная смесь Σ_k w_k ⊗_m |ψ_km⟩⟨ψ_km|; совместная матрица
                 плотности не строится.
ParitySetting  — исход (чётный=0 / нечётный=1) и вещественное смещение.

Все значения неизменяемы после создания: массивы помечаются read-only.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from models.config import HERMITIAN_TOL, NORM_TOL
from models.errors import (
    DimensionMismatch,
    FockError,
    InvalidDim,
    NumericalConsistencyError,
    OutOfRange,
    StateFileError,
)

SCHEMA_VERSION = 1
MIN_EIGENVALUE = -1e-10
MAX_MATERIALIZED_DIM = 4096


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def check_dim(dim: int) -> int:
    if isinstance(dim, bool) or int(dim) != dim or dim < 2:
        raise InvalidDim(f"размерность усечения должна быть целым ≥ 2, получено {dim!r}")
    return int(dim)


def real_displacement(value: Any) -> float:
    """Публичный API принимает только вещественные конечные смещения."""
    if isinstance(value, (complex, np.complexfloating)):
        raise OutOfRange(f"допускаются только вещественные смещения, получено {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise OutOfRange(f"смещение должно быть конечным, получено {value}")
    return value


# ── Измерение чётности ────────────────────────────────────────────────────────

class Parity(IntEnum):
    EVEN = 0
    ODD = 1

    @classmethod
    def parse(cls, value: Union["Parity", int, str]) -> "Parity":
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("even", "0", "+"):
                return cls.EVEN
            if key in ("odd", "1", "-"):
                return cls.ODD
            raise OutOfRange(f"исход чётности: ожидается even/odd или 0/1, получено {value!r}")
        if value in (0, 1):
            return cls(int(value))
        raise OutOfRange(f"исход чётности: ожидается 0 или 1, получено {value!r}")

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class ParitySetting:
    outcome: Parity
    displacement: float

    def __post_init__(self):
        object.__setattr__(self, "outcome", Parity.parse(self.outcome))
        object.__setattr__(self, "displacement", real_displacement(self.displacement))

    def mirrored(self) -> "ParitySetting":
        return ParitySetting(self.outcome, -self.displacement)

    def to_dict(self) -> Dict[str, Any]:
        return {"outcome": int(self.outcome), "displacement": self.displacement}


# ── Одномодовые объекты ───────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class FockVector:
    amps: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).ravel()
        check_dim(amps.size)
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise NumericalConsistencyError(f"норма вектора {norm!r} отличается от 1")
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def normalized(cls, amps: Sequence[complex], tail: float = 0.0) -> "FockVector":
        amps = np.asarray(amps, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NumericalConsistencyError("нулевой вектор нельзя нормировать")
        return cls(amps / norm, tail=tail)

    @property
    def dim(self) -> int:
        return self.amps.size


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatch(f"оператор должен быть квадратной матрицей, форма {entries.shape}")
        check_dim(entries.shape[0])
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol


# ── Многомодовые состояния ────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class MultiModeState:
    dims: Tuple[int, ...]
    kind: str
    data: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        dims = tuple(check_dim(d) for d in self.dims)
        if not dims:
            raise DimensionMismatch("состояние должно содержать хотя бы одну моду")
        object.__setattr__(self, "dims", dims)
        total = int(np.prod(dims))
        data = np.array(self.data, dtype=complex)

        if self.kind == "pure":
            data = data.ravel()
            if data.size != total:
                raise DimensionMismatch(f"ожидалось {total} амплитуд, получено {data.size}")
            norm = float(np.linalg.norm(data))
            if abs(norm - 1.0) > NORM_TOL:
                raise NumericalConsistencyError(f"норма состояния {norm!r} отличается от 1")
        elif self.kind == "density":
            data = data.reshape(total, total) if data.size == total * total else data
            if data.shape != (total, total):
                raise DimensionMismatch(f"ожидалась матрица {total}×{total}, форма {data.shape}")
            herm = float(np.max(np.abs(data - data.conj().T)))
            if herm > HERMITIAN_TOL:
                raise NumericalConsistencyError(f"матрица плотности не эрмитова: {herm:.3e}")
            trace = complex(np.trace(data))
            if abs(trace - 1.0) > NORM_TOL:
                raise NumericalConsistencyError(f"след матрицы плотности {trace!r} отличается от 1")
            smallest = float(np.linalg.eigvalsh(0.5 * (data + data.conj().T))[0])
            if smallest < MIN_EIGENVALUE:
                raise NumericalConsistencyError(f"отрицательное собственное значение {smallest:.3e}")
        else:
            raise FockError(f"неизвестный вид состояния: {self.kind!r}")

        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def from_vector(cls, vector: FockVector) -> "MultiModeState":
        return cls((vector.dim,), "pure", vector.amps, tail=vector.tail)

    @property
    def modes(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def tensor(self) -> np.ndarray:
        """Амплитуды (dims) для чистого состояния, ρ формы dims + dims для смешанного."""
        if self.kind == "pure":
            return self.data.reshape(self.dims)
        return self.data.reshape(self.dims + self.dims)

    def density_matrix(self) -> np.ndarray:
        if self.kind == "density":
            return self.data
        return np.outer(self.data, self.data.conj())


@dataclass(frozen=True, eq=False)
class ProductMixture:
    weights: np.ndarray
    terms: Tuple[Tuple[FockVector, ...], ...]

    kind = "product_mixture"

    def __post_init__(self):
        terms = tuple(tuple(term) for term in self.terms)
        weights = np.array(self.weights, dtype=float).ravel()
        if not terms or not terms[0]:
            raise DimensionMismatch("смесь должна содержать хотя бы одно слагаемое")
        if weights.size != len(terms):
            raise DimensionMismatch(f"{weights.size} весов на {len(terms)} слагаемых")
        dims = tuple(v.dim for v in terms[0])
        for term in terms:
            if tuple(v.dim for v in term) != dims:
                raise DimensionMismatch("все слагаемые смеси должны иметь одинаковые размерности мод")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > NORM_TOL:
            raise NumericalConsistencyError("веса смеси должны быть неотрицательны и в сумме давать 1")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def from_terms(cls, weights: Sequence[float], terms: Sequence[Sequence[FockVector]]) -> "ProductMixture":
        weights = np.asarray(weights, dtype=float)
        return cls(weights / weights.sum(), tuple(tuple(t) for t in terms))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(v.dim for v in self.terms[0])

    @property
    def modes(self) -> int:
        return len(self.terms[0])

    @property
    def tail(self) -> float:
        return max(v.tail for term in self.terms for v in term)

    def to_density(self) -> MultiModeState:
        total = int(np.prod(self.dims))
        if total > MAX_MATERIALIZED_DIM:
            raise DimensionMismatch(f"совместное пространство {total} слишком велико для матрицы плотности")
        rho = np.zeros((total, total), dtype=complex)
        for w, term in zip(self.weights, self.terms):
            psi = term[0].amps
            for v in term[1:]:
                psi = np.kron(psi, v.amps)
            rho += w * np.outer(psi, psi.conj())
        return MultiModeState(self.dims, "density", 0.5 * (rho + rho.conj().T), tail=self.tail)


State = Union[MultiModeState, ProductMixture]


# ── Файлы состояний (JSON) ────────────────────────────────────────────────────

def _to_pairs(array: np.ndarray) -> list:
    return np.stack([array.real, array.imag], axis=-1).tolist()


def _from_pairs(obj: Any, shape: Tuple[int, ...]) -> np.ndarray:
    pairs = np.asarray(obj, dtype=float)
    if pairs.ndim == 0 or pairs.shape[-1] != 2:
        raise StateFileError("данные должны быть массивами пар [re, im]")
    values = pairs[..., 0] + 1j * pairs[..., 1]
    if values.size != int(np.prod(shape)):
        raise StateFileError(f"ожидалось {int(np.prod(shape))} комплексных чисел, получено {values.size}")
    return values.reshape(shape)


def state_to_dict(state: State) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "modes": state.modes,
        "dims": list(state.dims),
        "kind": state.kind,
    }
    if isinstance(state, ProductMixture):
        record["weights"] = state.weights.tolist()
        record["terms"] = [[_to_pairs(v.amps) for v in term] for term in state.terms]
    else:
        record["data"] = _to_pairs(state.data)
    return record


def state_from_dict(c: Dict[str, Any]) -> State:
    try:
        if c.get("schema_version") != SCHEMA_VERSION:
            raise StateFileError(f"неподдерживаемая schema_version: {c.get('schema_version')!r}")
        dims = tuple(int(d) for d in c["dims"])
        if int(c["modes"]) != len(dims):
            raise StateFileError(f"modes={c['modes']} не совпадает с числом размерностей {len(dims)}")
        kind = c["kind"]
        if kind == "product_mixture":
            terms = [
                tuple(FockVector(_from_pairs(amps, (d,))) for amps, d in zip(term, dims))
                for term in c["terms"]
            ]
            return ProductMixture(np.asarray(c["weights"], dtype=float), tuple(terms))
        total = int(np.prod(dims))
        shape = (total,) if kind == "pure" else (total, total)
        return MultiModeState(dims, kind, _from_pairs(c["data"], shape))
    except StateFileError:
        raise
    except KeyError as e:
        raise StateFileError(f"в файле состояния нет поля {e.args[0]!r}")
    except (FockError, TypeError, ValueError) as e:
        raise StateFileError(f"некорректное состояние: {e}")


def load_state(path: Union[str, Path]) -> State:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise StateFileError(f"{path.name}: файл не в UTF-8 (байт {e.start})")
    try:
        c = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"{path.name}: некорректный JSON: {e.msg}", line=e.lineno, column=e.colno)
    if not isinstance(c, dict):
        raise StateFileError(f"{path.name}: ожидался JSON-объект")
    return state_from_dict(c)


def save_state(state: State, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(state_to_dict(state), f)
        f.write("\n")
    return path
