"""
Линейная алгебра в усечённом фоковском пространстве: когерентные состояния,
операторы смещения, смещённые проекторы чётности, средние и частичные следы.

Операторы на совместном пространстве никогда не строятся как кронекеровы
произведения: каждый модовый оператор сворачивается со своим индексом тензора.
"""
from __future__ import annotations

import logging
from functools import lru_cache, reduce
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.special import pdtrc

from models.config import DEFAULT_TAIL_TOL, HERMITIAN_TOL, PROB_NOISE
from models.errors import (
    DimensionMismatch,
    InvalidDim,
    NonHermitianOperator,
    NumericalConsistencyError,
    TruncationError,
)
from models.fock import (
    DenseOperator,
    FockVector,
    MultiModeState,
    Parity,
    ParitySetting,
    ProductMixture,
    State,
    check_dim,
    real_displacement,
)

log = logging.getLogger(__name__)

IMAG_TOL        = 1e-10
_PROJECTOR_CACHE = 256


# ── Усечение ──────────────────────────────────────────────────────────────────

def truncation_tail(beta: float, dim: int) -> float:
    """Масса пуассоновского распределения (среднее β²) на номерах ≥ dim."""
    return float(pdtrc(dim - 1, float(beta) ** 2))


def _checked_tail(beta: float, dim: int, tail_tol: float) -> float:
    tail = truncation_tail(beta, dim)
    if tail >= tail_tol:
        raise TruncationError(
            f"хвост за усечением dim={dim} для смещения {beta} равен {tail:.3e} "
            f"(допуск {tail_tol:.1e}); увеличьте dim"
        )
    return tail


def as_state(state: Union[State, FockVector]) -> State:
    if isinstance(state, FockVector):
        return MultiModeState.from_vector(state)
    return state


# ── Состояния ─────────────────────────────────────────────────────────────────

def coherent_state(gamma: float, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """|γ⟩ = e^{−γ²/2} Σ γ^m/√m! |m⟩, перенормированное на усечённом базисе."""
    dim = check_dim(dim)
    gamma = real_displacement(gamma)
    tail = _checked_tail(gamma, dim, tail_tol)
    ratios = gamma / np.sqrt(np.arange(1, dim, dtype=float))
    amps = np.exp(-0.5 * gamma**2) * np.concatenate(([1.0], np.cumprod(ratios)))
    return FockVector.normalized(amps, tail=tail)


def fock_state(n: int, dim: int) -> FockVector:
    dim = check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDim(f"|{n}⟩ не помещается в усечение dim={dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def product_state(vectors: Sequence[FockVector]) -> MultiModeState:
    """Чистое произведение; мода 0 — самый медленный индекс."""
    if not vectors:
        raise DimensionMismatch("нужен хотя бы один вектор")
    data = reduce(np.kron, [v.amps for v in vectors])
    return MultiModeState(
        tuple(v.dim for v in vectors), "pure", data / np.linalg.norm(data),
        tail=max(v.tail for v in vectors),
    )


# ── Операторы ─────────────────────────────────────────────────────────────────

@lru_cache(maxsize=64)
def _displacement_entries(beta: float, dim: int) -> np.ndarray:
    """Матричные элементы ⟨m|D(β)|n⟩ по двучленной рекурсии.

    Из D a† = (a† − β*) D:  ⟨m|D|n⟩ = (√m ⟨m−1|D|n−1⟩ − β* ⟨m|D|n−1⟩) / √n,
    первый столбец — амплитуды когерентного состояния |β⟩.
    Каждый элемент совпадает с бесконечномерным, усечение не портит края.
    """
    sqrt = np.sqrt(np.arange(dim, dtype=float))
    entries = np.zeros((dim, dim), dtype=complex)
    entries[0, 0] = np.exp(-0.5 * beta**2)
    for m in range(1, dim):
        entries[m, 0] = beta / sqrt[m] * entries[m - 1, 0]
    for n in range(1, dim):
        entries[0, n] = -beta * entries[0, n - 1] / sqrt[n]
        entries[1:, n] = (sqrt[1:] * entries[:-1, n - 1] - beta * entries[1:, n - 1]) / sqrt[n]
    entries.setflags(write=False)
    return entries


def displacement_operator(beta: float, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> DenseOperator:
    dim = check_dim(dim)
    beta = real_displacement(beta)
    tail = _checked_tail(beta, dim, tail_tol)
    return DenseOperator(_displacement_entries(beta, dim), tail=tail)


def displacement_operator_expm(beta: float, dim: int) -> DenseOperator:
    """exp(β a† − β a) на усечённом базисе (Паде со scaling-and-squaring).

    Оставлен как независимый оракул: у края базиса расходится с точными
    матричными элементами, в младшем блоке совпадает.
    """
    dim = check_dim(dim)
    beta = real_displacement(beta)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return DenseOperator(scipy.linalg.expm(beta * (a.T - a)), tail=truncation_tail(beta, dim))


@lru_cache(maxsize=_PROJECTOR_CACHE)
def _even_projector(beta: float, dim: int) -> np.ndarray:
    D = _displacement_entries(beta, dim)
    even = (np.arange(dim) % 2 == 0).astype(float)
    proj = (D * even) @ D.conj().T
    proj = 0.5 * (proj + proj.conj().T)
    proj.setflags(write=False)
    return proj


@lru_cache(maxsize=_PROJECTOR_CACHE)
def _odd_projector(beta: float, dim: int) -> np.ndarray:
    proj = np.eye(dim) - _even_projector(beta, dim)
    proj.setflags(write=False)
    return proj


def parity_projector(setting: ParitySetting, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> DenseOperator:
    """Π±(β) = D(β) P± D(β)†;  Π⁻ = I − Π⁺ по построению."""
    dim = check_dim(dim)
    beta = setting.displacement
    tail = _checked_tail(beta, dim, tail_tol)
    if setting.outcome == Parity.EVEN:
        return DenseOperator(_even_projector(beta, dim), tail=tail)
    return DenseOperator(_odd_projector(beta, dim), tail=tail)


def wigner_observable(beta: float, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> DenseOperator:
    """Ŵ(β) = Π⁺(β) − Π⁻(β)."""
    even = parity_projector(ParitySetting(Parity.EVEN, beta), dim, tail_tol)
    return DenseOperator(2.0 * even.entries - np.eye(dim), tail=even.tail)


def number_operator(dim: int) -> DenseOperator:
    return DenseOperator(np.diag(np.arange(check_dim(dim), dtype=float)))


# ── Средние ───────────────────────────────────────────────────────────────────

def clamp_probability(value: float) -> float:
    if value < -PROB_NOISE or value > 1.0 + PROB_NOISE:
        raise NumericalConsistencyError(f"вероятность {value!r} вне [0, 1] сверх шума {PROB_NOISE}")
    return min(max(value, 0.0), 1.0)


def _apply_local(tensor: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, tensor, axes=([1], [axis])), 0, axis)


def _check_ops(dims: Sequence[int], ops: Sequence[Optional[DenseOperator]], probability: bool) -> None:
    if len(ops) != len(dims):
        raise DimensionMismatch(f"{len(ops)} операторов на {len(dims)} мод")
    for mode, (dim, op) in enumerate(zip(dims, ops)):
        if op is None:
            continue
        if op.dim != dim:
            raise DimensionMismatch(f"мода {mode}: оператор {op.dim}×{op.dim}, усечение {dim}")
        if probability and not op.is_hermitian(HERMITIAN_TOL):
            raise NonHermitianOperator(
                f"мода {mode}: отклонение от эрмитовости {op.hermiticity_error():.3e}"
            )


def expectation(
    state: Union[State, FockVector],
    ops: Sequence[Optional[DenseOperator]],
    probability: bool = False,
) -> float:
    """Tr[ρ (⊗ ops)] сверткой по модам; None — единичный оператор."""
    state = as_state(state)
    ops = list(ops)
    _check_ops(state.dims, ops, probability)

    if isinstance(state, ProductMixture):
        value = 0.0 + 0.0j
        for w, term in zip(state.weights, state.terms):
            factor = 1.0 + 0.0j
            for vec, op in zip(term, ops):
                if op is not None:
                    factor *= np.vdot(vec.amps, op.entries @ vec.amps)
            value += w * factor
    elif state.kind == "pure":
        psi = state.tensor()
        phi = psi
        for axis, op in enumerate(ops):
            if op is not None:
                phi = _apply_local(phi, op.entries, axis)
        value = np.vdot(psi, phi)
    else:
        rho = state.tensor()
        for axis, op in enumerate(ops):
            if op is not None:
                rho = _apply_local(rho, op.entries, axis)
        value = np.trace(rho.reshape(state.total_dim, state.total_dim))

    if abs(value.imag) > IMAG_TOL:
        raise NumericalConsistencyError(f"мнимая часть среднего {value.imag:.3e} превышает {IMAG_TOL}")
    value = float(value.real)
    return clamp_probability(value) if probability else value


def mean_photon_number(state: Union[State, FockVector], mode: int = 0) -> float:
    state = as_state(state)
    ops: List[Optional[DenseOperator]] = [None] * state.modes
    ops[mode] = number_operator(state.dims[mode])
    return expectation(state, ops)


def wigner_value(state: Union[State, FockVector], beta: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Функция Вигнера одномодового состояния в точке (β, 0): (2/π)⟨Ŵ(β)⟩."""
    state = as_state(state)
    if state.modes != 1:
        raise DimensionMismatch("функция Вигнера считается для одной моды")
    return 2.0 / np.pi * expectation(state, [wigner_observable(beta, state.dims[0], tail_tol)])


# ── Частичный след ────────────────────────────────────────────────────────────

def _keep_modes(modes: int, keep: Iterable[int]) -> List[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= modes:
        raise DimensionMismatch(f"набор мод {keep} не является непустым подмножеством 0..{modes - 1}")
    return keep


def marginal(state: State, keep: Iterable[int]) -> State:
    """Частичный след по отброшенным модам.

    Для MultiModeState результат — матрица плотности; сепарабельная смесь
    остаётся смесью (ограничиваются сомножители).
    """
    keep = _keep_modes(state.modes, keep)

    if isinstance(state, ProductMixture):
        terms = tuple(tuple(term[k] for k in keep) for term in state.terms)
        return ProductMixture(state.weights, terms)

    kept_dims = tuple(state.dims[k] for k in keep)
    n_kept = int(np.prod(kept_dims))
    discard = [m for m in range(state.modes) if m not in keep]

    if state.kind == "pure":
        psi = state.tensor()
        rho = np.tensordot(psi, psi.conj(), axes=(discard, discard))
    else:
        ket = list(range(state.modes))
        bra = [m + state.modes if m in keep else m for m in range(state.modes)]
        out = keep + [k + state.modes for k in keep]
        rho = np.einsum(state.tensor(), ket + bra, out)

    rho = rho.reshape(n_kept, n_kept)
    return MultiModeState(kept_dims, "density", 0.5 * (rho + rho.conj().T), tail=state.tail)


def conditional_block(state: State, op: DenseOperator, op_mode: int, keep: int) -> np.ndarray:
    """Ненормированное состояние моды keep после оператора op на моде op_mode.

    σ = Tr_{≠keep}[(op ⊗ I) ρ];  Tr σ = ⟨op⟩,  Tr[σ B] = ⟨op ⊗ B⟩.
    Для сканов: σ считается один раз на настройку op, каждая ячейка — след O(dim²).
    """
    state = as_state(state)
    if op_mode == keep:
        raise DimensionMismatch("оператор и оставляемая мода должны различаться")
    _keep_modes(state.modes, [op_mode, keep])
    ops: List[Optional[DenseOperator]] = [None] * state.modes
    ops[op_mode] = op
    _check_ops(state.dims, ops, probability=False)

    if isinstance(state, ProductMixture):
        sigma = np.zeros((state.dims[keep],) * 2, dtype=complex)
        for w, term in zip(state.weights, state.terms):
            vec, kept = term[op_mode], term[keep].amps
            sigma += w * np.vdot(vec.amps, op.entries @ vec.amps) * np.outer(kept, kept.conj())
        return sigma

    others = [m for m in range(state.modes) if m != keep]
    if state.kind == "pure":
        psi = state.tensor()
        phi = _apply_local(psi, op.entries, op_mode)
        return np.tensordot(phi, psi.conj(), axes=(others, others))

    rho = _apply_local(state.tensor(), op.entries, op_mode)
    ket = list(range(state.modes))
    bra = [m + state.modes if m == keep else m for m in range(state.modes)]
    return np.einsum(rho, ket + bra, [keep, keep + state.modes])


def block_expectation(sigma: np.ndarray, op: DenseOperator) -> float:
    """Tr[σ op] для блока из conditional_block."""
    value = np.sum(sigma * op.entries.T)
    if abs(value.imag) > IMAG_TOL:
        raise NumericalConsistencyError(f"мнимая часть среднего {value.imag:.3e} превышает {IMAG_TOL}")
    return float(value.real)
