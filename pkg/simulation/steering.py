"""
Управляемость (steering) по смещённой чётности.

Функционал ½[P(b_{β₁}|a_{α₁}) + P(b_{β₂}|a_{α₂})] ограничен отрезком [¼, ¾]
для моделей с локальными скрытыми состояниями; выход за отрезок
свидетельствует об управляемости. Здесь же — состояния N00N и скан по (α, β).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from models.config import (
    DEFAULT_BOUND_TOL,
    DEFAULT_TAIL_TOL,
    MIN_CONDITIONING,
    auto_dim,
)
from models.errors import DegenerateConditioning, DimensionMismatch, InvalidDim, OutOfRange
from models.fock import MultiModeState, Parity, ParitySetting, State, check_dim
from models.scan import ScanResult, as_grid, find_extremum
from simulation.fock_core import (
    block_expectation,
    clamp_probability,
    conditional_block,
    expectation,
    parity_projector,
)

log = logging.getLogger(__name__)

UPPER_BOUND = 0.75
LOWER_BOUND = 0.25

Outcome = Union[Parity, int, str]


# ── Настройки и отчёт ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SteeringSettings:
    alice: Tuple[ParitySetting, ParitySetting]
    bob: Tuple[ParitySetting, ParitySetting]

    def __post_init__(self):
        if len(self.alice) != 2 or len(self.bob) != 2:
            raise OutOfRange("нужны ровно две настройки у каждой стороны")
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alice": [s.to_dict() for s in self.alice],
            "bob": [s.to_dict() for s in self.bob],
        }


def paired_settings(alpha: float, beta: float, a: Outcome, b: Outcome) -> SteeringSettings:
    """Соглашение рисунка: (α, −α) у Алисы и (β, −β) у Боба."""
    sa = ParitySetting(a, alpha)
    sb = ParitySetting(b, beta)
    return SteeringSettings(alice=(sa, sa.mirrored()), bob=(sb, sb.mirrored()))


@dataclass(frozen=True)
class SteeringReport:
    value: float
    violated: bool
    side: str           # "upper" | "lower" | "none"
    margin: float       # max(value − ¾, ¼ − value)
    settings: SteeringSettings
    tolerance: float = DEFAULT_BOUND_TOL

    @classmethod
    def evaluate(cls, value: float, settings: SteeringSettings,
                 tolerance: float = DEFAULT_BOUND_TOL) -> "SteeringReport":
        if value > UPPER_BOUND + tolerance:
            side = "upper"
        elif value < LOWER_BOUND - tolerance:
            side = "lower"
        else:
            side = "none"
        return cls(
            value=value,
            violated=side != "none",
            side=side,
            margin=max(value - UPPER_BOUND, LOWER_BOUND - value),
            settings=settings,
            tolerance=tolerance,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "violated": self.violated,
            "side": self.side,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "settings": self.settings.to_dict(),
        }


# ── Состояния N00N ────────────────────────────────────────────────────────────

def _photon_number(N: int) -> int:
    if int(N) != N or N < 1:
        raise OutOfRange(f"N должно быть целым ≥ 1, получено {N!r}")
    return int(N)


def noon_state(N: int, dim: int) -> MultiModeState:
    """(|N,0⟩ − |0,N⟩)/√2, мода 0 — Алиса."""
    dim = check_dim(dim)
    N = _photon_number(N)
    if dim <= N:
        raise InvalidDim(f"усечение dim={dim} не вмещает |{N}⟩")
    data = np.zeros(dim * dim, dtype=complex)
    data[N * dim] = 1.0 / math.sqrt(2.0)
    data[N] = -1.0 / math.sqrt(2.0)
    return MultiModeState((dim, dim), "pure", data)


def noon_auto_dim(N: int, alpha_max: float, beta_max: float) -> int:
    """Автоусечение для N00N: пик числа фотонов N играет роль γ²."""
    return auto_dim(math.sqrt(_photon_number(N)), max(abs(alpha_max), abs(beta_max)))


@dataclass(frozen=True)
class NoonCase:
    b: Parity
    a: Parity
    side: str

    def to_dict(self) -> Dict[str, Any]:
        return {"b": int(self.b), "a": int(self.a), "side": self.side}


def noon_case_table(N: int) -> List[NoonCase]:
    """Комбинации исходов (b, a), дающие максимальное нарушение при |β| → 0."""
    N = _photon_number(N)
    E, O = Parity.EVEN, Parity.ODD
    if N % 2 == 0:
        upper, lower = [(E, E), (E, O)], [(O, E), (O, O)]
    else:
        upper, lower = [(E, O), (O, E)], [(E, E), (O, O)]
    return [NoonCase(b, a, "upper") for b, a in upper] + [NoonCase(b, a, "lower") for b, a in lower]


# ── Вероятности ───────────────────────────────────────────────────────────────

def check_modes(state: State, modes: Sequence[int]) -> None:
    """Моды существуют и попарно различны."""
    if len(modes) > state.modes:
        raise DimensionMismatch(f"нужно мод: {len(modes)}, в состоянии: {state.modes}")
    for mode in modes:
        if not 0 <= mode < state.modes:
            raise DimensionMismatch(f"мода {mode} вне 0..{state.modes - 1}")
    if len(set(modes)) != len(modes):
        raise DimensionMismatch(f"моды должны различаться: {tuple(modes)}")


def _local_ops(state: State, settings: Dict[int, ParitySetting], tail_tol: float) -> list:
    check_modes(state, list(settings))
    ops: list = [None] * state.modes
    for mode, setting in settings.items():
        ops[mode] = parity_projector(setting, state.dims[mode], tail_tol)
    return ops


def joint_parity_prob(
    state: State,
    a: ParitySetting,
    b: ParitySetting,
    modes: Tuple[int, int] = (0, 1),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    """Tr[ρ (Π^a(α) ⊗ Π^b(β))]; modes — индексы мод Алисы и Боба."""
    check_modes(state, modes)
    ops = _local_ops(state, {modes[0]: a, modes[1]: b}, tail_tol)
    return expectation(state, ops, probability=True)


def marginal_parity_prob(
    state: State, setting: ParitySetting, mode: int = 0, tail_tol: float = DEFAULT_TAIL_TOL
) -> float:
    return expectation(state, _local_ops(state, {mode: setting}, tail_tol), probability=True)


def _require_conditioning(marginal: float, setting: ParitySetting) -> None:
    if marginal < MIN_CONDITIONING:
        raise DegenerateConditioning(
            f"P(a={int(setting.outcome)}, α={setting.displacement}) = {marginal:.3e} < {MIN_CONDITIONING}"
        )


def _conditional(joint: float, marginal: float, setting: ParitySetting) -> float:
    _require_conditioning(marginal, setting)
    # joint ≤ marginal
    return float(np.clip(min(joint, marginal) / marginal, 0.0, 1.0))


def conditional_prob(
    state: State,
    b: ParitySetting,
    a: ParitySetting,
    modes: Tuple[int, int] = (0, 1),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    """P(b_β | a_α) = P(a, b) / P(a)."""
    check_modes(state, modes)
    marginal = marginal_parity_prob(state, a, modes[0], tail_tol)
    _require_conditioning(marginal, a)
    joint = joint_parity_prob(state, a, b, modes, tail_tol)
    return _conditional(joint, marginal, a)


def steering_sum(
    state: State,
    settings: SteeringSettings,
    modes: Tuple[int, int] = (0, 1),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    """P(b_{β₁}|a_{α₁}) + P(b_{β₂}|a_{α₂}) — сумма условных вероятностей без множителя ½."""
    return sum(
        conditional_prob(state, b, a, modes, tail_tol)
        for a, b in zip(settings.alice, settings.bob)
    )


def steering_functional(
    state: State,
    settings: SteeringSettings,
    tolerance: float = DEFAULT_BOUND_TOL,
    modes: Tuple[int, int] = (0, 1),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> SteeringReport:
    value = 0.5 * steering_sum(state, settings, modes, tail_tol)
    return SteeringReport.evaluate(value, settings, tolerance)


# ── Скан по (α, β) ────────────────────────────────────────────────────────────

def violation_search(
    state: State,
    alpha_grid: Sequence[float],
    beta_grid: Sequence[float],
    b: Outcome,
    a: Outcome,
    tolerance: float = DEFAULT_BOUND_TOL,
    modes: Tuple[int, int] = (0, 1),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ScanResult:
    """Функционал на сетке с настройками ((α, −α), (β, −β)).

    Ячейки с вырожденным условием хранятся как NaN и не прерывают скан.
    """
    alphas = as_grid(alpha_grid, "alpha")
    betas = as_grid(beta_grid, "beta")
    a, b = Parity.parse(a), Parity.parse(b)
    check_modes(state, modes)
    alice_mode, bob_mode = modes
    bob_dim = state.dims[bob_mode]

    # Проекторы Боба общие для всех строк
    bob_ops = [
        (parity_projector(ParitySetting(b, beta), bob_dim, tail_tol),
         parity_projector(ParitySetting(b, -beta), bob_dim, tail_tol))
        for beta in betas
    ]

    values = np.full((alphas.size, betas.size), np.nan)
    for i, alpha in enumerate(alphas):
        blocks = []
        for setting in (ParitySetting(a, alpha), ParitySetting(a, -alpha)):
            op = parity_projector(setting, state.dims[alice_mode], tail_tol)
            sigma = conditional_block(state, op, alice_mode, bob_mode)
            blocks.append((sigma, clamp_probability(float(np.trace(sigma).real)), setting))
        if any(p < MIN_CONDITIONING for _, p, _ in blocks):
            log.debug(f"α={alpha}: вырожденное условие, строка пропущена")
            continue
        for j, (bob_plus, bob_minus) in enumerate(bob_ops):
            total = 0.0
            for (sigma, p_a, setting), op in zip(blocks, (bob_plus, bob_minus)):
                joint = clamp_probability(block_expectation(sigma, op))
                total += _conditional(joint, p_a, setting)
            values[i, j] = 0.5 * total

    axes = {"alpha": alphas, "beta": betas}
    extrema = (find_extremum(axes, values, "max"), find_extremum(axes, values, "min"))
    best = extrema[0]
    log.debug(f"violation_search: max={best.value:.6f} в {best.location}")
    return ScanResult(
        axes=axes,
        values=values,
        extrema=extrema,
        meta={
            "functional": "steering",
            "b": int(b),
            "a": int(a),
            "dims": list(state.dims),
            "tolerance": tolerance,
            "max_margin_over_upper": best.value - UPPER_BOUND,
            "min_margin_under_lower": LOWER_BOUND - extrema[1].value,
        },
    )
