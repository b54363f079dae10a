"""
Тонкое соотношение неопределённости для смещённой чётности.

average_certainty — ½[⟨Π^b(β)⟩ + ⟨Π^b(−β)⟩] для произвольной одномодовой моды,
check_fur         — то же плюс проверка границ [¼, ¾] и области применимости,
fig1_scan         — sup/inf по β средней определённости когерентных состояний,
fur_scan          — «сырая» проверка check_fur на сетке (γ, β) или β для файла состояния.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from models.config import (
    DEFAULT_BOUND_TOL,
    DEFAULT_TAIL_TOL,
    ValidityRegion,
    auto_dim,
)
from models.errors import DimensionMismatch
from models.fock import FockVector, Parity, ParitySetting, State
from models.scan import Extremum, ScanResult, as_grid, find_extremum
from simulation.analytic import analytic_pair_certainty
from simulation.fock_core import (
    as_state,
    clamp_probability,
    coherent_state,
    expectation,
    mean_photon_number,
    parity_projector,
)

log = logging.getLogger(__name__)

UPPER_BOUND  = 0.75
LOWER_BOUND  = 0.25
REFINE_TOL   = 1e-10


@dataclass(frozen=True)
class FurReport:
    value: float
    parity: Parity
    beta: float
    in_validity_region: bool
    within_bounds: bool
    tolerance: float
    mean_photons: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "parity": self.parity.label,
            "beta": self.beta,
            "in_validity_region": self.in_validity_region,
            "within_bounds": self.within_bounds,
            "tolerance": self.tolerance,
            "mean_photons": self.mean_photons,
        }


def within_fur_bounds(value: float, tolerance: float = DEFAULT_BOUND_TOL) -> bool:
    return LOWER_BOUND - tolerance <= value <= UPPER_BOUND + tolerance


def _single_mode(state: Union[State, FockVector]) -> State:
    state = as_state(state)
    if state.modes != 1:
        raise DimensionMismatch(f"ожидалось одномодовое состояние, получено мод: {state.modes}")
    return state


def average_certainty(
    state: Union[State, FockVector],
    beta: float,
    outcome: Union[Parity, int, str],
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    state = _single_mode(state)
    setting = ParitySetting(outcome, beta)
    dim = state.dims[0]
    p_plus = expectation(state, [parity_projector(setting, dim, tail_tol)], probability=True)
    p_minus = expectation(state, [parity_projector(setting.mirrored(), dim, tail_tol)], probability=True)
    return clamp_probability(0.5 * (p_plus + p_minus))


def check_fur(
    state: Union[State, FockVector],
    beta: float,
    outcome: Union[Parity, int, str],
    region: Optional[ValidityRegion] = None,
    tolerance: float = DEFAULT_BOUND_TOL,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> FurReport:
    """Вычисляет и сообщает; для некогерентных состояний границы не гарантируются."""
    state = _single_mode(state)
    region = region or ValidityRegion()
    value = average_certainty(state, beta, outcome, tail_tol)
    photons = mean_photon_number(state)
    return FurReport(
        value=value,
        parity=Parity.parse(outcome),
        beta=float(beta),
        in_validity_region=region.contains(beta, photons),
        within_bounds=within_fur_bounds(value, tolerance),
        tolerance=tolerance,
        mean_photons=photons,
    )


# ── Рисунок 1: экстремумы по β ────────────────────────────────────────────────

def _best_index(betas: np.ndarray, values: np.ndarray) -> int:
    """Максимум; при равенстве — наименьший |β|, затем положительный знак."""
    top = np.flatnonzero(values == values.max())
    return int(min(top, key=lambda i: (abs(betas[i]), betas[i] < 0)))


def _refine_max(objective, betas: np.ndarray, i: int, refine: bool = True) -> Tuple[float, float]:
    beta, value = float(betas[i]), float(objective(betas[i]))
    if refine and 0 < i < betas.size - 1:
        try:
            res = minimize_scalar(
                lambda b: -objective(b),
                bracket=(betas[i - 1], betas[i], betas[i + 1]),
                method="golden",
                tol=REFINE_TOL,
            )
        except ValueError:
            # плато: соседние точки сетки не образуют скобку
            res = None
        if res is not None and -res.fun > value:
            beta, value = float(res.x), float(-res.fun)
    # функционал чётен по β, отдаём положительного представителя
    if objective(-beta) >= value:
        beta = abs(beta)
    return beta, value


def fig1_scan(
    gamma_grid: Sequence[float],
    beta_grid: Sequence[float],
    region: Optional[ValidityRegion] = None,
    refine: bool = True,
) -> ScanResult:
    """Для каждого γ: sup_β чётной и inf_β нечётной средней определённости (замкнутые формулы)."""
    gammas = as_grid(gamma_grid, "gamma")
    betas = as_grid(beta_grid, "beta")
    region = region or ValidityRegion()

    even_sup = np.empty(gammas.size)
    even_arg = np.empty(gammas.size)
    in_region = np.empty(gammas.size, dtype=bool)

    for k, gamma in enumerate(gammas):
        def objective(b, g=gamma):
            return float(analytic_pair_certainty(g, b, -b, Parity.EVEN))

        row = analytic_pair_certainty(gamma, betas, -betas, Parity.EVEN)
        i = _best_index(betas, row)
        even_arg[k], even_sup[k] = _refine_max(objective, betas, i, refine)
        in_region[k] = region.contains(even_arg[k], gamma**2)

    # нечётная определённость дополняет чётную до 1 в каждой точке
    odd_inf = 1.0 - even_sup
    axes = {"gamma": gammas}
    log.debug(f"fig1_scan: {gammas.size} значений γ, {betas.size} значений β")
    return ScanResult(
        axes=axes,
        values=even_sup,
        extrema=(find_extremum(axes, even_sup, "max"),),
        meta={"functional": "even_sup", "beta_grid": {
            "start": float(betas[0]), "stop": float(betas[-1]), "num": int(betas.size),
        }, "refined": refine},
        extras={
            "even_argmax_beta": even_arg,
            "odd_inf": odd_inf,
            "odd_argmin_beta": even_arg.copy(),
            "in_validity_region": in_region,
        },
    )


# ── Сырой скан check_fur ──────────────────────────────────────────────────────

def _scan_extrema(axes: Dict[str, np.ndarray], values: np.ndarray) -> Tuple[Extremum, Extremum]:
    return find_extremum(axes, values, "max"), find_extremum(axes, values, "min")


def fur_scan(
    gamma_grid: Sequence[float],
    beta_grid: Sequence[float],
    outcome: Union[Parity, int, str] = Parity.EVEN,
    region: Optional[ValidityRegion] = None,
    tolerance: float = DEFAULT_BOUND_TOL,
    dim: Optional[int] = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ScanResult:
    """check_fur на когерентных состояниях по сетке (γ, β), численным путём."""
    gammas = as_grid(gamma_grid, "gamma")
    betas = as_grid(beta_grid, "beta")
    region = region or ValidityRegion()
    outcome = Parity.parse(outcome)
    if dim is None:
        dim = auto_dim(np.abs(gammas).max(), np.abs(betas).max())

    vectors = [coherent_state(g, dim, tail_tol) for g in gammas]
    values = np.empty((gammas.size, betas.size))
    # β во внешнем цикле: проекторы строятся один раз на столбец
    for j, beta in enumerate(betas):
        for i, vec in enumerate(vectors):
            values[i, j] = average_certainty(vec, beta, outcome, tail_tol)

    photons = np.repeat(gammas**2, betas.size).reshape(values.shape)
    in_region = np.array([
        region.contains(b, n) for b, n in zip(np.tile(betas, gammas.size), photons.ravel())
    ]).reshape(values.shape)
    within = (values >= LOWER_BOUND - tolerance) & (values <= UPPER_BOUND + tolerance)

    axes = {"gamma": gammas, "beta": betas}
    return ScanResult(
        axes=axes,
        values=values,
        extrema=_scan_extrema(axes, values),
        meta={"functional": "average_certainty", "outcome": outcome.label, "dim": dim,
              "tolerance": tolerance},
        extras={"in_validity_region": in_region.ravel(), "within_bounds": within.ravel()},
    )


def fur_state_scan(
    state: Union[State, FockVector],
    beta_grid: Sequence[float],
    outcome: Union[Parity, int, str] = Parity.EVEN,
    region: Optional[ValidityRegion] = None,
    tolerance: float = DEFAULT_BOUND_TOL,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ScanResult:
    """check_fur для одного одномодового состояния по сетке β."""
    betas = as_grid(beta_grid, "beta")
    state = _single_mode(state)
    reports = [check_fur(state, b, outcome, region, tolerance, tail_tol) for b in betas]
    values = np.array([r.value for r in reports])
    axes = {"beta": betas}
    return ScanResult(
        axes=axes,
        values=values,
        extrema=_scan_extrema(axes, values),
        meta={"functional": "average_certainty", "outcome": Parity.parse(outcome).label,
              "dim": state.dims[0], "tolerance": tolerance,
              "mean_photons": reports[0].mean_photons},
        extras={
            "in_validity_region": np.array([r.in_validity_region for r in reports]),
            "within_bounds": np.array([r.within_bounds for r in reports]),
        },
    )
