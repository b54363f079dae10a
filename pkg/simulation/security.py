"""
Моногамия управляемости, нижняя граница скорости ключа и вспомогательная
взаимная информация для бинарных исходов.

    rate ≥ log₂((¾ + δ) / (¾ − δ)),  δ — величина нарушения верхней границы ¾.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import rel_entr

from models.config import (
    DEFAULT_BETA_MIN,
    DEFAULT_BOUND_TOL,
    DEFAULT_TAIL_TOL,
    auto_dim,
)
from models.errors import InvalidDistribution, OutOfRange
from models.fock import ParitySetting, State
from simulation.sampling import (
    BETA_MAX,
    MONOGAMY_AMP_RANGE,
    derived_rngs,
    monogamy_sample,
)
from simulation.steering import SteeringSettings, steering_sum

log = logging.getLogger(__name__)

UPPER_BOUND      = 0.75
MONOGAMY_LOWER   = 0.5
MONOGAMY_UPPER   = 1.5
MAX_DELTA        = 0.25
DISTRIBUTION_TOL = 1e-10

Pair = Tuple[ParitySetting, ParitySetting]


# ── Моногамия ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MonogamyReport:
    sigma_ba: float
    sigma_bc: float
    combined: float
    within_bounds: bool
    tolerance: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def monogamy_check(
    state: State,
    alice: Pair,
    bob: Pair,
    charlie: Pair,
    tol: float = DEFAULT_BOUND_TOL,
    modes: Tuple[int, int, int] = (0, 1, 2),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> MonogamyReport:
    """½(Σ_BA + Σ_BC) ∈ [½, 3/2]; настройки Боба общие для обеих сумм.

    modes — индексы мод Алисы, Боба и Чарли.
    """
    a_mode, b_mode, c_mode = modes
    sigma_ba = steering_sum(state, SteeringSettings(alice, bob), (a_mode, b_mode), tail_tol)
    sigma_bc = steering_sum(state, SteeringSettings(charlie, bob), (c_mode, b_mode), tail_tol)
    combined = 0.5 * (sigma_ba + sigma_bc)
    return MonogamyReport(
        sigma_ba=sigma_ba,
        sigma_bc=sigma_bc,
        combined=combined,
        within_bounds=MONOGAMY_LOWER - tol <= combined <= MONOGAMY_UPPER + tol,
        tolerance=tol,
    )


def monogamy_survey(
    samples: int,
    seed: int,
    n_terms: int = 4,
    tol: float = DEFAULT_BOUND_TOL,
    beta_min: float = DEFAULT_BETA_MIN,
    dim: Optional[int] = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """Серия случайных трёхсторонних смесей; у каждой выборки своё выведенное семя."""
    if samples < 1:
        raise OutOfRange(f"число выборок должно быть ≥ 1, получено {samples}")
    if dim is None:
        dim = auto_dim(MONOGAMY_AMP_RANGE[1], BETA_MAX)

    rows: List[Dict[str, Any]] = []
    for k, rng in enumerate(derived_rngs(seed, samples)):
        case = monogamy_sample(rng, dim, n_terms, MONOGAMY_AMP_RANGE, beta_min, BETA_MAX, tail_tol)
        report = monogamy_check(case.state, case.alice, case.bob, case.charlie, tol, tail_tol=tail_tol)
        rows.append({
            "sample": k,
            "alpha": case.alice[0].displacement,
            "a": int(case.alice[0].outcome),
            "beta": case.bob[0].displacement,
            "b": int(case.bob[0].outcome),
            "charlie_displacement": case.charlie[0].displacement,
            "c": int(case.charlie[0].outcome),
            "sigma_ba": report.sigma_ba,
            "sigma_bc": report.sigma_bc,
            "combined": report.combined,
            "within_bounds": report.within_bounds,
        })

    df = pd.DataFrame(rows)
    failures = int((~df["within_bounds"]).sum())
    summary = {
        "samples": samples,
        "failures": failures,
        "combined_min": float(df["combined"].min()),
        "combined_max": float(df["combined"].max()),
        "dim": dim,
        "n_terms": n_terms,
        "amp_range": list(MONOGAMY_AMP_RANGE),
        "tolerance": tol,
    }
    if failures:
        log.warning(f"моногамия: {failures} из {samples} выборок вне [½, 3/2]")
    return df, summary


# ── Скорость ключа ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class KeyRateResult:
    delta: float
    rate_lower_bound: float   # бит на разделённое состояние

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def key_rate_lower_bound(delta: float) -> KeyRateResult:
    delta = float(delta)
    if not (0.0 < delta <= MAX_DELTA):
        raise OutOfRange(f"δ должно лежать в (0, ¼], получено {delta}")
    rate = math.log2((UPPER_BOUND + delta) / (UPPER_BOUND - delta))
    return KeyRateResult(delta=delta, rate_lower_bound=rate)


def delta_from_violation(value: float) -> float:
    value = float(value)
    if not (UPPER_BOUND < value <= 1.0):
        raise OutOfRange(f"значение функционала должно лежать в (¾, 1], получено {value}")
    return value - UPPER_BOUND


def key_rate_from_violation(value: float) -> KeyRateResult:
    return key_rate_lower_bound(delta_from_violation(value))


# ── Взаимная информация ───────────────────────────────────────────────────────

def _distribution(joint: Sequence[Sequence[float]]) -> np.ndarray:
    table = np.asarray(joint, dtype=float)
    if table.ndim != 2 or table.size == 0:
        raise InvalidDistribution(f"ожидалась двумерная таблица, получена форма {table.shape}")
    if not np.all(np.isfinite(table)) or np.any(table < 0):
        raise InvalidDistribution("элементы таблицы должны быть конечными и неотрицательными")
    if abs(table.sum() - 1.0) > DISTRIBUTION_TOL:
        raise InvalidDistribution(f"сумма таблицы {table.sum()!r} отличается от 1")
    return table


def mutual_information(joint: Sequence[Sequence[float]]) -> float:
    """I(B:A) в битах; 0·log 0 = 0."""
    p = _distribution(joint)
    product = np.outer(p.sum(axis=1), p.sum(axis=0))
    return max(float(rel_entr(p, product).sum() / math.log(2)), 0.0)


def csiszar_korner_rate(table_ba: Sequence[Sequence[float]], table_bc: Sequence[Sequence[float]]) -> float:
    """I(B:A) − I(B:C) для индивидуальных атак."""
    return mutual_information(table_ba) - mutual_information(table_bc)


# ── Дискретный ориентир ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class DiscreteBaseline:
    lower: float
    upper: float
    steering_threshold_upper: float
    discrete_key_rate_lower_bound: float
    continuous_upper: float
    continuous_lower: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def discrete_baseline() -> DiscreteBaseline:
    half_gap = 1.0 / (2.0 * math.sqrt(2.0))
    return DiscreteBaseline(
        lower=0.5 - half_gap,
        upper=0.5 + half_gap,
        steering_threshold_upper=0.5 + half_gap,
        discrete_key_rate_lower_bound=0.5,
        continuous_upper=UPPER_BOUND,
        continuous_lower=1.0 - UPPER_BOUND,
    )
