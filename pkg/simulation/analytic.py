"""
Замкнутые формулы для когерентных состояний: вероятности смещённой чётности
и средняя определённость пары измерений (±β).

Используются как эталон для численного пути и как быстрый путь в сканах.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from models.config import ValidityRegion
from models.fock import Parity


def analytic_even_parity_prob(gamma, beta):
    """⟨γ|Π⁺(β)|γ⟩ = e^{−(γ−β)²} cosh (γ−β)² = (1 + e^{−2(γ−β)²}) / 2.

    Работает и поэлементно на массивах numpy.
    """
    d = np.subtract(gamma, beta)
    return 0.5 * (1.0 + np.exp(-2.0 * d * d))


def analytic_odd_parity_prob(gamma, beta):
    # 1 − even точно: even ∈ [½, 1], вычитание без потери точности
    return 1.0 - analytic_even_parity_prob(gamma, beta)


def analytic_parity_prob(gamma, beta, parity: Union[Parity, int, str]):
    if Parity.parse(parity) == Parity.EVEN:
        return analytic_even_parity_prob(gamma, beta)
    return analytic_odd_parity_prob(gamma, beta)


def analytic_pair_certainty(gamma, alpha, beta, parity: Union[Parity, int, str]):
    """½[p(γ, α) + p(γ, β)] для двух независимых смещений."""
    return 0.5 * (analytic_parity_prob(gamma, alpha, parity) + analytic_parity_prob(gamma, beta, parity))


@dataclass(frozen=True)
class CertaintyValue:
    value: float
    parity: Parity
    gamma: float
    beta: float
    in_validity_region: bool = True

    def to_dict(self):
        return {
            "value": self.value,
            "parity": self.parity.label,
            "gamma": self.gamma,
            "beta": self.beta,
            "in_validity_region": self.in_validity_region,
        }


def analytic_average_certainty(
    gamma: float,
    beta: float,
    parity: Union[Parity, int, str],
    region: Optional[ValidityRegion] = None,
) -> CertaintyValue:
    """½[p(γ, β) + p(γ, −β)] с пометкой области применимости.

    Средний номер фотонов когерентного состояния равен γ².
    """
    parity = Parity.parse(parity)
    region = region or ValidityRegion()
    value = float(analytic_pair_certainty(gamma, beta, -beta, parity))
    return CertaintyValue(
        value=value,
        parity=parity,
        gamma=float(gamma),
        beta=float(beta),
        in_validity_region=region.contains(beta, float(gamma) ** 2),
    )
