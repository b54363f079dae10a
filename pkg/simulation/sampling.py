"""
Генераторы случайных сепарабельных смесей когерентных состояний и настроек чётности.

Все функции принимают явный numpy.random.Generator; независимые серии
получают непересекающиеся семена через SeedSequence.spawn.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from models.config import DEFAULT_BETA_MIN, DEFAULT_TAIL_TOL
from models.fock import FockVector, Parity, ParitySetting, ProductMixture
from simulation.fock_core import coherent_state

AMP_RANGE          = (1.0, 2.0)
MONOGAMY_AMP_RANGE = (1.1, 2.5)
BETA_MAX           = 2.0


def derived_rngs(seed: int, n: int) -> List[np.random.Generator]:
    """n независимых генераторов, детерминированно выведенных из seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def random_amplitude(rng: np.random.Generator, amp_range: Tuple[float, float] = AMP_RANGE) -> float:
    """|γ| равномерно в amp_range, знак случаен."""
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(*amp_range))


def random_setting(
    rng: np.random.Generator,
    beta_min: float = DEFAULT_BETA_MIN,
    beta_max: float = BETA_MAX,
    outcome: Optional[Parity] = None,
) -> ParitySetting:
    if outcome is None:
        outcome = Parity(int(rng.integers(2)))
    return ParitySetting(outcome, random_amplitude(rng, (beta_min, beta_max)))


def _coherent_terms(
    rng: np.random.Generator, n: int, amp_range: Tuple[float, float], dim: int, tail_tol: float
) -> List[FockVector]:
    return [coherent_state(random_amplitude(rng, amp_range), dim, tail_tol) for _ in range(n)]


def random_coherent_mixture(
    rng: np.random.Generator,
    n_terms: int,
    modes: int,
    dim: int,
    amp_range: Tuple[float, float] = AMP_RANGE,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ProductMixture:
    """Σ_k w_k ⊗_m |γ_km⟩⟨γ_km| с весами из Dirichlet(1, …, 1)."""
    weights = rng.dirichlet(np.ones(n_terms))
    terms = [tuple(_coherent_terms(rng, modes, amp_range, dim, tail_tol)) for _ in range(n_terms)]
    return ProductMixture.from_terms(weights, terms)


def uncorrelated_mixture(
    rng: np.random.Generator,
    n_alice: int,
    n_bob: int,
    dim: int,
    amp_range: Tuple[float, float] = AMP_RANGE,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ProductMixture:
    """ρ_A ⊗ ρ_B, где обе моды — смеси когерентных состояний: Σ_jk w_j v_k |γ_j⟩|δ_k⟩."""
    w = rng.dirichlet(np.ones(n_alice))
    v = rng.dirichlet(np.ones(n_bob))
    alice = _coherent_terms(rng, n_alice, amp_range, dim, tail_tol)
    bob = _coherent_terms(rng, n_bob, amp_range, dim, tail_tol)
    terms = [(ga, gb) for ga in alice for gb in bob]
    return ProductMixture.from_terms(np.outer(w, v).ravel(), terms)


# ── Трёхсторонние выборки для моногамии ───────────────────────────────────────

@dataclass(frozen=True)
class MonogamyCase:
    state: ProductMixture            # моды: 0 — Алиса, 1 — Боб, 2 — Чарли
    alice: Tuple[ParitySetting, ParitySetting]
    bob: Tuple[ParitySetting, ParitySetting]
    charlie: Tuple[ParitySetting, ParitySetting]


def monogamy_sample(
    rng: np.random.Generator,
    dim: int,
    n_terms: int = 4,
    amp_range: Tuple[float, float] = MONOGAMY_AMP_RANGE,
    beta_min: float = DEFAULT_BETA_MIN,
    beta_max: float = BETA_MAX,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> MonogamyCase:
    """Случайная трёхмодовая смесь и настройки.

    Алиса и Чарли повторяют одну настройку в обоих слагаемых, Боб берёт (β, −β):
    так условные состояния Боба остаются смесями когерентных состояний с общими весами.
    """
    state = random_coherent_mixture(rng, n_terms, 3, dim, amp_range, tail_tol)
    alice = random_setting(rng, beta_min, beta_max)
    bob = random_setting(rng, beta_min, beta_max)
    charlie = random_setting(rng, beta_min, beta_max)
    return MonogamyCase(
        state=state,
        alice=(alice, alice),
        bob=(bob, bob.mirrored()),
        charlie=(charlie, charlie),
    )
