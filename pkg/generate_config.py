"""
Генератор JSON-файлов состояний для `steer-check` и `fur-scan`
"""

import logging
import sys
from pathlib import Path
from typing import List

import numpy as np

from models.fock import save_state
from simulation.fock_core import coherent_state, fock_state, product_state
from simulation.sampling import random_coherent_mixture, uncorrelated_mixture
from simulation.steering import noon_auto_dim, noon_state

log = logging.getLogger(__name__)

STATES_DIR = Path("states")

# Усечения по умолчанию: N00N для |α|, |β| ≤ 2; когерентные для |γ| ≤ 2.5 и |β| ≤ 2
NOON_SPAN     = 2.0
COHERENT_DIM  = 111


# ─── Утилиты ──────────────────────────────────────────────────────────────────

def ensure_states_dir(states_dir: Path = STATES_DIR) -> Path:
    """Создаёт папку для файлов состояний, если её нет"""
    if not states_dir.exists():
        states_dir.mkdir(parents=True)
        log.info(f"Создана папка для состояний: {states_dir}/")
    return states_dir


# ─── Генераторы состояний ─────────────────────────────────────────────────────

def create_noon_files(states_dir: Path, max_n: int = 6) -> List[Path]:
    paths = []
    for n in range(1, max_n + 1):
        dim = noon_auto_dim(n, NOON_SPAN, NOON_SPAN)
        paths.append(save_state(noon_state(n, dim), states_dir / f"noon_{n}.json"))
        log.info(f"  N00N N={n}, dim={dim} → noon_{n}.json")
    return paths


def create_coherent_files(states_dir: Path, dim: int = COHERENT_DIM) -> List[Path]:
    """Одномодовые |γ⟩ и |2⟩ для fur-scan, двухмодовое произведение для steer-check."""
    files = {
        "coherent_1.json": product_state([coherent_state(1.0, dim)]),
        "coherent_1.5.json": product_state([coherent_state(1.5, dim)]),
        "fock_2.json": product_state([fock_state(2, dim)]),
        "product_coherent.json": product_state([coherent_state(1.2, dim), coherent_state(-1.5, dim)]),
    }
    paths = []
    for name, state in files.items():
        paths.append(save_state(state, states_dir / name))
        log.info(f"  {name}")
    return paths


def create_mixture_files(states_dir: Path, seed: int = 42, dim: int = COHERENT_DIM) -> List[Path]:
    """Сепарабельные смеси: коррелированная (10 слагаемых) и некоррелированная 3×3."""
    rng = np.random.default_rng(seed)
    files = {
        "separable_mixture.json": random_coherent_mixture(rng, 10, 2, dim),
        "uncorrelated_mixture.json": uncorrelated_mixture(rng, 3, 3, dim),
    }
    paths = []
    for name, state in files.items():
        paths.append(save_state(state, states_dir / name))
        log.info(f"  {name} (seed={seed})")
    return paths


# ─── Точка входа ──────────────────────────────────────────────────────────────

def main(states_dir: Path = STATES_DIR) -> List[Path]:
    log.info("=" * 60)
    log.info("Генератор файлов состояний")
    log.info("=" * 60)

    ensure_states_dir(states_dir)
    paths = create_noon_files(states_dir)
    paths += create_coherent_files(states_dir)
    paths += create_mixture_files(states_dir)

    log.info("=" * 60)
    log.info(f"✓ Сохранено файлов: {len(paths)} в папку {states_dir}/")
    log.info("=" * 60)
    return paths


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else STATES_DIR)
