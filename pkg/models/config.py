"""
RunConfig      — датакласс конфигурации запуска (CLI-флаги или встроенный JSON).
ValidityRegion — область применимости FUR (|β| ≥ beta_min или n̄ ≥ photon_floor).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Union

from models.errors import ConfigError

# ── Дефолты ───────────────────────────────────────────────────────────────────
DEFAULT_TAIL_TOL     = 1e-10   # допустимая масса пуассоновского хвоста за усечением
DEFAULT_BOUND_TOL    = 1e-4    # допуск на границы [1/4, 3/4]
DEFAULT_BETA_MIN     = 0.05
DEFAULT_PHOTON_FLOOR = 1.0
DEFAULT_SEED         = 42
NORM_TOL             = 1e-12
HERMITIAN_TOL        = 1e-12
PROB_NOISE           = 1e-10   # шум, который ещё можно «прижать» к [0, 1]
MIN_CONDITIONING     = 1e-12
AUTO_MIN_DIM         = 32
AUTO_HEADROOM        = 6.0     # ~шесть стандартных отклонений пуассоновской статистики
META_PREFIX          = "# meta: "   # первая строка CSV-результата


def auto_dim(gamma_max: float, beta_max: float) -> int:
    """Автоматическое усечение: max(32, ⌈(|γ|max + |β|max + 6)²⌉)."""
    reach = abs(float(gamma_max)) + abs(float(beta_max)) + AUTO_HEADROOM
    return max(AUTO_MIN_DIM, int(math.ceil(reach * reach)))


@dataclass(frozen=True)
class ValidityRegion:
    beta_min: float = DEFAULT_BETA_MIN
    photon_floor: float = DEFAULT_PHOTON_FLOOR

    def __post_init__(self):
        if not self.beta_min > 0:
            raise ConfigError(f"beta_min должен быть > 0, получено {self.beta_min}")
        if not self.photon_floor >= 0:
            raise ConfigError(f"photon_floor должен быть ≥ 0, получено {self.photon_floor}")

    def contains(self, beta: float, mean_photons: float) -> bool:
        return abs(beta) >= self.beta_min or mean_photons >= self.photon_floor


@dataclass(frozen=True)
class RunConfig:
    truncation: Union[str, int] = "auto"
    tail_tolerance: float = DEFAULT_TAIL_TOL
    bound_tolerance: float = DEFAULT_BOUND_TOL
    beta_min: float = DEFAULT_BETA_MIN
    photon_floor: float = DEFAULT_PHOTON_FLOOR
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.truncation != "auto":
            try:
                dim = int(self.truncation)
            except (TypeError, ValueError):
                raise ConfigError(f"--dim: ожидается 'auto' или целое, получено {self.truncation!r}")
            if dim < 2:
                raise ConfigError(f"--dim: усечение должно быть ≥ 2, получено {dim}")
            object.__setattr__(self, "truncation", dim)
        for name in ("tail_tolerance", "bound_tolerance"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} должен быть > 0, получено {value}")
        try:
            seed = int(self.seed)
        except (TypeError, ValueError):
            raise ConfigError(f"seed должен быть целым, получено {self.seed!r}")
        if not 0 <= seed < 2**64:
            raise ConfigError(f"seed должен быть 64-битным неотрицательным целым, получено {seed}")
        object.__setattr__(self, "seed", seed)
        # проверка beta_min / photon_floor
        self.region

    @property
    def region(self) -> ValidityRegion:
        return ValidityRegion(beta_min=self.beta_min, photon_floor=self.photon_floor)

    @property
    def explicit_dim(self) -> Optional[int]:
        return None if self.truncation == "auto" else int(self.truncation)

    def resolve_dim(self, gamma_max: float, beta_max: float) -> int:
        if self.truncation == "auto":
            return auto_dim(gamma_max, beta_max)
        return int(self.truncation)

    # ── Загрузка / выгрузка ───────────────────────────────────────────────────

    @classmethod
    def from_args(cls, args: Any) -> "RunConfig":
        return cls(
            truncation=getattr(args, "dim", "auto"),
            tail_tolerance=getattr(args, "tail_tol", DEFAULT_TAIL_TOL),
            bound_tolerance=getattr(args, "bound_tol", DEFAULT_BOUND_TOL),
            beta_min=getattr(args, "beta_min", DEFAULT_BETA_MIN),
            photon_floor=getattr(args, "photon_floor", DEFAULT_PHOTON_FLOOR),
            seed=getattr(args, "seed", DEFAULT_SEED),
        )

    @classmethod
    def from_dict(cls, c: Dict[str, Any]) -> "RunConfig":
        return cls(
            truncation=c.get("truncation", "auto"),
            tail_tolerance=c.get("tail_tolerance", DEFAULT_TAIL_TOL),
            bound_tolerance=c.get("bound_tolerance", DEFAULT_BOUND_TOL),
            beta_min=c.get("beta_min", DEFAULT_BETA_MIN),
            photon_floor=c.get("photon_floor", DEFAULT_PHOTON_FLOOR),
            seed=c.get("seed", DEFAULT_SEED),
        )

    @classmethod
    def from_json(cls, config_file: str) -> "RunConfig":
        """Конфиг из JSON-файла, из meta JSON-результата или из строки `# meta:` CSV."""
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                text = f.read()
            if text.startswith(META_PREFIX):
                c = json.loads(text.splitlines()[0][len(META_PREFIX):])
            else:
                c = json.loads(text)
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ConfigError(f"{config_file}: не удалось прочитать конфиг: {e}")
        if not isinstance(c, dict):
            raise ConfigError(f"{config_file}: ожидался JSON-объект")
        # файлы результатов хранят конфиг внутри meta
        if isinstance(c.get("meta"), dict):
            c = c["meta"]
        if "config" in c:
            c = c["config"]
        if not isinstance(c, dict):
            raise ConfigError(f"{config_file}: поле config должно быть объектом")
        return cls.from_dict(c)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
