"""
Точка входа CLI фоковского симулятора.

Примеры:
    python -m simulation.runner fig1 --out results/fig1.csv
    python -m simulation.runner noon-scan --N 2 --b 0 --a 1
    python -m simulation.runner steer-check --state states/noon_2.json --a 1 --b 0 --alpha 0.5 --beta 0.05
    python -m simulation.runner monogamy --samples 1000 --seed 42
    python -m simulation.runner key-rate --delta 0.25
    python -m simulation.runner baseline
    python -m simulation.runner fur-scan --outcome even --format json
    python -m simulation.runner noon-scan --N 2 --config results/noon_N2.json --out rerun/noon_N2.json

Коды выхода: 0 — успех, 2 — ошибка конфигурации/аргументов/файла состояния,
3 — ошибка ввода-вывода, 4 — пустой или вырожденный скан,
5 — вырожденное условие.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from logger import ScanLogger
from models.config import (
    DEFAULT_BETA_MIN,
    DEFAULT_BOUND_TOL,
    DEFAULT_PHOTON_FLOOR,
    DEFAULT_SEED,
    DEFAULT_TAIL_TOL,
    RunConfig,
)
from models.errors import (
    ConfigError,
    DegenerateConditioning,
    DegenerateScan,
    EmptyGrid,
    FockError,
)
from models.fock import ParitySetting, load_state
from simulation.fur import fig1_scan, fur_scan, fur_state_scan
from simulation.security import (
    discrete_baseline,
    key_rate_from_violation,
    key_rate_lower_bound,
    monogamy_survey,
)
from simulation.steering import (
    SteeringSettings,
    noon_auto_dim,
    noon_state,
    steering_functional,
    violation_search,
)
from visualization import PlotScripts

log = logging.getLogger(__name__)

EXIT_OK          = 0
EXIT_CONFIG      = 2
EXIT_IO          = 3
EXIT_EMPTY_SCAN  = 4
EXIT_DEGENERATE  = 5

DEFAULT_OUT_DIR  = Path("results")

# START STOP NUM
FIG1_GAMMA_GRID  = (-3.0, 3.0, 61)
FIG1_BETA_GRID   = (-3.5, 3.5, 141)
NOON_ALPHA_GRID  = (0.1, 2.0, 39)
NOON_BETA_GRID   = (0.01, 1.0, 100)
FUR_GAMMA_GRID   = (-3.0, 3.0, 61)
FUR_BETA_GRID    = (-3.0, 3.0, 61)

# не влияют на содержимое файлов и не попадают в params
_NON_PARAMS = {"handler", "out", "quiet", "command"}
# хранятся в meta.config
_CONFIG_FLAGS = {"config", "dim", "tail_tol", "bound_tol", "beta_min", "photon_floor", "seed"}


# ── Разбор аргументов ─────────────────────────────────────────────────────────

def grid(spec: Sequence[float], name: str) -> np.ndarray:
    start, stop, num = spec
    if int(num) != num or num < 0:
        raise ConfigError(f"--{name}-grid: NUM должно быть целым ≥ 0, получено {num}")
    return np.linspace(float(start), float(stop), int(num))


def pair(values: Sequence[float], name: str) -> tuple:
    """Одно значение x означает пару (x, −x)."""
    if len(values) == 1:
        return float(values[0]), -float(values[0])
    if len(values) == 2:
        return float(values[0]), float(values[1])
    raise ConfigError(f"--{name}: ожидается одно или два значения, получено {len(values)}")


def run_meta(args: argparse.Namespace, config: RunConfig, **extra: Any) -> Dict[str, Any]:
    params = {
        k: (str(v) if isinstance(v, Path) else list(v) if isinstance(v, (list, tuple)) else v)
        for k, v in sorted(vars(args).items()) if k not in _NON_PARAMS | _CONFIG_FLAGS
    }
    meta = {"command": args.command, "config": config.to_dict(), "seed": config.seed, "params": params}
    meta.update(extra)
    return meta


def out_path(args: argparse.Namespace, default_name: str) -> Path:
    return Path(args.out) if args.out else DEFAULT_OUT_DIR / default_name


# ── Подкоманды ────────────────────────────────────────────────────────────────

def cmd_fig1(args: argparse.Namespace, config: RunConfig) -> int:
    gammas, betas = grid(args.gamma_grid, "gamma"), grid(args.beta_grid, "beta")
    log.info("=" * 60)
    log.info(f"РИСУНОК 1: γ × {gammas.size}, β × {betas.size}")
    log.info("=" * 60)

    result = fig1_scan(gammas, betas, region=config.region, refine=not args.no_refine)
    writer = ScanLogger(run_meta(args, config))
    writer.log_summary("РИСУНОК 1: sup_β чётной определённости", result)

    if args.format == "json":
        writer.write_scan_json(result, out_path(args, "fig1.json"))
        return EXIT_OK

    data = writer.write_scan_csv(result, out_path(args, "fig1.csv"), value_column="even_sup")
    PlotScripts().create_all_scripts([
        (data.with_suffix(".gp"), lambda p: PlotScripts().fig1_script(data, p)),
    ])
    return EXIT_OK


def cmd_noon_scan(args: argparse.Namespace, config: RunConfig) -> int:
    alphas, betas = grid(args.alpha_grid, "alpha"), grid(args.beta_grid, "beta")
    span_a = float(np.abs(alphas).max()) if alphas.size else 0.0
    span_b = float(np.abs(betas).max()) if betas.size else 0.0
    dim = config.explicit_dim or noon_auto_dim(args.N, span_a, span_b)

    log.info("=" * 60)
    log.info(f"N00N N={args.N}: b={args.b}, a={args.a}, dim={dim}")
    log.info(f"  α × {alphas.size}, β × {betas.size}")
    log.info("=" * 60)

    state = noon_state(args.N, dim)
    result = violation_search(
        state, alphas, betas, args.b, args.a,
        tolerance=config.bound_tolerance, tail_tol=config.tail_tolerance,
    )
    writer = ScanLogger(run_meta(args, config, dim=dim))
    writer.log_summary(f"N00N N={args.N}: функционал управляемости", result)
    best = result.extremum
    log.info(f"Максимум {best.value:.10f}, превышение над ¾: {best.value - 0.75:+.3e}")

    base = out_path(args, f"noon_N{args.N}.json")
    writer.write_scan_json(result, base.with_suffix(".json"))
    data = writer.write_scan_csv(result, base.with_suffix(".csv"))
    PlotScripts().create_all_scripts([
        (data.with_suffix(".gp"), lambda p: PlotScripts().steering_script(data, p, result)),
    ])
    return EXIT_OK


def cmd_steer_check(args: argparse.Namespace, config: RunConfig) -> int:
    state = load_state(args.state)
    a1, a2 = pair(args.alpha, "alpha")
    b1, b2 = pair(args.beta, "beta")
    settings = SteeringSettings(
        alice=(ParitySetting(args.a, a1), ParitySetting(args.a, a2)),
        bob=(ParitySetting(args.b, b1), ParitySetting(args.b, b2)),
    )
    report = steering_functional(
        state, settings, tolerance=config.bound_tolerance, tail_tol=config.tail_tolerance,
    )
    log.info(f"Функционал {report.value:.10f}: нарушение={report.violated} ({report.side})")

    writer = ScanLogger(run_meta(args, config))
    record = report.to_dict()
    record["meta"] = writer.run_meta
    writer.emit(record)
    if args.out:
        writer.write_record(record, args.out)
    return EXIT_OK


def cmd_monogamy(args: argparse.Namespace, config: RunConfig) -> int:
    log.info("=" * 60)
    log.info(f"МОНОГАМИЯ: {args.samples} выборок, seed={config.seed}")
    log.info("=" * 60)

    df, summary = monogamy_survey(
        args.samples, config.seed, n_terms=args.terms, tol=config.bound_tolerance,
        beta_min=config.beta_min, dim=config.explicit_dim, tail_tol=config.tail_tolerance,
    )
    writer = ScanLogger(run_meta(args, config, dim=summary["dim"]))
    data = writer.write_table(df, out_path(args, "monogamy.csv"))
    writer.write_record({"summary": summary, "meta": writer.run_meta},
                        data.with_name(f"{data.stem}_summary.json"))

    log.info(f"Вне границ: {summary['failures']} / {summary['samples']}")
    log.info(f"½(Σ_BA + Σ_BC) ∈ [{summary['combined_min']:.6f}, {summary['combined_max']:.6f}]")
    return EXIT_OK


def cmd_key_rate(args: argparse.Namespace, config: RunConfig) -> int:
    if args.delta is not None:
        result = key_rate_lower_bound(args.delta)
    else:
        result = key_rate_from_violation(args.violation)
    writer = ScanLogger(run_meta(args, config))
    record = result.to_dict()
    record["meta"] = writer.run_meta
    writer.emit(record)
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace, config: RunConfig) -> int:
    writer = ScanLogger(run_meta(args, config))
    record = discrete_baseline().to_dict()
    record["meta"] = writer.run_meta
    writer.emit(record)
    return EXIT_OK


def cmd_fur_scan(args: argparse.Namespace, config: RunConfig) -> int:
    betas = grid(args.beta_grid, "beta")
    if args.state:
        result = fur_state_scan(
            load_state(args.state), betas, args.outcome, config.region,
            config.bound_tolerance, config.tail_tolerance,
        )
    else:
        gammas = grid(args.gamma_grid, "gamma")
        span_g = float(np.abs(gammas).max()) if gammas.size else 0.0
        span_b = float(np.abs(betas).max()) if betas.size else 0.0
        result = fur_scan(
            gammas, betas, args.outcome, config.region, config.bound_tolerance,
            dim=config.resolve_dim(span_g, span_b), tail_tol=config.tail_tolerance,
        )
    writer = ScanLogger(run_meta(args, config))
    writer.log_summary("ПРОВЕРКА FUR", result)
    outside = int(np.count_nonzero(~np.asarray(result.extras["within_bounds"], dtype=bool)))
    log.info(f"Ячеек вне [¼, ¾] с допуском: {outside}")

    if args.format == "json":
        writer.write_scan_json(result, out_path(args, "fur_scan.json"))
    else:
        writer.write_scan_csv(result, out_path(args, "fur_scan.csv"))
    return EXIT_OK


# ── Парсер ────────────────────────────────────────────────────────────────────

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("общие параметры")
    g.add_argument("--dim", default="auto", metavar="auto|N",
                   help="Усечение фоковского базиса (по умолчанию: auto)")
    g.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, metavar="X",
                   help=f"Допуск пуассоновского хвоста (по умолчанию: {DEFAULT_TAIL_TOL})")
    g.add_argument("--bound-tol", type=float, default=DEFAULT_BOUND_TOL, metavar="X",
                   help=f"Допуск границ ¼, ¾ (по умолчанию: {DEFAULT_BOUND_TOL})")
    g.add_argument("--beta-min", type=float, default=DEFAULT_BETA_MIN, metavar="X",
                   help=f"Радиус исключённой области по β (по умолчанию: {DEFAULT_BETA_MIN})")
    g.add_argument("--photon-floor", type=float, default=DEFAULT_PHOTON_FLOOR, metavar="X",
                   help=f"Порог среднего числа фотонов (по умолчанию: {DEFAULT_PHOTON_FLOOR})")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"Семя генератора (по умолчанию: {DEFAULT_SEED})")
    g.add_argument("--config", metavar="FILE",
                   help="Конфиг из JSON или из meta файла результата (CSV или JSON);\n"
                        "заменяет --dim, --tail-tol, --bound-tol, --beta-min, --photon-floor, --seed")
    g.add_argument("--out", metavar="PATH", help="Файл результата (по умолчанию: results/<команда>.*)")
    g.add_argument("--format", choices=("csv", "json"), default="csv", help="Формат файла результата")
    g.add_argument("--quiet", action="store_true", help="Только предупреждения и ошибки")
    return common


def _grid_arg(parser: argparse.ArgumentParser, name: str, default: tuple, what: str) -> None:
    parser.add_argument(
        f"--{name}-grid", nargs=3, type=float, default=list(default),
        metavar=("START", "STOP", "NUM"),
        help=f"Сетка {what}: linspace(START, STOP, NUM) (по умолчанию: {' '.join(map(str, default))})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m simulation.runner",
        description="Смещённая чётность: FUR, управляемость N00N, моногамия и скорость ключа",
        formatter_class=argparse.RawTextHelpFormatter,
        epilog=(
            "Примеры использования:\n"
            "  python -m simulation.runner fig1\n"
            "  python -m simulation.runner noon-scan --N 4 --b 0 --a 0\n"
            "  python -m simulation.runner steer-check --state states/noon_2.json --a 1 --b 0 "
            "--alpha 0.5 --beta 0.05\n"
            "  python -m simulation.runner monogamy --samples 1000 --seed 42\n"
            "  python -m simulation.runner key-rate --delta 0.25\n"
        ),
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                           formatter_class=argparse.RawTextHelpFormatter)
        p.set_defaults(handler=handler)
        return p

    p = add("fig1", cmd_fig1, "sup/inf средней определённости по β для когерентных состояний")
    _grid_arg(p, "gamma", FIG1_GAMMA_GRID, "γ")
    _grid_arg(p, "beta", FIG1_BETA_GRID, "β")
    p.add_argument("--no-refine", action="store_true", help="Без уточнения золотым сечением")

    p = add("noon-scan", cmd_noon_scan, "Скан функционала управляемости для состояния N00N")
    p.add_argument("--N", type=int, default=2, help="Число фотонов N (по умолчанию: 2)")
    p.add_argument("--b", default="0", help="Исход Боба: 0/even или 1/odd (по умолчанию: 0)")
    p.add_argument("--a", default="1", help="Исход Алисы: 0/even или 1/odd (по умолчанию: 1)")
    _grid_arg(p, "alpha", NOON_ALPHA_GRID, "α")
    _grid_arg(p, "beta", NOON_BETA_GRID, "β")

    p = add("steer-check", cmd_steer_check, "Функционал управляемости для состояния из файла")
    p.add_argument("--state", required=True, metavar="FILE", help="JSON-файл двухмодового состояния")
    p.add_argument("--a", required=True, help="Исход Алисы")
    p.add_argument("--b", required=True, help="Исход Боба")
    p.add_argument("--alpha", nargs="+", type=float, required=True, metavar="A",
                   help="α₁ [α₂]; одно значение означает (α, −α)")
    p.add_argument("--beta", nargs="+", type=float, required=True, metavar="B",
                   help="β₁ [β₂]; одно значение означает (β, −β)")

    p = add("monogamy", cmd_monogamy, "Проверка моногамии на случайных трёхсторонних смесях")
    p.add_argument("--samples", type=int, default=1000, help="Число выборок (по умолчанию: 1000)")
    p.add_argument("--terms", type=int, default=4, help="Слагаемых в смеси (по умолчанию: 4)")

    p = add("key-rate", cmd_key_rate, "Нижняя граница скорости ключа")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--delta", type=float, help="Нарушение δ ∈ (0, ¼]")
    source.add_argument("--violation", type=float, help="Значение функционала ∈ (¾, 1]")

    add("baseline", cmd_baseline, "Константы дискретного FUR для сравнения")

    p = add("fur-scan", cmd_fur_scan, "check_fur на сетке (γ, β) или для файла состояния")
    p.add_argument("--outcome", default="even", help="Исход: even/odd (по умолчанию: even)")
    p.add_argument("--state", metavar="FILE", help="Одномодовое состояние вместо сетки γ")
    _grid_arg(p, "gamma", FUR_GAMMA_GRID, "γ")
    _grid_arg(p, "beta", FUR_BETA_GRID, "β")

    return parser


# ── Запуск ────────────────────────────────────────────────────────────────────

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    logging.getLogger().setLevel(logging.WARNING if args.quiet else logging.INFO)

    try:
        config = RunConfig.from_json(args.config) if args.config else RunConfig.from_args(args)
        return args.handler(args, config)
    except DegenerateConditioning as e:
        log.error(f"Вырожденное условие: {e}")
        return EXIT_DEGENERATE
    except (EmptyGrid, DegenerateScan) as e:
        log.error(f"Пустой скан: {e}")
        return EXIT_EMPTY_SCAN
    except OSError as e:
        log.error(f"Ошибка ввода-вывода: {e}")
        return EXIT_IO
    except FockError as e:
        log.error(f"Ошибка конфигурации: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
