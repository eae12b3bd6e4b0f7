"""
DenseTile: Command Line Interface
Команды translate / bench / ablate / seams
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import Field, ValidationError, model_validator

from src.config import (
    DEFAULT_GRANULARITY,
    DEFAULT_KIN_KERNEL,
    DEFAULT_STYLE,
    GRANULARITY_SWEEP,
    Settings,
)
from src.errors import ConfigurationError, DenseTileError
from src.infrastructure.cache import MomentTable
from src.models.schemas import (
    REPORT_SCHEMA,
    AffineParams,
    NormKind,
    StrategyConfig,
    StylizerSpec,
)
from src.monitoring.benchmark import bench_interpolation, bench_pipeline, pipeline_speedup
from src.monitoring.metrics import ablate_granularity, seam_energy
from src.normalization.moments import compute_moments, store_moments
from src.normalization.strategies import tin_global_stats
from src.pipeline.executor import translate_image
from src.pipeline.stylizer import PatchTranslator
from src.tiling.grid import make_grid
from src.tiling.imageio import PaddedImage, extract_tiles, load_image, pad_reflect, save_image
from src.tiling.synthetic import checkerboard_image, gradient_image


logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

Command = Literal["translate", "bench", "ablate", "seams"]


# ============================================================
# Конфигурация
# ============================================================

class CliConfig(Settings):
    """
    Настройки одного запуска CLI

    Явные флаги > переменные DENSETILE_* > значения по умолчанию.
    """

    command: Command
    input: Optional[str] = None
    output: Optional[str] = None

    style: Optional[str] = None
    style_from: Optional[str] = None
    synthetic: Optional[Literal["gradient", "checkerboard"]] = None
    synthetic_height: Optional[int] = Field(default=None, gt=0)
    synthetic_width: Optional[int] = Field(default=None, gt=0)

    report: Optional[str] = None
    dump_moments: Optional[str] = None

    granularities: Optional[list[int]] = None
    iterations: int = Field(default=100, ge=1)
    with_pipeline: bool = True

    threads: int = Field(default=2, ge=1, le=2)

    @model_validator(mode="after")
    def _consistent(self) -> "CliConfig":
        if self.granularity is not None and self.norm != "dn":
            raise ValueError("--granularity applies only to --norm dn")
        if self.kin_kernel is not None and self.norm != "kin":
            raise ValueError("--kin-kernel applies only to --norm kin")
        if self.style and self.style_from:
            raise ValueError("--style and --style-from are mutually exclusive")
        if self.command in ("translate", "seams") and not (self.input or self.synthetic):
            raise ValueError(f"{self.command} needs an input image or --synthetic")
        if self.command == "translate" and not self.output:
            raise ValueError("translate needs an output path")
        return self

    @property
    def dims(self) -> tuple[int, int]:
        return (
            self.synthetic_height or self.synthetic_size,
            self.synthetic_width or self.synthetic_size,
        )

    def strategy(self) -> StrategyConfig:
        return StrategyConfig(
            kind=NormKind(self.norm),
            epsilon=self.epsilon,
            kin_kernel=self.kin_kernel or DEFAULT_KIN_KERNEL,
            granularity=self.granularity or DEFAULT_GRANULARITY,
        )


def parse_granularities(text: str) -> list[int]:
    """
    "1,2,4,...,512" -> [1, 2, 4, 8, ..., 512]

    "..." заполняет промежуток удвоением (или делением пополам для
    убывающего списка) между соседними значениями.
    """
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    values: list[int] = []

    for i, token in enumerate(tokens):
        if token != "...":
            try:
                values.append(int(token))
            except ValueError:
                raise ConfigurationError(f"Bad granularity value {token!r}")
            continue

        if not values or i + 1 >= len(tokens) or tokens[i + 1] == "...":
            raise ConfigurationError(f"'...' needs a value on both sides in {text!r}")
        start, stop = values[-1], int(tokens[i + 1])
        if start < 1 or stop < 1:
            raise ConfigurationError(f"Granularity must be positive in {text!r}")

        g = start
        if stop > start:
            while g * 2 < stop:
                g *= 2
                values.append(g)
        else:
            while g // 2 > stop:
                g //= 2
                values.append(g)

    if not values:
        raise ConfigurationError("Empty granularity list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densetile",
        description="Dense normalization for tiled ultra-high-resolution images",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--patch-size", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--synthetic", choices=["gradient", "checkerboard"], default=None)
        p.add_argument("--size", dest="synthetic_size", type=int, default=None)
        p.add_argument("--height", dest="synthetic_height", type=int, default=None)
        p.add_argument("--width", dest="synthetic_width", type=int, default=None)
        p.add_argument("--json", dest="json_output", action="store_true", default=None)
        p.add_argument("--log-level", default=None)

    def styled(p: argparse.ArgumentParser):
        p.add_argument("--style", default=None, help="JSON file or inline JSON")
        p.add_argument("--style-from", default=None, help="Reference image for target moments")

    translate = sub.add_parser("translate", help="Translate an image patch by patch")
    translate.add_argument("input", nargs="?", default=None)
    translate.add_argument("output", nargs="?", default=None)
    translate.add_argument("--norm", choices=["in", "tin", "kin", "dn"], default=None)
    translate.add_argument("--kin-kernel", type=int, default=None)
    translate.add_argument("--granularity", default=None)
    translate.add_argument("--pipeline", choices=["single", "two-stage"], default=None)
    translate.add_argument("--report", default=None)
    translate.add_argument("--dump-moments", default=None)
    common(translate)
    styled(translate)

    bench = sub.add_parser("bench", help="Time interpolation variants and pipelines")
    bench.add_argument("--iterations", type=int, default=None)
    bench.add_argument("--no-pipeline", dest="with_pipeline", action="store_false", default=None)
    common(bench)
    styled(bench)

    ablate = sub.add_parser("ablate", help="Seam ratio per interpolating granularity")
    ablate.add_argument("input", nargs="?", default=None)
    ablate.add_argument("--granularity", default=None, help="e.g. 1,2,4,...,512")
    common(ablate)
    styled(ablate)

    seams = sub.add_parser("seams", help="Seam ratio of an existing image")
    seams.add_argument("input", nargs="?", default=None)
    common(seams)

    return parser


def build_config(argv: Optional[list[str]] = None) -> CliConfig:
    """Разбор argv; в CliConfig передаются только явно заданные флаги"""
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if v is not None}

    # translate --synthetic OUT: единственный позиционный аргумент это выход
    if args.command == "translate" and args.synthetic and args.output is None:
        if "input" in overrides:
            overrides["output"] = overrides.pop("input")

    granularity = overrides.pop("granularity", None)
    if granularity is not None:
        if args.command == "ablate":
            overrides["granularities"] = parse_granularities(granularity)
        else:
            try:
                overrides["granularity"] = int(granularity)
            except ValueError:
                raise ConfigurationError(f"Bad granularity value {granularity!r}")

    return CliConfig(**overrides)


# ============================================================
# Входные данные
# ============================================================

def style_from_dict(data: dict) -> StylizerSpec:
    """{"target_mean", "target_std", "gamma", "beta"} -> StylizerSpec"""
    data = dict(data)
    affine = AffineParams(
        gamma=data.pop("gamma", [1.0]),
        beta=data.pop("beta", [0.0]),
    )
    return StylizerSpec(**data, affine=affine)


def default_style(channels: int) -> StylizerSpec:
    if channels == len(DEFAULT_STYLE["target_mean"]):
        return style_from_dict(DEFAULT_STYLE)
    # Для серых изображений цели усредняются по каналам
    return style_from_dict({
        key: [float(np.mean(values))] * channels for key, values in DEFAULT_STYLE.items()
    })


def load_style(config: CliConfig, channels: int) -> StylizerSpec:
    if config.style_from:
        moments = tin_global_stats(load_image(config.style_from), config.epsilon)
        return StylizerSpec(
            target_mean=moments.mean.tolist(),
            target_std=moments.stddev.tolist(),
        )

    if config.style:
        text = config.style
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text(encoding="utf-8")
            except OSError as e:
                raise ConfigurationError(f"Cannot read style {config.style}: {e}") from e
        try:
            return style_from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Style is not valid JSON: {e}") from e

    return default_style(channels)


def load_input(config: CliConfig) -> np.ndarray:
    if config.input:
        return load_image(config.input)

    height, width = config.dims
    if config.synthetic == "checkerboard":
        return checkerboard_image(height, width, config.patch_size)
    return gradient_image(height, width, seed=config.seed)


def _emit(payload: dict, config: CliConfig, text: str):
    if config.json_output:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _dump(model) -> dict:
    return model.model_dump(mode="json", by_alias=True)


# ============================================================
# Команды
# ============================================================

def compute_moment_table(padded: PaddedImage, epsilon: float) -> MomentTable:
    """Моменты всех патчей дополненного изображения"""
    table = MomentTable(padded.grid, name="moments")
    for coord, tile in extract_tiles(padded, padded.grid).items():
        store_moments(table, coord, compute_moments(tile, epsilon))
    return table


def dump_moment_table(table: MomentTable, path: str):
    """Таблица моментов в JSON"""
    Path(path).write_text(table.dump_json(), encoding="utf-8")
    logger.info("Moment table written to %s", path)


def run_translate(config: CliConfig):
    image = load_input(config)
    stylizer = load_style(config, image.shape[-1])
    strategy = config.strategy()
    # KIN и DN заполняют таблицу в самом проходе: она и уходит в дамп
    translator = PatchTranslator(strategy, stylizer, pad_reflect(image, config.patch_size).grid)

    output, report, padded = asyncio.run(translate_image(
        image,
        config.patch_size,
        strategy,
        stylizer,
        pipeline=config.pipeline,
        threads=config.threads,
        translator=translator,
    ))
    save_image(config.output, output)

    if config.dump_moments:
        table = translator.table
        if table is None:
            table = compute_moment_table(padded, config.epsilon)
        dump_moment_table(table, config.dump_moments)
    if config.report:
        Path(config.report).write_text(report.to_json(), encoding="utf-8")

    _emit(
        _dump(report),
        config,
        f"{config.output}: {report.patches_translated} patches, "
        f"{report.steps_executed} steps, {report.wall_time_ms['total']:.1f} ms "
        f"({report.mode}, {strategy.kind.value})",
    )


def run_bench(config: CliConfig):
    rows = bench_interpolation(config.patch_size, config.iterations, seed=config.seed)
    payload: dict = {
        "schema": REPORT_SCHEMA,
        "interpolation": [_dump(r) for r in rows],
    }
    lines = [f"{'variant':<14}{'per_patch_ms':>14}{'whole_image_ms':>16}{'speedup':>10}"]
    lines += [
        f"{r.variant:<14}{r.per_patch_ms:>14.4f}{r.whole_image_ms:>16.1f}{r.speedup:>10.1f}"
        for r in rows
    ]

    if config.with_pipeline:
        height, width = config.dims
        image = gradient_image(height, width, seed=config.seed)
        reports = asyncio.run(bench_pipeline(
            image,
            config.patch_size,
            load_style(config, image.shape[-1]),
            threads=config.threads,
            epsilon=config.epsilon,
        ))
        speedup = pipeline_speedup(reports)
        payload["pipeline"] = {mode: _dump(r) for mode, r in reports.items()}
        payload["single_pass_speedup"] = speedup
        lines.append("")
        lines += [
            f"{mode:<14}{r.wall_time_ms['total']:>14.1f} ms  {r.steps_executed} steps"
            for mode, r in reports.items()
        ]
        direction = "faster" if speedup >= 1.0 else "slower"
        lines.append(f"single-pass is {direction} than two-stage (x{speedup:.2f})")

    _emit(payload, config, "\n".join(lines))


def run_ablate(config: CliConfig):
    image = load_input(config)
    stylizer = load_style(config, image.shape[-1])
    padded = pad_reflect(image, config.patch_size)
    grid = padded.grid
    granularities = config.granularities or [
        g for g in GRANULARITY_SWEEP if g <= config.patch_size and config.patch_size % g == 0
    ]

    # Базовая линия: нормализация каждого патча по своим моментам
    baseline_strategy = StrategyConfig(kind=NormKind.PATCH_IN, epsilon=config.epsilon)
    baseline, _, _ = asyncio.run(translate_image(
        padded.pixels, config.patch_size, baseline_strategy, stylizer, threads=config.threads
    ))
    baseline_report = seam_energy(np.clip(baseline, 0.0, 1.0), grid)

    reports = asyncio.run(ablate_granularity(
        padded.pixels, grid, stylizer, granularities, config.epsilon, config.threads
    ))

    payload = {
        "schema": REPORT_SCHEMA,
        "baseline_in": _dump(baseline_report),
        "granularity": {str(g): _dump(r) for g, r in reports.items()},
    }
    lines = [f"{'g':>6}{'seam_ratio':>14}{'boundary':>12}{'interior':>12}"]
    lines.append(
        f"{'in':>6}{baseline_report.seam_ratio:>14.4f}"
        f"{baseline_report.boundary_mean_absdiff:>12.5f}"
        f"{baseline_report.interior_mean_absdiff:>12.5f}"
    )
    lines += [
        f"{g:>6}{r.seam_ratio:>14.4f}{r.boundary_mean_absdiff:>12.5f}{r.interior_mean_absdiff:>12.5f}"
        for g, r in reports.items()
    ]
    _emit(payload, config, "\n".join(lines))


def run_seams(config: CliConfig):
    image = load_input(config)
    grid = make_grid(image.shape[0], image.shape[1], config.patch_size)
    report = seam_energy(image, grid)
    _emit(
        _dump(report),
        config,
        f"seam_ratio={report.seam_ratio:.4f} "
        f"boundary={report.boundary_mean_absdiff:.5f} "
        f"interior={report.interior_mean_absdiff:.5f}",
    )


COMMANDS = {
    "translate": run_translate,
    "bench": run_bench,
    "ablate": run_ablate,
    "seams": run_seams,
}


# ============================================================
# Точка входа
# ============================================================

def configure_logging(level: str):
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level.upper())


def main(argv: Optional[list[str]] = None) -> int:
    """Код выхода: 0 успех, 2 конфигурация, 3 ввод-вывод, 4 протокол конвейера"""
    configure_logging("INFO")
    try:
        config = build_config(argv)
        configure_logging(config.log_level)
        COMMANDS[config.command](config)
    except ValidationError as e:
        logger.error("Invalid configuration: %s", e)
        return ConfigurationError.exit_code
    except DenseTileError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    return 0
