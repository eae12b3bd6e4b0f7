"""
DenseTile: Pipeline Executors
Однопроходный конвейер с предвыборкой и эталонный двухэтапный режим
"""

import asyncio
import logging
import time
from typing import Callable, Literal, Optional

import numpy as np

from src.models.schemas import Coord, GridSpec, PassReport, StrategyConfig, StylizerSpec
from src.monitoring.tracing import AccessTracer
from src.pipeline.stylizer import PatchTranslator
from src.tiling.grid import dispatch_sequence, iter_coords
from src.tiling.imageio import (
    ArrayTileSource,
    PaddedImage,
    TileAssembler,
    assemble_tiles,
    pad_reflect,
)


logger = logging.getLogger(__name__)

PipelineMode = Literal["single", "two-stage"]


async def _run_step(jobs: list[Callable[[], None]], threads: int):
    """
    Один шаг диспетчера

    При threads > 1 ветки выполняются параллельно в потоках; завершение
    gather служит барьером шага, после которого запись предвыборки видна
    инференсу следующего шага.
    """
    if threads > 1 and len(jobs) > 1:
        await asyncio.gather(*(asyncio.to_thread(job) for job in jobs))
    else:
        for job in jobs:
            job()


def _report(
    mode: PipelineMode,
    steps: int,
    grid: GridSpec,
    strategy: StrategyConfig,
    translator: PatchTranslator,
    threads: int,
    started: float,
) -> PassReport:
    total_ms = (time.perf_counter() - started) * 1000
    report = PassReport(
        mode=mode,
        steps_executed=steps,
        patches_translated=grid.num_patches,
        threads=threads,
        wall_time_ms={
            "prefetch": translator.busy["prefetch"] * 1000,
            "inference": translator.busy["inference"] * 1000,
            "total": total_ms,
        },
        strategy=strategy,
    )
    logger.info(
        "%s pass: strategy=%s steps=%d patches=%d total=%.1fms",
        mode, strategy.kind.value, steps, grid.num_patches, total_ms,
    )
    return report


# ============================================================
# Однопроходный режим
# ============================================================

async def run_single_pass(
    source: ArrayTileSource,
    grid: GridSpec,
    strategy: StrategyConfig,
    stylizer: StylizerSpec,
    threads: int = 2,
    tracer: Optional[AccessTracer] = None,
    translator: Optional[PatchTranslator] = None,
) -> tuple[dict[Coord, np.ndarray], PassReport]:
    """
    Один проход по dispatch_sequence

    На шаге t ветка предвыборки кэширует моменты P[t + lag], ветка
    инференса нормализует и стилизует P[t]. Для IN и TIN предвыборка пуста.
    Готовый translator (вместе с его таблицей моментов) можно передать
    снаружи; тогда tracer не используется.
    """
    started = time.perf_counter()
    translator = translator or PatchTranslator(strategy, stylizer, grid, tracer=tracer)
    assembler = TileAssembler(grid, source.channels)
    translator.prepare(source)

    def prefetch_job(coord: Coord, step: int) -> Callable[[], None]:
        return lambda: translator.prefetch(coord, source.read(coord), step)

    def inference_job(coord: Coord, step: int) -> Callable[[], None]:
        return lambda: assembler.put(coord, translator.translate(coord, source.read(coord), step))

    steps = 0
    for item in dispatch_sequence(grid, radius=translator.lookahead):
        steps += 1
        jobs = []
        if item.prefetch is not None and translator.needs_prefetch:
            jobs.append(prefetch_job(item.prefetch, item.step))
        if item.inference is not None:
            jobs.append(inference_job(item.inference, item.step))
        logger.debug("step %d: inference=%s prefetch=%s", item.step, item.inference, item.prefetch)
        await _run_step(jobs, threads)

    report = _report("single", steps, grid, strategy, translator, threads, started)
    return assembler.tiles, report


# ============================================================
# Двухэтапный режим
# ============================================================

async def run_two_stage(
    source: ArrayTileSource,
    grid: GridSpec,
    strategy: StrategyConfig,
    stylizer: StylizerSpec,
    threads: int = 1,
    tracer: Optional[AccessTracer] = None,
    translator: Optional[PatchTranslator] = None,
) -> tuple[dict[Coord, np.ndarray], PassReport]:
    """
    Этап 1 кэширует моменты всех патчей, этап 2 переводит все патчи

    Шаги этапа 2 нумеруются после этапа 1, поэтому каждое чтение
    кэша следует за записью.
    """
    started = time.perf_counter()
    translator = translator or PatchTranslator(strategy, stylizer, grid, tracer=tracer)
    assembler = TileAssembler(grid, source.channels)
    translator.prepare(source)
    total = grid.num_patches

    def cache_stage():
        if not translator.needs_prefetch:
            return
        for step, coord in enumerate(iter_coords(grid)):
            translator.prefetch(coord, source.read(coord), step)

    def translate_stage():
        for index, coord in enumerate(iter_coords(grid)):
            assembler.put(coord, translator.translate(coord, source.read(coord), total + index))

    await asyncio.to_thread(cache_stage)
    await asyncio.to_thread(translate_stage)

    # Этапы последовательны, threads не влияет на исполнение
    report = _report("two-stage", 2 * total, grid, strategy, translator, 1, started)
    return assembler.tiles, report


EXECUTORS = {
    "single": run_single_pass,
    "two-stage": run_two_stage,
}


async def translate_image(
    image: np.ndarray,
    patch_size: int,
    strategy: StrategyConfig,
    stylizer: StylizerSpec,
    pipeline: PipelineMode = "single",
    threads: int = 2,
    tracer: Optional[AccessTracer] = None,
    translator: Optional[PatchTranslator] = None,
) -> tuple[np.ndarray, PassReport, PaddedImage]:
    """
    Полный цикл: дополнение, проход конвейера, сборка и кроп

    Возвращает выход в float (без обрезки в [0, 1]), отчёт и сведения
    о дополнении.
    """
    padded = pad_reflect(image, patch_size)
    grid = padded.grid
    source = ArrayTileSource.from_padded(padded)

    tiles, report = await EXECUTORS[pipeline](
        source, grid, strategy, stylizer, threads=threads, tracer=tracer, translator=translator
    )

    return padded.crop(assemble_tiles(tiles, grid)), report, padded
