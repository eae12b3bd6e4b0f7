"""
DenseTile: Benchmarks
Время вариантов интерполяции и сравнение однопроходного и двухэтапного конвейера
"""

import logging
import math
import sys
import time
from typing import Callable, Optional

import numpy as np

from src.config import BENCH_REFERENCE_IMAGE
from src.errors import BenchmarkGateFailed, OddPatchSize
from src.models.schemas import BenchReport, NormKind, PassReport, StrategyConfig, StylizerSpec
from src.normalization.interp import (
    fast_interp_cell,
    naive_bilinear_cell,
    precompute_basis,
    reformulated_interp_cell,
)
from src.pipeline.executor import translate_image

try:
    import resource
except ImportError:  # Windows
    resource = None


logger = logging.getLogger(__name__)

# На патч: 4 угла окрестности x (μ, 1/σ)
CELLS_PER_PATCH = 8
GATE_RTOL = 1e-6
# naive попиксельно медленный, поэтому сверка идёт на первых ячейках
GATE_CELLS = 4


def reference_patch_count(n: int) -> int:
    """Число патчей эталонного изображения при размере патча n"""
    height, width = BENCH_REFERENCE_IMAGE
    return math.ceil(height / n) * math.ceil(width / n)


def _variants(n: int) -> dict[str, Callable[[np.ndarray], np.ndarray]]:
    basis = precompute_basis(n)
    return {
        "naive": lambda q: naive_bilinear_cell(q, n),
        "reformulated": lambda q: reformulated_interp_cell(q, n),
        "precomputed": lambda q: fast_interp_cell(q, basis),
    }


def _gate(variants: dict[str, Callable], cells: np.ndarray):
    """Все варианты обязаны совпасть с naive до замера времени"""
    for q in cells:
        expected = variants["naive"](q)
        scale = np.maximum(np.abs(expected), 1.0)
        for name, fn in variants.items():
            if name == "naive":
                continue
            error = float(np.max(np.abs(fn(q) - expected) / scale))
            if error > GATE_RTOL:
                raise BenchmarkGateFailed(name, error)


def bench_interpolation(
    n: int,
    iterations: int,
    seed: int = 0,
    patches: Optional[int] = None,
) -> list[BenchReport]:
    """
    Замер трёх вариантов на одинаковых случайных ячейках 2x2

    Каждый вариант гоняется в текущем потоке. Возвращает отчёты
    в порядке naive, reformulated, precomputed.
    """
    if n < 2 or n % 2:
        raise OddPatchSize(n)
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")

    patches = patches or reference_patch_count(n)
    rng = np.random.default_rng(seed)
    cells = rng.uniform(0.0, 1.0, size=(iterations, 2, 2))
    variants = _variants(n)

    _gate(variants, cells[:GATE_CELLS])

    per_cell: dict[str, float] = {}
    for name, fn in variants.items():
        started = time.perf_counter()
        for q in cells:
            fn(q)
        per_cell[name] = (time.perf_counter() - started) * 1000 / iterations

    reports = []
    for name, cell_ms in per_cell.items():
        per_patch = cell_ms * CELLS_PER_PATCH
        report = BenchReport(
            variant=name,
            n=n,
            iterations=iterations,
            patches=patches,
            per_cell_ms=cell_ms,
            per_patch_ms=per_patch,
            whole_image_ms=per_patch * patches,
            speedup=per_cell["naive"] / cell_ms if cell_ms > 0 else float("inf"),
        )
        logger.info(
            "bench %s n=%d: %.4f ms/patch, x%.1f", name, n, per_patch, report.speedup
        )
        reports.append(report)
    return reports


# ============================================================
# Конвейер
# ============================================================

def peak_rss_mb() -> Optional[float]:
    """Пиковый RSS процесса, если платформа его сообщает"""
    if resource is None:
        return None
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # macOS сообщает байты, Linux килобайты
    return peak / (1024 * 1024) if sys.platform == "darwin" else peak / 1024


async def bench_pipeline(
    image: np.ndarray,
    patch_size: int,
    stylizer: StylizerSpec,
    threads: int = 2,
    epsilon: float = 1e-5,
) -> dict[str, PassReport]:
    """
    DN однопроходным и двухэтапным конвейером на одном изображении

    Выходы обязаны совпасть побитно, иначе BenchmarkGateFailed.
    """
    strategy = StrategyConfig(kind=NormKind.DN, epsilon=epsilon)
    outputs: dict[str, np.ndarray] = {}
    reports: dict[str, PassReport] = {}

    for mode in ("single", "two-stage"):
        output, report, _ = await translate_image(
            image, patch_size, strategy, stylizer, pipeline=mode, threads=threads
        )
        outputs[mode] = output
        reports[mode] = report.model_copy(update={"peak_rss_mb": peak_rss_mb()})

    if not np.array_equal(outputs["single"], outputs["two-stage"]):
        error = float(np.max(np.abs(outputs["single"] - outputs["two-stage"])))
        raise BenchmarkGateFailed("two-stage", error)

    speedup = pipeline_speedup(reports)
    logger.info(
        "pipeline bench: single=%.1fms two-stage=%.1fms, single-pass %s (x%.2f)",
        reports["single"].wall_time_ms["total"],
        reports["two-stage"].wall_time_ms["total"],
        "faster" if speedup >= 1.0 else "slower",
        speedup,
    )
    return reports


def pipeline_speedup(reports: dict[str, PassReport]) -> float:
    """Время двухэтапного режима / время однопроходного; >= 1, если однопроходный не медленнее"""
    single = reports["single"].wall_time_ms["total"]
    staged = reports["two-stage"].wall_time_ms["total"]
    return staged / single if single > 0 else float("inf")
