"""
DenseTile: Quality Metrics
Метрика швов, глобальный эталон поля моментов, абляция гранулярности
"""

import logging
from typing import Iterable, Optional

import numpy as np

from src.errors import BadGranularity, NonMultipleDimensions
from src.infrastructure.cache import MomentTable
from src.models.schemas import BasisMatrices, GridSpec, NormKind, SeamReport, StrategyConfig, StylizerSpec
from src.normalization.interp import densify, precompute_basis
from src.normalization.moments import as_channels, query_neighborhood
from src.pipeline.executor import run_single_pass
from src.tiling.grid import iter_coords
from src.tiling.imageio import ArrayTileSource, assemble_tiles, tile_slices


logger = logging.getLogger(__name__)

SEAM_EPS = 1e-12


# ============================================================
# Швы
# ============================================================

def seam_energy(image: np.ndarray, grid: GridSpec) -> SeamReport:
    """
    Средняя |p - q| по соседним парам пикселей: через границу патча
    и внутри патча; усреднение по всем каналам
    """
    image = as_channels(image)
    height, width = image.shape[:2]
    if (height, width) != (grid.height_px, grid.width_px):
        raise NonMultipleDimensions(height, width, grid.patch_size)
    n = grid.patch_size

    # Пара (i, i+1) пересекает границу, когда (i + 1) кратно n
    down = np.abs(np.diff(image, axis=0))
    right = np.abs(np.diff(image, axis=1))
    row_seam = (np.arange(1, height) % n) == 0
    col_seam = (np.arange(1, width) % n) == 0

    boundary_sum = down[row_seam].sum() + right[:, col_seam].sum()
    boundary_count = down[row_seam].size + right[:, col_seam].size
    interior_sum = down[~row_seam].sum() + right[:, ~col_seam].sum()
    interior_count = down[~row_seam].size + right[:, ~col_seam].size

    boundary = float(boundary_sum / boundary_count) if boundary_count else 0.0
    interior = float(interior_sum / interior_count) if interior_count else 0.0

    return SeamReport(
        boundary_mean_absdiff=boundary,
        interior_mean_absdiff=interior,
        seam_ratio=boundary / (interior + SEAM_EPS),
        row_boundaries=[float(down[i].mean()) for i in np.flatnonzero(row_seam)],
        col_boundaries=[float(right[:, j].mean()) for j in np.flatnonzero(col_seam)],
    )


# ============================================================
# Глобальный эталон поля моментов
# ============================================================

def _axis_samples(length: int, nodes: int, n: int) -> list[tuple[int, int, float]]:
    """
    Для каждого пикселя оси: (нижний узел, верхний узел, доля)

    Узлы стоят в центрах патчей. Пиксель p попадает в ячейку между узлами
    (p + n/2) // n - 1 и следующим, с долей v_k / N = k / (N - 1),
    где k = (p + n/2) mod n. За краем узлы прижимаются к сетке.
    """
    samples = []
    for p in range(length):
        u = p + n // 2
        cell = u // n - 1
        lo = min(max(cell, 0), nodes - 1)
        hi = min(max(cell + 1, 0), nodes - 1)
        samples.append((lo, hi, (u % n) / (n - 1)))
    return samples


def global_field_oracle(table: MomentTable, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    Попиксельные μ и 1/σ по всему изображению, (H, W, C) каждое

    Прямое билинейное вычисление по решётке центров патчей, независимое
    от densify.
    """
    means, stds = table.as_arrays()
    inv = 1.0 / stds
    n = grid.patch_size
    rows = _axis_samples(grid.height_px, grid.rows, n)
    cols = _axis_samples(grid.width_px, grid.cols, n)

    lo_x = np.array([s[0] for s in cols])
    hi_x = np.array([s[1] for s in cols])
    fx = np.array([s[2] for s in cols])[:, None]

    mu_field = np.empty((grid.height_px, grid.width_px, means.shape[-1]))
    inv_field = np.empty_like(mu_field)

    for y, (lo_y, hi_y, fy) in enumerate(rows):
        for src, dst in ((means, mu_field), (inv, inv_field)):
            top = (1 - fx) * src[lo_y, lo_x] + fx * src[lo_y, hi_x]
            bottom = (1 - fx) * src[hi_y, lo_x] + fx * src[hi_y, hi_x]
            dst[y] = (1 - fy) * top + fy * bottom

    return mu_field, inv_field


def stitch_pixel_fields(
    table: MomentTable,
    grid: GridSpec,
    basis: Optional[BasisMatrices] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Поля densify всех патчей, сшитые в изображение"""
    basis = basis or precompute_basis(grid.patch_size)
    mu_field = None
    inv_field = None

    for coord in iter_coords(grid):
        field = densify(query_neighborhood(table, coord), basis)
        if mu_field is None:
            shape = (grid.height_px, grid.width_px, field.mu_hat.shape[-1])
            mu_field, inv_field = np.empty(shape), np.empty(shape)
        rows, cols = tile_slices(coord, grid)
        mu_field[rows, cols] = field.mu_hat
        inv_field[rows, cols] = field.inv_sigma_hat

    return mu_field, inv_field


# ============================================================
# Абляция гранулярности
# ============================================================

async def ablate_granularity(
    image: np.ndarray,
    grid: GridSpec,
    stylizer: StylizerSpec,
    granularities: Iterable[int],
    epsilon: float = 1e-5,
    threads: int = 2,
) -> dict[int, SeamReport]:
    """Прогон DN для каждого g и метрика швов результата"""
    granularities = list(granularities)
    for g in granularities:
        if g < 1 or grid.patch_size % g:
            raise BadGranularity(g, grid.patch_size)

    source = ArrayTileSource(image, grid)
    reports: dict[int, SeamReport] = {}
    for g in granularities:
        strategy = StrategyConfig(kind=NormKind.DN, epsilon=epsilon, granularity=g)
        tiles, _ = await run_single_pass(source, grid, strategy, stylizer, threads=threads)
        output = np.clip(assemble_tiles(tiles, grid), 0.0, 1.0)
        reports[g] = seam_energy(output, grid)
        logger.info("granularity %d: seam_ratio=%.4f", g, reports[g].seam_ratio)

    return reports
