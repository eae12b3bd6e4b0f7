"""
DenseTile: Patch Moments
Моменты патчей, запись в кэш и запросы окрестностей
"""

from typing import Optional

import numpy as np

from src.errors import EmptyPatch
from src.infrastructure.cache import MomentTable
from src.models.schemas import ChannelMoments, Coord, GridSpec, Neighborhood3x3


def as_channels(array: np.ndarray) -> np.ndarray:
    """(H, W) -> (H, W, 1); (H, W, C) без изменений"""
    array = np.asarray(array, dtype=np.float64)
    if array.ndim == 2:
        return array[..., np.newaxis]
    return array


def compute_moments(patch: np.ndarray, epsilon: float) -> ChannelMoments:
    """
    Среднее и СКО по каналам (как в instance normalization)

    Дисперсия смещённая; stddev = sqrt(var + epsilon).
    """
    patch = as_channels(patch)
    if patch.size == 0:
        raise EmptyPatch()
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")

    flat = patch.reshape(-1, patch.shape[-1])
    mean = flat.mean(axis=0)
    var = flat.var(axis=0)
    return ChannelMoments(mean=mean, stddev=np.sqrt(var + epsilon))


def store_moments(
    table: MomentTable,
    coord: Coord,
    moments: ChannelMoments,
    step: Optional[int] = None,
):
    """Записать моменты в кэш по координате"""
    table.store(coord, moments, step=step)


def query_window(
    table: MomentTable,
    coord: Coord,
    radius: int,
    step: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Окно (2*radius+1)^2 вокруг coord: массивы средних и СКО (k, k, C)

    Позиции за краем сетки заполняются ближайшим патчем.
    Каждая координата читается из кэша один раз.
    """
    grid = table.grid
    c, r = coord
    size = 2 * radius + 1
    fetched: dict[Coord, ChannelMoments] = {}
    mu = None
    sigma = None

    for i in range(size):
        for j in range(size):
            key = grid.clamp((c + i - radius, r + j - radius))
            if key not in fetched:
                fetched[key] = table.get(key, step=step)
            entry = fetched[key]
            if mu is None:
                mu = np.empty((size, size, entry.channels))
                sigma = np.empty((size, size, entry.channels))
            mu[i, j] = entry.mean
            sigma[i, j] = entry.stddev

    return mu, sigma


def query_neighborhood(
    table: MomentTable,
    coord: Coord,
    grid: Optional[GridSpec] = None,
    step: Optional[int] = None,
) -> Neighborhood3x3:
    """Моменты патча и восьми соседей (ключи {c-1,c,c+1} x {r-1,r,r+1})"""
    if grid is not None and grid != table.grid:
        raise ValueError("grid does not match the moment table")
    mu, sigma = query_window(table, coord, radius=1, step=step)
    return Neighborhood3x3(mu=mu, sigma=sigma)
