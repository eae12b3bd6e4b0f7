"""
DenseTile: Patch Grid & Dispatcher
Геометрия сетки патчей и порядок выдачи пар (инференс, предвыборка)
"""

from typing import Iterator

from src.errors import NonMultipleDimensions, OddPatchSize, OutOfGrid
from src.models.schemas import Coord, DispatchStep, GridSpec


def make_grid(height_px: int, width_px: int, patch_size: int) -> GridSpec:
    """Построить сетку; размеры изображения должны быть кратны патчу"""
    if patch_size < 2 or patch_size % 2:
        raise OddPatchSize(patch_size)
    if height_px <= 0 or width_px <= 0 or height_px % patch_size or width_px % patch_size:
        raise NonMultipleDimensions(height_px, width_px, patch_size)

    return GridSpec(
        height_px=height_px,
        width_px=width_px,
        patch_size=patch_size,
        rows=height_px // patch_size,
        cols=width_px // patch_size,
    )


def linear_index(coord: Coord, grid: GridSpec) -> int:
    """Индекс в списке P: обход по столбцам, сверху вниз"""
    if not grid.contains(coord):
        raise OutOfGrid(coord, grid.rows, grid.cols)
    c, r = coord
    return r * grid.rows + c


def coord_of(index: int, grid: GridSpec) -> Coord:
    """Обратное отображение к linear_index"""
    if not 0 <= index < grid.num_patches:
        raise OutOfGrid((index % grid.rows, index // grid.rows), grid.rows, grid.cols)
    return (index % grid.rows, index // grid.rows)


def dispatch_lag(grid: GridSpec, radius: int = 1) -> int:
    """
    Опережение предвыборки относительно инференса

    Самый дальний сосед (c+radius, r+radius) имеет индекс t + radius*(h+1),
    он должен быть выбран не позже шага t-1.
    """
    return radius * (grid.rows + 1) + 1


def dispatch_sequence(grid: GridSpec, radius: int = 1) -> Iterator[DispatchStep]:
    """
    Последовательность шагов диспетчера

    На шаге t инференс получает P[t], предвыборка получает P[t + lag];
    вне диапазона [0, h*w) выдаётся пустой патч (None).
    Итерация идёт от t = -lag до h*w - 1. Генератор чистый: каждый
    вызов воспроизводит тот же порядок.
    """
    total = grid.num_patches
    lag = dispatch_lag(grid, radius)

    for t in range(-lag, total):
        ahead = t + lag
        yield DispatchStep(
            step=t,
            inference=coord_of(t, grid) if 0 <= t < total else None,
            prefetch=coord_of(ahead, grid) if 0 <= ahead < total else None,
        )


def iter_coords(grid: GridSpec) -> Iterator[Coord]:
    """Все координаты в порядке диспетчера"""
    for index in range(grid.num_patches):
        yield coord_of(index, grid)


def neighbors(coord: Coord, grid: GridSpec, radius: int = 1) -> list[Coord]:
    """Соседи в квадрате (2*radius+1)^2 внутри сетки, включая сам патч"""
    c, r = coord
    return [
        (c + dc, r + dr)
        for dr in range(-radius, radius + 1)
        for dc in range(-radius, radius + 1)
        if grid.contains((c + dc, r + dr))
    ]
