"""
DenseTile: Test Configuration
Фикстуры и конфигурация для тестов
"""

import numpy as np
import pytest

from src.infrastructure.cache import MomentTable
from src.models.schemas import ChannelMoments, GridSpec, StylizerSpec
from src.monitoring.tracing import AccessTracer
from src.tiling.grid import iter_coords, make_grid
from src.tiling.synthetic import gradient_image


# ============================================================
# Fixtures: Geometry
# ============================================================

@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def grid_3x2() -> GridSpec:
    """3 строки патчей, 2 столбца, N=8"""
    return make_grid(24, 16, 8)


@pytest.fixture
def grid_4x4() -> GridSpec:
    return make_grid(64, 64, 16)


# ============================================================
# Fixtures: Moment Tables
# ============================================================

def fill_random_table(grid: GridSpec, rng: np.random.Generator, channels: int = 3) -> MomentTable:
    table = MomentTable(grid, name="test")
    for coord in iter_coords(grid):
        table.store(
            coord,
            ChannelMoments(
                mean=rng.uniform(0.0, 1.0, size=channels),
                stddev=rng.uniform(0.05, 0.5, size=channels),
            ),
        )
    return table


@pytest.fixture
def random_table(grid_4x4, rng) -> MomentTable:
    return fill_random_table(grid_4x4, rng)


@pytest.fixture
def tracer() -> AccessTracer:
    return AccessTracer()


# ============================================================
# Fixtures: Images & Styles
# ============================================================

@pytest.fixture
def gradient_128() -> np.ndarray:
    return gradient_image(128, 128, seed=7)


@pytest.fixture
def random_image(rng) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(48, 32, 3))


@pytest.fixture
def stylizer() -> StylizerSpec:
    return StylizerSpec(
        target_mean=[0.55, 0.45, 0.4],
        target_std=[0.2, 0.15, 0.1],
    )


@pytest.fixture
def identity_stylizer() -> StylizerSpec:
    return StylizerSpec(target_mean=[0.0, 0.0, 0.0], target_std=[1.0, 1.0, 1.0])
