"""
DenseTile: Normalization Strategies
Патчевая IN, TIN, KIN и плотная нормализация (DN) за единым интерфейсом
"""

from abc import ABC, abstractmethod
from typing import Optional, Protocol

import numpy as np
from scipy.ndimage import uniform_filter

from src.errors import BadGranularity, EmptyImage, PipelineProtocolError, ShapeMismatch
from src.infrastructure.cache import MomentTable
from src.models.schemas import (
    AffineParams,
    ChannelMoments,
    Coord,
    GridSpec,
    NormKind,
    PixelMomentField,
    StrategyConfig,
)
from src.monitoring.tracing import AccessTracer
from src.normalization.interp import densify, precompute_basis, quantize_field
from src.normalization.moments import (
    as_channels,
    compute_moments,
    query_neighborhood,
    query_window,
    store_moments,
)


# ============================================================
# Операции нормализации
# ============================================================

def instance_normalize(
    patch: np.ndarray,
    moments: ChannelMoments,
    affine: AffineParams = AffineParams(),
) -> np.ndarray:
    """γ·(x − μ)/σ + β по каналам"""
    patch = as_channels(patch)
    gamma, beta = affine.as_arrays(patch.shape[-1])
    return gamma * ((patch - moments.mean) / moments.stddev) + beta


def dense_normalize(
    patch: np.ndarray,
    field: PixelMomentField,
    affine: AffineParams = AffineParams(),
) -> np.ndarray:
    """γ·((x − μ̂)·σ̂*) + β попиксельно"""
    patch = as_channels(patch)
    if field.mu_hat.shape != patch.shape:
        raise ShapeMismatch(patch.shape, field.mu_hat.shape)
    if field.inv_sigma_hat.shape != patch.shape:
        raise ShapeMismatch(patch.shape, field.inv_sigma_hat.shape)

    gamma, beta = affine.as_arrays(patch.shape[-1])
    return gamma * ((patch - field.mu_hat) * field.inv_sigma_hat) + beta


def tin_global_stats(image: np.ndarray, epsilon: float = 1e-5) -> ChannelMoments:
    """Глобальные моменты всего (дополненного) изображения"""
    image = as_channels(image)
    if image.size == 0:
        raise EmptyImage()
    return compute_moments(image, epsilon)


def kin_filtered_stats(
    table: MomentTable,
    coord: Coord,
    kernel: int,
    step: Optional[int] = None,
) -> ChannelMoments:
    """Усреднение μ и σ по окну kernel x kernel (на краях берётся ближайший патч)"""
    if kernel < 1 or kernel % 2 == 0:
        raise ValueError(f"KIN kernel must be odd and >= 1, got {kernel}")
    mu, sigma = query_window(table, coord, radius=kernel // 2, step=step)
    return ChannelMoments(mean=mu.mean(axis=(0, 1)), stddev=sigma.mean(axis=(0, 1)))


def kin_filtered_table(table: MomentTable, kernel: int) -> tuple[np.ndarray, np.ndarray]:
    """Та же фильтрация свёрткой по всей таблице сразу, (rows, cols, C)"""
    means, stds = table.as_arrays()
    size = (kernel, kernel, 1)
    return (
        uniform_filter(means, size=size, mode="nearest"),
        uniform_filter(stds, size=size, mode="nearest"),
    )


# ============================================================
# Стратегии
# ============================================================

class TileSource(Protocol):
    """Источник патчей, который видит стратегия"""

    def global_moments(self, epsilon: float) -> ChannelMoments: ...


class BaseNormalizer(ABC):
    """Базовый класс стратегии: слот нормализации в стилизаторе"""

    kind: NormKind
    needs_prefetch = False

    def __init__(
        self,
        config: StrategyConfig,
        grid: GridSpec,
        tracer: Optional[AccessTracer] = None,
    ):
        self.config = config
        self.grid = grid
        self.affine = config.affine
        self.table: Optional[MomentTable] = None
        if self.needs_prefetch:
            self.table = MomentTable(grid, name=config.kind.value, tracer=tracer)

    @property
    def lookahead(self) -> int:
        return self.config.lookahead

    def prepare(self, source: TileSource):
        """Подготовка перед первым шагом"""
        pass

    def prefetch(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None):
        """Ветка предвыборки: посчитать и закэшировать моменты"""
        if self.table is None:
            return
        store_moments(self.table, coord, compute_moments(patch, self.config.epsilon), step)

    @abstractmethod
    def normalize(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None) -> np.ndarray:
        """Ветка инференса: нормализовать патч"""
        pass


class PatchInstanceNormalizer(BaseNormalizer):
    """Каждый патч нормализуется своими моментами"""

    kind = NormKind.PATCH_IN

    def normalize(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None) -> np.ndarray:
        moments = compute_moments(patch, self.config.epsilon)
        return instance_normalize(patch, moments, self.affine)


class ThumbnailNormalizer(BaseNormalizer):
    """TIN: общие глобальные моменты для всех патчей"""

    kind = NormKind.TIN

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.global_moments: Optional[ChannelMoments] = None

    def prepare(self, source: TileSource):
        self.global_moments = source.global_moments(self.config.epsilon)

    def normalize(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None) -> np.ndarray:
        if self.global_moments is None:
            raise PipelineProtocolError("TIN global moments were not prepared")
        return instance_normalize(patch, self.global_moments, self.affine)


class KernelizedNormalizer(BaseNormalizer):
    """KIN: моменты, сглаженные окном по соседним патчам"""

    kind = NormKind.KIN
    needs_prefetch = True

    def normalize(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None) -> np.ndarray:
        moments = kin_filtered_stats(self.table, coord, self.config.kin_kernel, step=step)
        return instance_normalize(patch, moments, self.affine)


class DenseNormalizer(BaseNormalizer):
    """DN: попиксельные моменты из окрестности 3x3"""

    kind = NormKind.DN
    needs_prefetch = True

    def __init__(self, *args, reciprocal_sigma: bool = True, **kwargs):
        super().__init__(*args, **kwargs)
        n = self.grid.patch_size
        if n % self.config.granularity:
            raise BadGranularity(self.config.granularity, n)
        self.basis = precompute_basis(n)
        self.reciprocal_sigma = reciprocal_sigma

    def pixel_field(self, coord: Coord, step: Optional[int] = None) -> PixelMomentField:
        neighborhood = query_neighborhood(self.table, coord, step=step)
        field = densify(neighborhood, self.basis, self.reciprocal_sigma)
        return quantize_field(field, self.config.granularity)

    def normalize(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None) -> np.ndarray:
        return dense_normalize(patch, self.pixel_field(coord, step), self.affine)


NORMALIZERS: dict[NormKind, type[BaseNormalizer]] = {
    NormKind.PATCH_IN: PatchInstanceNormalizer,
    NormKind.TIN: ThumbnailNormalizer,
    NormKind.KIN: KernelizedNormalizer,
    NormKind.DN: DenseNormalizer,
}


def create_normalizer(
    config: StrategyConfig,
    grid: GridSpec,
    tracer: Optional[AccessTracer] = None,
) -> BaseNormalizer:
    """Создать стратегию по конфигурации"""
    return NORMALIZERS[config.kind](config, grid, tracer=tracer)
