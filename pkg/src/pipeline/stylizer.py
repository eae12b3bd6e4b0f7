"""
DenseTile: Stylizer
Детерминированный перенос моментов вместо обученного генератора
"""

import time
from typing import Optional

import numpy as np

from src.errors import ShapeMismatch
from src.infrastructure.cache import MomentTable
from src.models.schemas import Coord, GridSpec, StrategyConfig, StylizerSpec
from src.monitoring.tracing import AccessTracer
from src.normalization.moments import as_channels
from src.normalization.strategies import BaseNormalizer, TileSource, create_normalizer


def stylize_patch(patch: np.ndarray, normalized: np.ndarray, stylizer: StylizerSpec) -> np.ndarray:
    """out = target_std * normalized + target_mean (без обрезки в [0, 1])"""
    patch = as_channels(patch)
    normalized = as_channels(normalized)
    if patch.shape != normalized.shape:
        raise ShapeMismatch(patch.shape, normalized.shape)
    if stylizer.channels != normalized.shape[-1]:
        raise ShapeMismatch((stylizer.channels,), (normalized.shape[-1],))

    target_std = np.asarray(stylizer.target_std, dtype=np.float64)
    target_mean = np.asarray(stylizer.target_mean, dtype=np.float64)
    return target_std * normalized + target_mean


class PatchTranslator:
    """
    Суррогат генератора: слот нормализации + перенос целевых моментов

    γ/β слота принадлежат стилизатору (как обученные параметры
    принадлежат генератору), поэтому стратегия получает affine из stylizer.
    """

    def __init__(
        self,
        strategy: StrategyConfig,
        stylizer: StylizerSpec,
        grid: GridSpec,
        tracer: Optional[AccessTracer] = None,
    ):
        self.strategy = strategy
        self.stylizer = stylizer
        self.grid = grid
        slot = strategy.model_copy(update={"affine": stylizer.affine})
        self.normalizer: BaseNormalizer = create_normalizer(slot, grid, tracer=tracer)
        # Суммарное время веток, секунды
        self.busy = {"prefetch": 0.0, "inference": 0.0}

    @property
    def needs_prefetch(self) -> bool:
        return self.normalizer.needs_prefetch

    @property
    def lookahead(self) -> int:
        return self.normalizer.lookahead

    @property
    def table(self) -> Optional[MomentTable]:
        """Таблица моментов прохода; None для IN и TIN"""
        return self.normalizer.table

    def prepare(self, source: TileSource):
        self.normalizer.prepare(source)

    def prefetch(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None):
        started = time.perf_counter()
        self.normalizer.prefetch(coord, patch, step)
        self.busy["prefetch"] += time.perf_counter() - started

    def translate(self, coord: Coord, patch: np.ndarray, step: Optional[int] = None) -> np.ndarray:
        started = time.perf_counter()
        normalized = self.normalizer.normalize(coord, patch, step)
        out = stylize_patch(patch, normalized, self.stylizer)
        self.busy["inference"] += time.perf_counter() - started
        return out
