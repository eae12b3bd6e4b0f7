"""
DenseTile: Domain Models
Модели геометрии, моментов, стратегий и отчётов
"""

import math
from enum import Enum
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import ShapeMismatch


Coord = tuple[int, int]

REPORT_SCHEMA = 1


# ============================================================
# Геометрия
# ============================================================

class GridSpec(BaseModel):
    """Геометрия сетки патчей: c: строка патча, r: столбец"""
    model_config = ConfigDict(frozen=True)

    height_px: int = Field(gt=0)
    width_px: int = Field(gt=0)
    patch_size: int = Field(ge=2)
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)

    @property
    def num_patches(self) -> int:
        return self.rows * self.cols

    def contains(self, coord: Coord) -> bool:
        c, r = coord
        return 0 <= c < self.rows and 0 <= r < self.cols

    def clamp(self, coord: Coord) -> Coord:
        """Ближайшая координата внутри сетки"""
        c, r = coord
        return (min(max(c, 0), self.rows - 1), min(max(r, 0), self.cols - 1))


class DispatchStep(BaseModel):
    """Шаг диспетчера: пара (инференс, предвыборка); None означает пустой патч"""
    model_config = ConfigDict(frozen=True)

    step: int
    inference: Optional[Coord] = None
    prefetch: Optional[Coord] = None


# ============================================================
# Моменты
# ============================================================

class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ChannelMoments(_ArrayModel):
    """Среднее и СКО по каналам, shape (C,)"""
    mean: np.ndarray
    stddev: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> "ChannelMoments":
        if self.mean.shape != self.stddev.shape or self.mean.ndim != 1:
            raise ValueError("mean and stddev must be 1-D arrays of equal length")
        return self

    @property
    def channels(self) -> int:
        return self.mean.shape[0]


class Neighborhood3x3(_ArrayModel):
    """Моменты патча и восьми соседей, shape (3, 3, C)"""
    mu: np.ndarray
    sigma: np.ndarray


class BasisMatrices(_ArrayModel):
    """
    Предвычисленные весовые матрицы быстрой интерполяции

    stack[k]: матрицы m00, m01, m10, m11 в этом порядке, shape (4, N, N)
    """
    n: int
    v: np.ndarray
    m00: np.ndarray
    m01: np.ndarray
    m10: np.ndarray
    m11: np.ndarray
    stack: np.ndarray

    @classmethod
    def from_size(cls, n: int) -> "BasisMatrices":
        """Построить базис для любого n >= 2 (без требования чётности)"""
        if n < 2:
            raise ValueError(f"basis needs n >= 2, got {n}")
        v = np.arange(n, dtype=np.float64) * n / (n - 1)
        w = n - v
        n2 = float(n * n)
        m00 = np.outer(w, w) / n2
        m01 = np.outer(w, v) / n2
        m10 = np.outer(v, w) / n2
        m11 = np.outer(v, v) / n2
        return cls(
            n=n,
            v=v,
            m00=m00,
            m01=m01,
            m10=m10,
            m11=m11,
            stack=np.stack([m00, m01, m10, m11]),
        )


class PixelMomentField(_ArrayModel):
    """Попиксельные μ̂ и σ̂* (обратное СКО), shape (N, N, C)"""
    mu_hat: np.ndarray
    inv_sigma_hat: np.ndarray


# ============================================================
# Стратегии нормализации
# ============================================================

class NormKind(str, Enum):
    """Стратегия нормализации"""
    PATCH_IN = "in"
    TIN = "tin"
    KIN = "kin"
    DN = "dn"


class AffineParams(BaseModel):
    """γ и β; список длины 1 распространяется на все каналы"""
    model_config = ConfigDict(frozen=True)

    gamma: list[float] = [1.0]
    beta: list[float] = [0.0]

    @field_validator("gamma", "beta")
    @classmethod
    def _finite(cls, values: list[float]) -> list[float]:
        if not values or not all(math.isfinite(x) for x in values):
            raise ValueError("affine parameters must be finite and non-empty")
        return values

    def as_arrays(self, channels: int) -> tuple[np.ndarray, np.ndarray]:
        return _per_channel(self.gamma, channels), _per_channel(self.beta, channels)


class StrategyConfig(BaseModel):
    """Выбор стратегии и её параметры"""
    model_config = ConfigDict(frozen=True)

    kind: NormKind = NormKind.DN
    epsilon: float = Field(default=1e-5, gt=0)
    kin_kernel: int = Field(default=5, ge=1)
    granularity: int = Field(default=1, ge=1)
    affine: AffineParams = AffineParams()

    @field_validator("kin_kernel")
    @classmethod
    def _odd_kernel(cls, k: int) -> int:
        if k % 2 == 0:
            raise ValueError(f"kin_kernel must be odd, got {k}")
        return k

    @property
    def lookahead(self) -> int:
        """Радиус окрестности, которую инференс читает из кэша"""
        if self.kind == NormKind.KIN:
            return self.kin_kernel // 2
        return 1


class StylizerSpec(BaseModel):
    """Детерминированный стилизатор: перенос целевых моментов"""
    model_config = ConfigDict(frozen=True)

    target_mean: list[float]
    target_std: list[float]
    affine: AffineParams = AffineParams()

    @model_validator(mode="after")
    def _check(self) -> "StylizerSpec":
        if len(self.target_mean) != len(self.target_std):
            raise ValueError("target_mean and target_std must have equal length")
        if any(s <= 0 for s in self.target_std):
            raise ValueError("target_std must be positive")
        return self

    @property
    def channels(self) -> int:
        return len(self.target_mean)


# ============================================================
# Отчёты
# ============================================================

class _Report(BaseModel):
    schema_version: int = Field(default=REPORT_SCHEMA, serialization_alias="schema")

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


class PassReport(_Report):
    """Итоги прохода конвейера"""
    mode: Literal["single", "two-stage"]
    steps_executed: int
    patches_translated: int
    threads: int = 1
    wall_time_ms: dict[str, float] = {}
    peak_rss_mb: Optional[float] = None
    strategy: StrategyConfig


class SeamReport(_Report):
    """Разрывы на границах патчей против внутренних перепадов"""
    boundary_mean_absdiff: float = Field(ge=0)
    interior_mean_absdiff: float = Field(ge=0)
    seam_ratio: float = Field(ge=0)
    row_boundaries: list[float] = []
    col_boundaries: list[float] = []


class BenchReport(_Report):
    """Время одного варианта интерполяции"""
    variant: Literal["naive", "reformulated", "precomputed"]
    n: int
    iterations: int
    patches: int
    per_cell_ms: float
    per_patch_ms: float
    whole_image_ms: float
    speedup: float


def _per_channel(values: list[float], channels: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape[0] == 1:
        return np.full(channels, arr[0])
    if arr.shape[0] != channels:
        raise ShapeMismatch((channels,), arr.shape)
    return arr
