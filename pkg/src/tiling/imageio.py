"""
DenseTile: Image I/O
Загрузка и сохранение, отражённое дополнение, нарезка и сборка патчей
"""

import logging
import threading
from pathlib import Path
from typing import Iterable, Mapping, Union

import numpy as np
from PIL import Image, UnidentifiedImageError
from pydantic import BaseModel, ConfigDict

from src.errors import (
    DecodeError,
    DuplicateTile,
    MissingTile,
    OddPatchSize,
    TooSmallToPad,
    UnsupportedFormat,
)
from src.models.schemas import ChannelMoments, Coord, GridSpec
from src.normalization.moments import as_channels
from src.normalization.strategies import tin_global_stats
from src.tiling.grid import iter_coords, make_grid


logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = {"PNG", "PPM"}
SAVE_FORMATS = {".png": "PNG", ".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM"}

# Режимы, которые приводятся к 8-битным L/RGB
_CONVERTIBLE_MODES = {"1": "L", "LA": "L", "P": "RGB", "RGBA": "RGB"}


class PaddedImage(BaseModel):
    """Изображение, дополненное до кратного размеру патча"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray
    original_h: int
    original_w: int
    pad_bottom: int
    pad_right: int
    patch_size: int

    @property
    def grid(self) -> GridSpec:
        return make_grid(self.pixels.shape[0], self.pixels.shape[1], self.patch_size)

    @property
    def channels(self) -> int:
        return self.pixels.shape[-1]

    def crop(self, array: np.ndarray) -> np.ndarray:
        """Вернуть исходную область original_h x original_w"""
        return array[: self.original_h, : self.original_w]


# ============================================================
# Файлы
# ============================================================

def load_image(path: Union[str, Path]) -> np.ndarray:
    """PNG / PPM, 8 бит -> массив (H, W, C) в [0, 1]"""
    path = str(path)
    try:
        with Image.open(path) as img:
            if img.format not in SUPPORTED_FORMATS:
                raise UnsupportedFormat(path, f"format {img.format}")
            mode = img.mode
            if mode in _CONVERTIBLE_MODES:
                img = img.convert(_CONVERTIBLE_MODES[mode])
            elif mode not in ("L", "RGB"):
                raise UnsupportedFormat(path, f"mode {mode} is not 8-bit gray/RGB")
            array = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as e:
        raise DecodeError(path, str(e)) from e
    except OSError as e:
        raise DecodeError(path, str(e)) from e

    logger.info("Loaded %s (%dx%d, mode %s)", path, array.shape[0], array.shape[1], mode)
    return as_channels(array.astype(np.float64) / 255.0)


def quantize_8bit(image: np.ndarray) -> np.ndarray:
    """Обрезка в [0, 1] и округление v*255 (половина округляется от нуля)"""
    clipped = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.floor(clipped * 255.0 + 0.5).astype(np.uint8)


def save_image(path: Union[str, Path], image: np.ndarray):
    """Сохранить (H, W, C) в [0, 1] или uint8; формат по расширению"""
    path = Path(path)
    fmt = SAVE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise UnsupportedFormat(str(path), f"extension {path.suffix!r}")

    data = image if image.dtype == np.uint8 else quantize_8bit(image)
    if data.ndim == 3 and data.shape[-1] == 1:
        data = data[..., 0]

    try:
        Image.fromarray(data).save(path, format=fmt)
    except OSError as e:
        raise DecodeError(str(path), f"cannot write: {e}") from e
    logger.info("Saved %s (%dx%d)", path, data.shape[0], data.shape[1])


# ============================================================
# Дополнение и нарезка
# ============================================================

def pad_reflect(image: np.ndarray, patch_size: int) -> PaddedImage:
    """Отражённое дополнение снизу и справа до кратного patch_size"""
    if patch_size < 2 or patch_size % 2:
        raise OddPatchSize(patch_size)
    image = as_channels(image)
    height, width = image.shape[:2]
    pad_bottom = -height % patch_size
    pad_right = -width % patch_size

    if pad_bottom > height - 1:
        raise TooSmallToPad(height, pad_bottom)
    if pad_right > width - 1:
        raise TooSmallToPad(width, pad_right)

    pixels = image
    if pad_bottom or pad_right:
        pixels = np.pad(image, ((0, pad_bottom), (0, pad_right), (0, 0)), mode="reflect")
        logger.info(
            "Reflect-padded %dx%d -> %dx%d", height, width, pixels.shape[0], pixels.shape[1]
        )

    return PaddedImage(
        pixels=pixels,
        original_h=height,
        original_w=width,
        pad_bottom=pad_bottom,
        pad_right=pad_right,
        patch_size=patch_size,
    )


def tile_slices(coord: Coord, grid: GridSpec) -> tuple[slice, slice]:
    """Патч (c, r) занимает строки [c*N, (c+1)*N) и столбцы [r*N, (r+1)*N)"""
    n = grid.patch_size
    c, r = coord
    return slice(c * n, (c + 1) * n), slice(r * n, (r + 1) * n)


class ArrayTileSource:
    """
    Ленивый источник патчей над массивом в памяти

    Патч читается только когда его запрашивает ветка конвейера.
    """

    def __init__(self, pixels: np.ndarray, grid: GridSpec):
        self.pixels = as_channels(pixels)
        if self.pixels.shape[:2] != (grid.height_px, grid.width_px):
            raise ValueError(
                f"pixels {self.pixels.shape[:2]} do not match grid "
                f"{grid.height_px}x{grid.width_px}"
            )
        self.grid = grid

    @classmethod
    def from_padded(cls, padded: PaddedImage) -> "ArrayTileSource":
        return cls(padded.pixels, padded.grid)

    @property
    def channels(self) -> int:
        return self.pixels.shape[-1]

    def read(self, coord: Coord) -> np.ndarray:
        rows, cols = tile_slices(coord, self.grid)
        return self.pixels[rows, cols]

    def global_moments(self, epsilon: float) -> ChannelMoments:
        return tin_global_stats(self.pixels, epsilon)


def extract_tiles(
    padded: Union[PaddedImage, np.ndarray],
    grid: GridSpec,
) -> dict[Coord, np.ndarray]:
    """Все патчи по координатам"""
    pixels = padded.pixels if isinstance(padded, PaddedImage) else padded
    source = ArrayTileSource(pixels, grid)
    return {coord: source.read(coord) for coord in iter_coords(grid)}


# ============================================================
# Сборка
# ============================================================

class TileAssembler:
    """Собирает патчи в любом порядке; потокобезопасен"""

    def __init__(self, grid: GridSpec, channels: int):
        self.grid = grid
        self.channels = channels
        self._tiles: dict[Coord, np.ndarray] = {}
        self._lock = threading.Lock()

    def put(self, coord: Coord, tile: np.ndarray):
        with self._lock:
            if coord in self._tiles:
                raise DuplicateTile(coord)
            self._tiles[coord] = tile

    @property
    def tiles(self) -> dict[Coord, np.ndarray]:
        with self._lock:
            return dict(self._tiles)

    def assemble(self) -> np.ndarray:
        out = np.empty((self.grid.height_px, self.grid.width_px, self.channels))
        for coord in iter_coords(self.grid):
            tile = self._tiles.get(coord)
            if tile is None:
                raise MissingTile(coord)
            rows, cols = tile_slices(coord, self.grid)
            out[rows, cols] = as_channels(tile)
        return out


def assemble_tiles(
    tiles: Union[Mapping[Coord, np.ndarray], Iterable[tuple[Coord, np.ndarray]]],
    grid: GridSpec,
) -> np.ndarray:
    """Собрать дополненное изображение (float) из патчей"""
    items = tiles.items() if isinstance(tiles, Mapping) else tiles
    assembler = None
    for coord, tile in items:
        if assembler is None:
            assembler = TileAssembler(grid, as_channels(tile).shape[-1])
        assembler.put(coord, tile)
    if assembler is None:
        raise MissingTile((0, 0))
    return assembler.assemble()


def assemble_and_crop(
    tiles: Union[Mapping[Coord, np.ndarray], Iterable[tuple[Coord, np.ndarray]]],
    padded: PaddedImage,
) -> np.ndarray:
    """Итоговое 8-битное изображение исходного размера"""
    return quantize_8bit(padded.crop(assemble_tiles(tiles, padded.grid)))
