"""
DenseTile: Errors
Иерархия исключений; семейства соответствуют кодам выхода CLI
"""


class DenseTileError(Exception):
    """Базовое исключение"""
    exit_code = 1


# ============================================================
# Нарушения входного контракта (exit 2)
# ============================================================

class ConfigurationError(DenseTileError):
    """Неверная конфигурация или входные данные"""
    exit_code = 2


class NonMultipleDimensions(ConfigurationError):
    def __init__(self, height_px: int, width_px: int, patch_size: int):
        self.height_px = height_px
        self.width_px = width_px
        self.patch_size = patch_size
        super().__init__(
            f"Image {height_px}x{width_px} is not a multiple of patch size {patch_size}"
        )


class OddPatchSize(ConfigurationError):
    def __init__(self, patch_size: int):
        self.patch_size = patch_size
        super().__init__(f"Patch size must be even and >= 2, got {patch_size}")


class BadGranularity(ConfigurationError):
    def __init__(self, granularity: int, patch_size: int):
        self.granularity = granularity
        self.patch_size = patch_size
        super().__init__(
            f"Granularity {granularity} does not divide patch size {patch_size}"
        )


class EmptyPatch(ConfigurationError):
    def __init__(self):
        super().__init__("Cannot compute moments of an empty patch")


class EmptyImage(ConfigurationError):
    def __init__(self):
        super().__init__("Cannot compute moments of an empty image")


class ShapeMismatch(ConfigurationError):
    def __init__(self, expected: tuple, actual: tuple):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Shape mismatch: expected {expected}, got {actual}")


class NonPositiveSigma(ConfigurationError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(f"Standard deviation must be positive, got {value}")


# ============================================================
# Ошибки ввода-вывода изображений (exit 3)
# ============================================================

class ImageIOError(DenseTileError):
    """Ошибка чтения, записи или раскладки изображения"""
    exit_code = 3


class UnsupportedFormat(ImageIOError):
    def __init__(self, path: str, detail: str):
        self.path = path
        super().__init__(f"Unsupported image {path}: {detail}")


class DecodeError(ImageIOError):
    def __init__(self, path: str, detail: str):
        self.path = path
        super().__init__(f"Cannot decode {path}: {detail}")


class TooSmallToPad(ImageIOError):
    def __init__(self, extent: int, pad: int):
        self.extent = extent
        self.pad = pad
        super().__init__(f"Cannot reflect-pad {pad} px on an extent of {extent} px")


class MissingTile(ImageIOError):
    def __init__(self, coord: tuple[int, int]):
        self.coord = coord
        super().__init__(f"Missing tile {coord}")


class DuplicateTile(ImageIOError):
    def __init__(self, coord: tuple[int, int]):
        self.coord = coord
        super().__init__(f"Duplicate tile {coord}")


# ============================================================
# Нарушения протокола конвейера (exit 4)
# ============================================================

class PipelineProtocolError(DenseTileError):
    """Нарушение порядка диспетчеризации или кэша моментов"""
    exit_code = 4


class OutOfGrid(PipelineProtocolError):
    def __init__(self, coord: tuple[int, int], rows: int, cols: int):
        self.coord = coord
        super().__init__(f"Coordinate {coord} outside {rows}x{cols} grid")


class DuplicateWrite(PipelineProtocolError):
    def __init__(self, coord: tuple[int, int]):
        self.coord = coord
        super().__init__(f"Moments for {coord} already stored in this pass")


class MissingEntry(PipelineProtocolError):
    def __init__(self, coord: tuple[int, int]):
        self.coord = coord
        super().__init__(f"No cached moments for {coord} (dispatch ordering violated)")


class BenchmarkGateFailed(PipelineProtocolError):
    def __init__(self, variant: str, max_error: float):
        self.variant = variant
        self.max_error = max_error
        super().__init__(
            f"Variant {variant} disagrees with naive output (max rel error {max_error:.3e})"
        )
