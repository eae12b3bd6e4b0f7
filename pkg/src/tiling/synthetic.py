"""
DenseTile: Synthetic Images
Детерминированные тестовые изображения по seed
"""

import numpy as np


def gradient_image(
    height: int,
    width: int,
    channels: int = 3,
    seed: int = 0,
    texture: float = 0.02,
) -> np.ndarray:
    """
    Плавный глобальный градиент с мелкой текстурой, (H, W, C) в [0, 1]

    Направление и смещение градиента по каналам выбираются по seed.
    """
    rng = np.random.default_rng(seed)
    y = np.linspace(0.0, 1.0, height)[:, None]
    x = np.linspace(0.0, 1.0, width)[None, :]

    out = np.empty((height, width, channels))
    for ch in range(channels):
        dy, dx = rng.uniform(0.2, 1.0, size=2)
        offset = rng.uniform(0.05, 0.2)
        out[..., ch] = offset + 0.7 * (dy * y + dx * x) / (dy + dx)

    if texture > 0:
        out += rng.uniform(-texture, texture, size=out.shape)
    return np.clip(out, 0.0, 1.0)


def checkerboard_image(
    height: int,
    width: int,
    patch_size: int,
    channels: int = 3,
    low: float = 0.2,
    high: float = 0.8,
) -> np.ndarray:
    """Шахматка с постоянным значением внутри каждого патча"""
    rows = np.arange(height)[:, None] // patch_size
    cols = np.arange(width)[None, :] // patch_size
    board = np.where((rows + cols) % 2 == 0, low, high)
    return np.repeat(board[..., None], channels, axis=2).astype(np.float64)
