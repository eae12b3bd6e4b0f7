"""
DenseTile: Configuration
Настройки по умолчанию для нормализации и конвейера
"""

from typing import Literal

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Настройки приложения (переопределяются через DENSETILE_*)"""

    # Геометрия
    patch_size: int = 512

    # Нормализация
    norm: Literal["in", "tin", "kin", "dn"] = "dn"
    epsilon: float = 1e-5
    kin_kernel: int | None = None
    granularity: int | None = None

    # Конвейер
    pipeline: Literal["single", "two-stage"] = "single"
    threads: int = 2

    # Синтетические изображения
    seed: int = 0
    synthetic_size: int = 2048

    # Вывод
    json_output: bool = False
    log_level: str = "INFO"

    class Config:
        env_prefix = "DENSETILE_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


# Значения, которые подставляются, если флаг не задан
DEFAULT_KIN_KERNEL = 5
DEFAULT_GRANULARITY = 1

# Стилизатор по умолчанию: сдвиг в тёплые тона
DEFAULT_STYLE = {
    "target_mean": [0.62, 0.48, 0.40],
    "target_std": [0.18, 0.16, 0.15],
    "gamma": [1.0, 1.0, 1.0],
    "beta": [0.0, 0.0, 0.0],
}

# Шкала гранулярности для абляции (512 → 1)
GRANULARITY_SWEEP = [512, 256, 128, 64, 32, 16, 8, 4, 2, 1]

# Эталонный размер изображения для оценки "всего изображения" в бенчмарке
BENCH_REFERENCE_IMAGE = (3024, 4302)
