"""
DenseTile: Infrastructure
Таблица моментов патчей
"""

from src.infrastructure.cache import MomentTable

__all__ = [
    "MomentTable",
]
