"""
DenseTile: Normalization
Моменты патчей, быстрая интерполяция, стратегии нормализации
"""
