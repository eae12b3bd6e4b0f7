"""
DenseTile: Models
Модели геометрии, моментов и отчётов
"""
