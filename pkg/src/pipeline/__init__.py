"""
DenseTile: Pipeline
Стилизатор и исполнители конвейера
"""
