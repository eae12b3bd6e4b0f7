"""
DenseTile: Tiling
Сетка патчей, диспетчер, ввод-вывод изображений
"""
