"""
DenseTile: Interfaces
Командная строка
"""
