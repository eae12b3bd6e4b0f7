"""
DenseTile: Dense Normalization for tiled images
"""
