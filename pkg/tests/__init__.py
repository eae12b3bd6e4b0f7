"""
DenseTile Tests
"""
