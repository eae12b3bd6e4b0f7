"""
DenseTile: Entry Point
Точка входа приложения
"""

import sys

from src.interfaces.cli import main


if __name__ == "__main__":
    sys.exit(main())
