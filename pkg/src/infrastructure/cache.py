"""
DenseTile: Moment Cache
Таблицы кэша T_μ и T_σ с координатами патчей в качестве ключей
"""

import json
import re
import threading
from typing import Optional

import numpy as np

from src.errors import DuplicateWrite, MissingEntry, OutOfGrid
from src.models.schemas import ChannelMoments, Coord, GridSpec
from src.monitoring.tracing import AccessTracer, NoOpTracer


_KEY_RE = re.compile(r"^\((-?\d+),\s*(-?\d+)\)$")


class MomentTable:
    """
    Кэш моментов патчей

    Правила:
    - Один писатель (ветка предвыборки), один читатель (ветка инференса)
    - Запись в ключ выполняется ровно один раз за проход
    - Чтение отсутствующего ключа означает нарушение порядка диспетчера
    """

    def __init__(
        self,
        grid: GridSpec,
        name: str = "",
        tracer: Optional[AccessTracer] = None,
    ):
        self.grid = grid
        self.name = name
        self.tracer = tracer or NoOpTracer()
        self._entries: dict[Coord, ChannelMoments] = {}
        self._lock = threading.Lock()
        self._reads = 0

    def _check(self, coord: Coord):
        if not self.grid.contains(coord):
            raise OutOfGrid(coord, self.grid.rows, self.grid.cols)

    def store(self, coord: Coord, moments: ChannelMoments, step: Optional[int] = None):
        """Записать моменты патча"""
        self._check(coord)
        with self._lock:
            if coord in self._entries:
                raise DuplicateWrite(coord)
            self._entries[coord] = moments
        if step is not None:
            self.tracer.record("write", coord, step, self.name)

    def get(self, coord: Coord, step: Optional[int] = None) -> ChannelMoments:
        """Прочитать моменты патча"""
        self._check(coord)
        entry = self._entries.get(coord)
        if entry is None:
            raise MissingEntry(coord)
        self._reads += 1
        if step is not None:
            self.tracer.record("read", coord, step, self.name)
        return entry

    def __contains__(self, coord: Coord) -> bool:
        return coord in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def is_complete(self) -> bool:
        return len(self._entries) == self.grid.num_patches

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Вся таблица как массивы (rows, cols, C): средние и СКО"""
        means, stds = [], []
        for c in range(self.grid.rows):
            means.append([self.get((c, r)).mean for r in range(self.grid.cols)])
            stds.append([self.get((c, r)).stddev for r in range(self.grid.cols)])
        return np.asarray(means), np.asarray(stds)

    def get_stats(self) -> dict:
        """Статистика кэша"""
        return {
            "entries": len(self._entries),
            "capacity": self.grid.num_patches,
            "reads": self._reads,
        }

    # ============================================================
    # Дамп для отладки двухэтапного режима
    # ============================================================

    def dump_json(self) -> str:
        """{"(c,r)": {"mean": [...], "std": [...]}}"""
        payload = {
            f"({c},{r})": {
                "mean": entry.mean.tolist(),
                "std": entry.stddev.tolist(),
            }
            for (c, r), entry in sorted(self._entries.items())
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def load_json(cls, text: str, grid: GridSpec, name: str = "") -> "MomentTable":
        table = cls(grid, name=name)
        for key, value in json.loads(text).items():
            match = _KEY_RE.match(key.strip())
            if not match:
                raise ValueError(f"Bad moment table key: {key!r}")
            coord = (int(match.group(1)), int(match.group(2)))
            table.store(
                coord,
                ChannelMoments(
                    mean=np.asarray(value["mean"], dtype=np.float64),
                    stddev=np.asarray(value["std"], dtype=np.float64),
                ),
            )
        return table
