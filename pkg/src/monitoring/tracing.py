"""
DenseTile: Access Tracing
Журнал чтений и записей кэша моментов с метками шагов
"""

import threading
from typing import Literal

from pydantic import BaseModel

from src.models.schemas import Coord


class TableAccess(BaseModel):
    """Одно обращение к кэшу"""
    step: int
    kind: Literal["read", "write"]
    coord: Coord
    table: str = ""


class AccessTracer:
    """
    Трейсер обращений к MomentTable

    Обеспечивает:
    - Запись каждого чтения/записи с номером шага конвейера
    - Проверку правила "чтение только после записи на более раннем шаге"
    """

    def __init__(self):
        self._events: list[TableAccess] = []
        self._lock = threading.Lock()

    def record(self, kind: str, coord: Coord, step: int, table: str = ""):
        event = TableAccess(step=step, kind=kind, coord=coord, table=table)
        with self._lock:
            self._events.append(event)

    @property
    def events(self) -> list[TableAccess]:
        with self._lock:
            return list(self._events)

    def writes(self) -> list[TableAccess]:
        return [e for e in self.events if e.kind == "write"]

    def reads(self) -> list[TableAccess]:
        return [e for e in self.events if e.kind == "read"]

    def violations(self) -> list[TableAccess]:
        """Чтения, ключ которых не был записан на строго более раннем шаге"""
        written: dict[tuple[str, Coord], int] = {}
        for event in self.writes():
            key = (event.table, event.coord)
            written[key] = min(event.step, written.get(key, event.step))

        return [
            event for event in self.reads()
            if written.get((event.table, event.coord), event.step) >= event.step
        ]


class NoOpTracer:
    """No-op трейсер, когда инструментирование отключено"""

    def record(self, *args, **kwargs):
        pass

    @property
    def events(self) -> list[TableAccess]:
        return []

    def violations(self) -> list[TableAccess]:
        return []
