"""
DenseTile: Monitoring
Трассировка доступа к кэшу, метрика швов, бенчмарки

metrics и benchmark импортируются напрямую: они зависят от кэша,
который сам пишет в tracing.
"""

from src.monitoring.tracing import AccessTracer, NoOpTracer, TableAccess

__all__ = [
    "AccessTracer",
    "NoOpTracer",
    "TableAccess",
]
