#!/usr/bin/env python3
"""
Parallel - Execução de pontos independentes em um pool de threads.

Funcionalidades:
- Mapa ordenado: resultados sempre na ordem da entrada
- Número de threads via POLARON_THREADS (.env)
- Monitoramento de duração e falhas por ponto
"""

import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence, TypeVar

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "POLARON_THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """
    Número de threads: argumento explícito, depois POLARON_THREADS, depois CPUs.
    """
    if workers is not None:
        if workers < 1:
            raise ValueError(f"número de threads deve ser ≥ 1, recebido {workers}")
        return workers
    load_dotenv()
    raw = os.getenv(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} deve ser inteiro, recebido {raw!r}") from None
        if value < 1:
            raise ValueError(f"{THREADS_ENV} deve ser ≥ 1, recebido {value}")
        return value
    return os.cpu_count() or 1


class WorkMonitor:
    """Registra duração e sucesso de cada ponto processado."""

    def __init__(self, label: str):
        self.label = label
        self.records: list[dict[str, Any]] = []
        self.lock = threading.Lock()

    def record(self, index: int, duration_seconds: float, success: bool, error: str | None = None):
        with self.lock:
            self.records.append({
                "index": index,
                "duration": duration_seconds,
                "success": success,
                "error": error,
            })

    def get_summary(self) -> dict:
        with self.lock:
            if not self.records:
                return {"total": 0, "successful": 0, "failed": 0, "total_duration": 0.0}
            failed = [r for r in self.records if not r["success"]]
            durations = [r["duration"] for r in self.records]
            return {
                "total": len(self.records),
                "successful": len(self.records) - len(failed),
                "failed": len(failed),
                "max_duration": max(durations),
                "total_duration": sum(durations),
                "recent_errors": [r["error"] for r in failed[-5:] if r["error"]],
            }

    def log_summary(self):
        summary = self.get_summary()
        logger.info(
            f"📊 {self.label}: {summary['successful']}/{summary['total']} pontos ok, "
            f"duração total {summary['total_duration']:.2f}s"
        )
        for error in summary.get("recent_errors", []):
            logger.warning(f"⚠️ {self.label}: {error}")


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None,
                monitor: WorkMonitor | None = None,
                is_success: Callable[[R], bool] | None = None) -> list[R]:
    """
    Aplica fn a cada item em paralelo e devolve os resultados na ordem da entrada.

    Args:
        fn: Função pura aplicada a cada item
        items: Entradas
        workers: Threads (None → resolve_workers())
        monitor: Monitor opcional
        is_success: Classifica um resultado para o monitor
    """
    count = resolve_workers(workers)

    def run(indexed: tuple[int, T]) -> R:
        index, item = indexed
        start = time.perf_counter()
        try:
            result = fn(item)
        except Exception as exc:
            if monitor:
                monitor.record(index, time.perf_counter() - start, False, str(exc))
            raise
        if monitor:
            ok = is_success(result) if is_success else True
            monitor.record(index, time.perf_counter() - start, ok)
        return result

    indexed_items = list(enumerate(items))
    if count == 1 or len(indexed_items) <= 1:
        return [run(entry) for entry in indexed_items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(run, indexed_items))
