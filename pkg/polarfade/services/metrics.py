"""Thread-safe in-memory simulation metrics collector."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field


@dataclass
class SimulationMetrics:
    """Collects counters and per-grid-point durations for one CLI run.

    Thread-safe via a single ``threading.Lock``.  The duration list is
    bounded at ``_MAX_DURATION_SAMPLES``; when exceeded it is halved by
    keeping only the most-recent entries.
    """

    _MAX_DURATION_SAMPLES: int = field(default=10_000, repr=False)

    # Monte Carlo counters
    blocks_simulated: int = field(default=0, init=False)
    bit_errors: int = field(default=0, init=False)
    block_errors: int = field(default=0, init=False)
    erased_symbols: int = field(default=0, init=False)

    # Numerics counters
    quadratures: int = field(default=0, init=False)
    capacity_solves: int = field(default=0, init=False)
    threshold_solves: int = field(default=0, init=False)
    design_cache_hits: int = field(default=0, init=False)
    design_cache_misses: int = field(default=0, init=False)
    points_completed: int = field(default=0, init=False)

    # Per-point wall-clock durations (milliseconds)
    _durations: list[float] = field(default_factory=list, init=False, repr=False)

    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)
    _start_time: float = field(default_factory=time.monotonic, init=False, repr=False)

    # -- Counter helpers ---------------------------------------------------

    def inc_blocks(
        self, count: int, bit_errors: int, block_errors: int, erased: int
    ) -> None:
        with self._lock:
            self.blocks_simulated += count
            self.bit_errors += bit_errors
            self.block_errors += block_errors
            self.erased_symbols += erased

    def inc_quadrature(self) -> None:
        with self._lock:
            self.quadratures += 1

    def inc_capacity_solve(self) -> None:
        with self._lock:
            self.capacity_solves += 1

    def inc_threshold_solve(self) -> None:
        with self._lock:
            self.threshold_solves += 1

    def inc_cache_hit(self) -> None:
        with self._lock:
            self.design_cache_hits += 1

    def inc_cache_miss(self) -> None:
        with self._lock:
            self.design_cache_misses += 1

    # -- Durations ---------------------------------------------------------

    def record_point(self, ms: float) -> None:
        with self._lock:
            self.points_completed += 1
            self._durations.append(ms)
            if len(self._durations) > self._MAX_DURATION_SAMPLES:
                half = self._MAX_DURATION_SAMPLES // 2
                self._durations = self._durations[-half:]

    def get_duration_percentiles(self) -> dict[str, float]:
        with self._lock:
            return self._percentiles_unlocked()

    def _percentiles_unlocked(self) -> dict[str, float]:
        """Compute p50/p90/p95/p99; caller must hold ``_lock``."""
        if not self._durations:
            return {"p50": 0.0, "p90": 0.0, "p95": 0.0, "p99": 0.0}
        s = sorted(self._durations)
        n = len(s)
        return {
            "p50": round(s[int(n * 0.50)], 2),
            "p90": round(s[int(min(n * 0.90, n - 1))], 2),
            "p95": round(s[int(min(n * 0.95, n - 1))], 2),
            "p99": round(s[int(min(n * 0.99, n - 1))], 2),
        }

    # -- Snapshot / reset --------------------------------------------------

    def snapshot(self) -> dict:
        with self._lock:
            lookups = self.design_cache_hits + self.design_cache_misses
            hit_rate = round(self.design_cache_hits / lookups, 4) if lookups else 0.0
            return {
                "elapsed_seconds": round(time.monotonic() - self._start_time, 2),
                "monte_carlo": {
                    "blocks": self.blocks_simulated,
                    "bit_errors": self.bit_errors,
                    "block_errors": self.block_errors,
                    "erased_symbols": self.erased_symbols,
                },
                "numerics": {
                    "quadratures": self.quadratures,
                    "capacity_solves": self.capacity_solves,
                    "threshold_solves": self.threshold_solves,
                },
                "design_cache": {
                    "hits": self.design_cache_hits,
                    "misses": self.design_cache_misses,
                    "hit_rate": hit_rate,
                },
                "points_completed": self.points_completed,
                "point_duration_ms": self._percentiles_unlocked(),
            }

    def reset(self) -> None:
        with self._lock:
            self.blocks_simulated = 0
            self.bit_errors = 0
            self.block_errors = 0
            self.erased_symbols = 0
            self.quadratures = 0
            self.capacity_solves = 0
            self.threshold_solves = 0
            self.design_cache_hits = 0
            self.design_cache_misses = 0
            self.points_completed = 0
            self._durations.clear()
            self._start_time = time.monotonic()


# Module-level singleton
metrics = SimulationMetrics()
