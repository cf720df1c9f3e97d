"""Thread-safe LRU cache for design-time results reused across a sweep."""

from __future__ import annotations

import threading
from collections import OrderedDict
from collections.abc import Callable, Hashable
from typing import Any

from polarfade.config import settings
from polarfade.services.metrics import metrics


class LRUCache:
    """Thread-safe least-recently-used cache.

    Entries never expire; a sweep's design points are pure functions of
    their keys.
    """

    def __init__(self, maxsize: int = 256):
        self._maxsize = maxsize
        self._data: OrderedDict[Hashable, Any] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: Hashable) -> Any | None:
        with self._lock:
            if key not in self._data:
                metrics.inc_cache_miss()
                return None
            self._data.move_to_end(key)
            metrics.inc_cache_hit()
            return self._data[key]

    def set(self, key: Hashable, value: Any) -> None:
        with self._lock:
            if key in self._data:
                del self._data[key]
            elif len(self._data) >= self._maxsize:
                self._data.popitem(last=False)
            self._data[key] = value

    def get_or_compute(self, key: Hashable, factory: Callable[[], Any]) -> Any:
        """Return the cached value for *key*, computing and storing it on a miss.

        The factory runs outside the lock, so two threads missing on the
        same key may both compute it; the results are identical.
        """
        value = self.get(key)
        if value is None:
            value = factory()
            self.set(key, value)
        return value

    def clear(self) -> None:
        with self._lock:
            self._data.clear()

    @property
    def size(self) -> int:
        with self._lock:
            return len(self._data)


# Module-level singleton initialized from config
design_cache = LRUCache(maxsize=settings.design_cache_maxsize)
