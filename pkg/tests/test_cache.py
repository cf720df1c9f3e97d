from polarfade.services.cache import LRUCache
from polarfade.services.metrics import metrics


class TestLRUCache:
    def test_get_set(self):
        cache = LRUCache(maxsize=10)
        cache.set(("policy", 1.0), {"delta": 0.5})
        assert cache.get(("policy", 1.0)) == {"delta": 0.5}

    def test_miss_returns_none(self):
        cache = LRUCache(maxsize=10)
        assert cache.get("nonexistent") is None

    def test_lru_eviction(self):
        cache = LRUCache(maxsize=2)
        cache.set("k1", "v1")
        cache.set("k2", "v2")
        cache.set("k3", "v3")  # evicts k1
        assert cache.get("k1") is None
        assert cache.get("k2") == "v2"
        assert cache.get("k3") == "v3"

    def test_access_refreshes_lru(self):
        cache = LRUCache(maxsize=2)
        cache.set("k1", "v1")
        cache.set("k2", "v2")
        cache.get("k1")
        # k2 is now least recently used
        cache.set("k3", "v3")
        assert cache.get("k1") == "v1"
        assert cache.get("k2") is None

    def test_clear(self):
        cache = LRUCache(maxsize=10)
        cache.set("k1", "v1")
        cache.set("k2", "v2")
        assert cache.size == 2
        cache.clear()
        assert cache.size == 0
        assert cache.get("k1") is None

    def test_overwrite_existing_key(self):
        cache = LRUCache(maxsize=10)
        cache.set("k1", "old")
        cache.set("k1", "new")
        assert cache.get("k1") == "new"
        assert cache.size == 1


class TestGetOrCompute:
    def test_factory_runs_once(self):
        cache = LRUCache(maxsize=10)
        calls = []

        def factory():
            calls.append(1)
            return 1.044

        assert cache.get_or_compute("design_power", factory) == 1.044
        assert cache.get_or_compute("design_power", factory) == 1.044
        assert len(calls) == 1

    def test_counts_hits_and_misses(self):
        cache = LRUCache(maxsize=10)
        cache.get_or_compute("k", lambda: 0.25)
        cache.get_or_compute("k", lambda: 0.25)
        cache.get_or_compute("k", lambda: 0.25)
        snapshot = metrics.snapshot()["design_cache"]
        assert snapshot["misses"] == 1
        assert snapshot["hits"] == 2
        assert snapshot["hit_rate"] == round(2 / 3, 4)
