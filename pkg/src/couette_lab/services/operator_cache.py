"""In-process LRU cache for assembled SIO and commutator matrices."""

import logging
import threading
from collections import OrderedDict
from typing import Any, Dict, Hashable, Iterable, Optional

from couette_lab.modules.sio.operators import (
    CommutatorOperator,
    Scheme,
    SioOperator,
    assemble_commutator,
    assemble_sio,
)
from couette_lab.modules.spectral.grid import ChannelGrid
from couette_lab.settings import settings

logger = logging.getLogger(__name__)


class OperatorCache:
    """LRU cache of dense operators keyed by (kind, k, n_y, delta, scheme).

    Features:
    - Thread-safe with a lock
    - Least-recently-used eviction once max_size is reached
    - Hit/miss statistics

    Example:
        cache = OperatorCache(max_size=64)
        op = cache.get_sio(3, grid)
    """

    def __init__(self, max_size: int = 256):
        """Initialize cache.

        Args:
            max_size: Maximum number of cached operators (default: 256)
        """
        self.max_size = max_size
        self._cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self._lock = threading.Lock()

        self.stats = {
            "hits": 0,
            "misses": 0,
            "sets": 0,
            "evictions": 0,
        }

    def _evict_if_needed(self):
        while self._cache and len(self._cache) >= self.max_size:
            key, _ = self._cache.popitem(last=False)
            self.stats["evictions"] += 1
            logger.debug(f"Operator cache evicted {key}")

    def get(self, key: Hashable) -> Optional[Any]:
        """Cached operator or None; a hit refreshes the entry."""
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                self.stats["hits"] += 1
                return self._cache[key]
            self.stats["misses"] += 1
            return None

    def set(self, key: Hashable, value: Any):
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
            else:
                self._evict_if_needed()
            self._cache[key] = value
            self.stats["sets"] += 1

    def get_sio(self, k: int, grid: ChannelGrid, delta: float = 0.0, scheme: Scheme = "alternating") -> SioOperator:
        """J_k for the grid's y-resolution, assembled on a miss."""
        key = ("sio", int(k), grid.n_y, float(delta), scheme)
        op = self.get(key)
        if op is None:
            op = assemble_sio(k, grid, delta, scheme)
            self.set(key, op)
        return op

    def get_commutator(
        self, k: int, grid: ChannelGrid, delta: float = 0.0, scheme: Scheme = "alternating"
    ) -> CommutatorOperator:
        key = ("commutator", int(k), grid.n_y, float(delta), scheme)
        op = self.get(key)
        if op is None:
            op = assemble_commutator(k, grid, delta, scheme)
            self.set(key, op)
        return op

    def sio_map(
        self, k_values: Iterable[int], grid: ChannelGrid, delta: float = 0.0, scheme: Scheme = "alternating"
    ) -> Dict[int, SioOperator]:
        """Mapping k -> J_k for every nonzero k, as consumed by the energy functionals."""
        return {int(k): self.get_sio(k, grid, delta, scheme) for k in k_values if k != 0}

    def clear(self):
        with self._lock:
            count = len(self._cache)
            self._cache.clear()
            logger.info(f"Operator cache cleared: {count} entries removed")

    def get_stats(self) -> Dict[str, Any]:
        """Cache statistics including hit rate (percent)."""
        total_requests = self.stats["hits"] + self.stats["misses"]
        hit_rate = (self.stats["hits"] / total_requests * 100) if total_requests > 0 else 0

        return {
            "size": len(self._cache),
            "max_size": self.max_size,
            "hits": self.stats["hits"],
            "misses": self.stats["misses"],
            "sets": self.stats["sets"],
            "evictions": self.stats["evictions"],
            "hit_rate": hit_rate,
        }

    def reset_stats(self):
        self.stats = {key: 0 for key in self.stats}

    def __len__(self) -> int:
        return len(self._cache)

    def __repr__(self) -> str:
        stats = self.get_stats()
        return f"OperatorCache(size={stats['size']}/{stats['max_size']}, hit_rate={stats['hit_rate']:.1f}%)"


# Global cache instance
_operator_cache: Optional[OperatorCache] = None


def get_operator_cache() -> OperatorCache:
    """Get or create the process-wide operator cache.

    Returns:
        OperatorCache sized by settings.OPERATOR_CACHE_SIZE
    """
    global _operator_cache
    if _operator_cache is None:
        _operator_cache = OperatorCache(max_size=settings.OPERATOR_CACHE_SIZE)
    return _operator_cache


def reset_operator_cache():
    """Reset global cache (useful for testing)."""
    global _operator_cache
    _operator_cache = None
