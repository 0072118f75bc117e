#!/usr/bin/env python3
"""
Memoization layer for expensive per-field computations
Provides a thread-safe in-memory LRU cache with hit/miss statistics
"""

import threading
import hashlib
import json
import logging
from typing import Any, Dict, Optional, Callable
from functools import wraps
from collections import OrderedDict

from .config import get_settings

_MISSING = object()


class CacheManager:
    """Thread-safe LRU cache keyed by the repr of call arguments"""

    def __init__(self, max_cache_size: Optional[int] = None):
        self._cache: OrderedDict[str, Any] = OrderedDict()
        self._lock = threading.RLock()
        self._max_cache_size = max_cache_size or get_settings().cache_size
        self.logger = logging.getLogger(__name__)

        self._stats = {
            "hits": 0,
            "misses": 0,
            "evictions": 0,
            "sets": 0
        }

    def _generate_key(self, prefix: str, *args, **kwargs) -> str:
        """Generate cache key from arguments"""
        try:
            key_data = {
                "prefix": prefix,
                "args": [repr(a) for a in args],
                "kwargs": sorted((k, repr(v)) for k, v in kwargs.items()) if kwargs else None
            }
            key_string = json.dumps(key_data, sort_keys=True)
            return hashlib.md5(key_string.encode('utf-8')).hexdigest()
        except Exception as e:
            self.logger.warning(f"Failed to generate cache key: {e}")
            return f"{prefix}:{hash((args, tuple(sorted(kwargs.items()))))}"

    def get(self, key: str, default: Any = None) -> Any:
        """Get value from cache, refreshing its recency"""
        with self._lock:
            if key not in self._cache:
                self._stats["misses"] += 1
                return default
            self._cache.move_to_end(key)
            self._stats["hits"] += 1
            return self._cache[key]

    def set(self, key: str, value: Any) -> None:
        """Store value, evicting the least recently used entries when full"""
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
            self._cache[key] = value
            self._stats["sets"] += 1
            if len(self._cache) > self._max_cache_size:
                self._evict_entries(len(self._cache) - self._max_cache_size)

    def delete(self, key: str) -> bool:
        with self._lock:
            if key in self._cache:
                del self._cache[key]
                return True
            return False

    def clear(self) -> None:
        """Drop every cached value"""
        with self._lock:
            count = len(self._cache)
            self._cache.clear()
            self.logger.debug(f"Cleared {count} cache entries")

    def _evict_entries(self, count: int) -> None:
        for _ in range(count):
            self._cache.popitem(last=False)
            self._stats["evictions"] += 1

    def get_stats(self) -> Dict[str, Any]:
        """Cache statistics including hit rate"""
        with self._lock:
            total = self._stats["hits"] + self._stats["misses"]
            return {
                **self._stats,
                "size": len(self._cache),
                "max_size": self._max_cache_size,
                "hit_rate": (self._stats["hits"] / total) if total else 0.0,
            }

    def resize_cache(self, new_max_size: int) -> None:
        with self._lock:
            self._max_cache_size = new_max_size
            if len(self._cache) > new_max_size:
                self._evict_entries(len(self._cache) - new_max_size)
            self.logger.info(f"Cache resized to {new_max_size}")


cache_manager = CacheManager()

# lattice enumerations and operator images; far more entries than the per-field caches
lattice_cache = CacheManager(get_settings().lattice_cache_size)


def cache_result(manager: Optional[CacheManager] = None, key_prefix: str = "", key_func: Optional[Callable] = None):
    """Decorator memoizing a pure function on the repr of its arguments

    key_func, when given, maps the call arguments to the value whose repr
    forms the key, e.g. a canonical form of an argument with many spellings
    """

    def decorator(func: Callable) -> Callable:
        prefix = key_prefix or f"{func.__module__}.{func.__qualname__}"

        @wraps(func)
        def wrapper(*args, **kwargs):
            target = manager or cache_manager
            if key_func is not None:
                key = target._generate_key(prefix, key_func(*args, **kwargs))
            else:
                key = target._generate_key(prefix, *args, **kwargs)
            value = target.get(key, _MISSING)
            if value is not _MISSING:
                return value
            value = func(*args, **kwargs)
            target.set(key, value)
            return value

        return wrapper

    return decorator
