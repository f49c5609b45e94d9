"""Lock-guarded memo table for presheaf evaluations."""

from __future__ import annotations

import threading
from typing import Callable, Dict, Hashable, TypeVar

T = TypeVar("T")


class Memo:
    def __init__(self):
        self._data: Dict[Hashable, object] = {}
        self._lock = threading.RLock()

    def get(self, key: Hashable, compute: Callable[[], T]) -> T:
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = compute()
        with self._lock:
            # another worker may have won the race; keep the first value
            return self._data.setdefault(key, value)

    def __len__(self) -> int:
        return len(self._data)
