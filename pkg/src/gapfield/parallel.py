"""Order-preserving parallel map; results never depend on the worker count."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_WIDTH = "GAPFIELD_THREADS"


def resolve_width(width: int | None) -> int:
    env = os.environ.get(ENV_WIDTH)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, width or 1)


def map_ordered(fn: Callable[[T], R], items: Iterable[T], width: int | None = 1) -> list[R]:
    """``[fn(x) for x in items]``, fanned out over processes when ``width > 1``."""
    items = list(items)
    w = min(resolve_width(width), len(items)) if items else 1
    if w <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * w))))
