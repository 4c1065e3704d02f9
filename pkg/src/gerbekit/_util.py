"""Small shared helpers: deterministic ordering, verdicts, debug switch."""

from __future__ import annotations

import hashlib
import os
from typing import Any, NamedTuple

from networkx.utils import UnionFind

__all__ = ["sortkey", "sort", "Verdict", "UnionFind", "debug_enabled", "digest"]


def debug_enabled() -> bool:
    return os.environ.get("GERBEKIT_DEBUG", "") not in ("", "0")


def sortkey(x: Any):
    """Structural total order used everywhere ids or elements are sorted.

    Digit strings sort numerically so canonical names "0".."n-1" keep index
    order; tuples sort positionally.
    """
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        if x.isdigit():
            return (0, int(x))
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(sortkey(e) for e in x))
    if isinstance(x, frozenset):
        return (3, tuple(sorted(sortkey(e) for e in x)))
    if x is None:
        return (-1,)
    return (4, repr(x))


def sort(items) -> list:
    return sorted(items, key=sortkey)


def digest(x: Any, n: int = 12) -> str:
    return hashlib.sha1(repr(x).encode()).hexdigest()[:n]


class Verdict(NamedTuple):
    """Boolean answer carrying a witness for the failing case."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return bool(self.ok)
