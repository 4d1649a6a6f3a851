"""Size caps and shared tolerances."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

# tolerance for all floating-point spectral comparisons
SPECTRAL_TOL = 1e-6


@dataclass(frozen=True)
class Caps:
    """Hard limits that keep dense computations inside memory/time budgets.

    max_ring_size       largest allowed ring cardinality q**r
    max_graph_classes   largest per-side class count for a dense biadjacency
    spectral_cap        largest matrix side for dense SVD
    max_n               largest tuple-length parameter for counting
    max_tuple_count     largest number of tuples a counting fold may visit
    max_pair_count      largest |U|*|V| for direct pairwise edge counting
    max_embed_size      largest embedded vertex-list length per side
    """

    max_ring_size: int = 1 << 16
    max_graph_classes: int = 5000
    spectral_cap: int = 5000
    max_n: int = 4
    max_tuple_count: int = 50_000_000
    max_pair_count: int = 30_000_000
    max_embed_size: int = 200_000

    def with_(self, **kw) -> "Caps":
        return replace(self, **kw)


DEFAULT_CAPS = Caps()


def thread_count() -> int:
    """Worker count for parallel scans, from VALRING_THREADS if set.

    Output bytes never depend on this value; it only sets pool width.
    """
    raw = os.environ.get("VALRING_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n >= 1:
        return n
    return min(8, os.cpu_count() or 1)


def derive_seed(master: int, *parts: int) -> int:
    """Mix a master seed with task coordinates into a child seed.

    splitmix64-style finalizer; pure integer ops, so identical on every
    platform regardless of thread scheduling.
    """
    h = master & 0xFFFFFFFFFFFFFFFF
    for part in parts:
        h = (h + 0x9E3779B97F4A7C15 + (part & 0xFFFFFFFFFFFFFFFF)) & 0xFFFFFFFFFFFFFFFF
        h = ((h ^ (h >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        h = ((h ^ (h >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        h = h ^ (h >> 31)
    return h
