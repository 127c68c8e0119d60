"""Spanning properties of vector systems: completeness, complement property, full spark."""

import logging
import math
from itertools import combinations
from typing import Dict, Optional, Sequence

from ..errors import InvalidInput, ResourceLimit
from ..models.base import VectorSystem
from ..numkernel import DEFAULT_TOLERANCE, Tolerance, rank

logger = logging.getLogger(__name__)

COMPLEMENT_MAX_VECTORS = 24
SPARK_MAX_SUBSETS = 10**6


def is_complete(
    S: VectorSystem, columns: Optional[Sequence[int]] = None, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """True iff the selected columns span C^d; an empty selection is never complete."""
    cols = list(range(S.m)) if columns is None else list(columns)
    if len(cols) < S.d:
        return False
    return rank(S.select(cols), tol) == S.d


class CompletenessCache:
    """Memoized completeness of column subsets, keyed by bitmask."""

    def __init__(self, system: VectorSystem, tol: Tolerance = DEFAULT_TOLERANCE):
        self.system = system
        self.tol = tol
        self._cache: Dict[int, bool] = {}

    def __call__(self, mask: int) -> bool:
        cached = self._cache.get(mask)
        if cached is None:
            cols = [j for j in range(self.system.m) if mask >> j & 1]
            cached = is_complete(self.system, cols, self.tol)
            self._cache[mask] = cached
        return cached


def has_complement_property(G: VectorSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Every bipartition has a complete side (2^{m-1} unordered splits)."""
    m = G.m
    if m > COMPLEMENT_MAX_VECTORS:
        raise ResourceLimit(
            f"complement property enumeration needs m <= {COMPLEMENT_MAX_VECTORS}, got {m}",
            total=2 ** (m - 1),
        )
    full = (1 << m) - 1
    complete = CompletenessCache(G, tol)
    # column 0 always sits in S, so each unordered split is visited once
    for rest in range(1 << (m - 1)):
        mask = 1 | (rest << 1)
        other = full & ~mask
        if complete(mask) or complete(other):
            continue
        logger.debug(f"complement property fails on split {mask:b} | {other:b}")
        return False
    return True


def is_full_spark(G: VectorSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Every d columns are linearly independent."""
    if G.m < G.d:
        raise InvalidInput(f"full spark needs m >= d, got m={G.m}, d={G.d}")
    subsets = math.comb(G.m, G.d)
    if subsets > SPARK_MAX_SUBSETS:
        raise ResourceLimit(
            f"full spark check needs C(m,d) <= {SPARK_MAX_SUBSETS}, got {subsets}", total=subsets
        )
    return all(is_complete(G, cols, tol) for cols in combinations(range(G.m), G.d))


def fails_2pr_oracle(G: VectorSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Two-element phase sets: failure is exactly the lack of the complement property."""
    return not has_complement_property(G, tol)
