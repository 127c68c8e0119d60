"""Cover certificates for three-element phase sets.

G fails Theta-PR for Theta = {t1, t2, t3} iff its columns split into G_1, G_2,
G_3 with nonzero x_k orthogonal to G_k, x_1 and x_2 independent, and
x_3 = c2 x_2 - c1 x_1 where c1 = (t3 - t2)/(t2 - t1), c2 = (t3 - t1)/(t2 - t1).
For a fixed labeling this is linear in (x_1, x_2).
"""

import logging
from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidInput, ResourceLimit
from ..models.base import Cover3, VectorSystem
from ..numkernel import DEFAULT_TOLERANCE, Tolerance, null_space_basis
from ..phases import PhaseSet
from .engine import subspace_contains_independent_pair
from .frames import CompletenessCache

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


def span_coefficients(T: Sequence[complex]) -> Tuple[complex, complex]:
    """(c1, c2) with x_3 = c2 x_2 - c1 x_1."""
    t1, t2, t3 = (complex(t) for t in T)
    return (t3 - t2) / (t2 - t1), (t3 - t1) / (t2 - t1)


def fails_3pr_cover(
    G: VectorSystem,
    T: PhaseSet,
    budget: int = DEFAULT_BUDGET,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Optional[Cover3]:
    """First labeling (in product order over {1,2,3}^m) admitting a cover certificate."""
    if len(T) != 3:
        raise InvalidInput(f"the cover oracle needs |T| = 3, got {len(T)}")
    total = 3**G.m
    if total > budget:
        raise ResourceLimit(f"3^m = {total} label maps exceed the budget {budget}", total=total)
    d = G.d
    c1, c2 = span_coefficients(T.values)
    rows_h = np.conj(G.F).T
    complete = CompletenessCache(G, tol)

    for labels in product((1, 2, 3), repeat=G.m):
        masks = [0, 0, 0]
        for j, label in enumerate(labels):
            masks[label - 1] |= 1 << j
        # a complete class forces its x_k to vanish
        if any(complete(mask) for mask in masks if mask):
            continue
        A = np.zeros((G.m, 2 * d), dtype=np.complex128)
        for j, label in enumerate(labels):
            if label == 1:
                A[j, :d] = rows_h[j]
            elif label == 2:
                A[j, d:] = rows_h[j]
            else:
                A[j, :d] = -c1 * rows_h[j]
                A[j, d:] = c2 * rows_h[j]
        v = subspace_contains_independent_pair(null_space_basis(A, tol), tol)
        if v is None:
            continue
        x1, x2 = v[:d].copy(), v[d:].copy()
        logger.debug(f"cover found for labels {labels}")
        return Cover3(labels=tuple(labels), x1=x1, x2=x2, x3=c2 * x2 - c1 * x1)
    return None


def verify_cover(
    G: VectorSystem, T: PhaseSet, cover: Cover3, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    if len(cover.labels) != G.m or any(label not in (1, 2, 3) for label in cover.labels):
        return False
    xs = [np.asarray(x, dtype=np.complex128) for x in (cover.x1, cover.x2, cover.x3)]
    norms = [float(np.linalg.norm(x)) for x in xs]
    if min(norms) == 0.0:
        return False
    for j, label in enumerate(cover.labels):
        g = G.column(j)
        scale = norms[label - 1] * max(1.0, float(np.linalg.norm(g)))
        if abs(np.vdot(g, xs[label - 1])) > tol.witness * scale:
            return False
    if subspace_contains_independent_pair([np.concatenate([xs[0], xs[1]])], tol) is None:
        return False
    c1, c2 = span_coefficients(T.values)
    return bool(np.linalg.norm(xs[2] - (c2 * xs[1] - c1 * xs[0])) <= tol.witness * max(norms))
