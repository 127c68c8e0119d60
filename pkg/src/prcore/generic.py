"""Generic Theta-PR: the pairing construction and lower bounds on the number of vectors."""

import math
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import InfeasibleInput, InvalidInput
from ..models.base import Assignment, VectorSystem
from ..phases import DISTINCT_TOL, PhaseSet


def _value_classes(theta: Sequence[complex]) -> List[List[int]]:
    """Indices grouped by equal value, in order of first appearance."""
    representatives: List[complex] = []
    classes: List[List[int]] = []
    for index, value in enumerate(theta):
        value = complex(value)
        for k, rep in enumerate(representatives):
            if abs(rep - value) <= DISTINCT_TOL:
                classes[k].append(index)
                break
        else:
            representatives.append(value)
            classes.append([index])
    return classes


def matching_partition(theta: Sequence[complex], d: int) -> List[Tuple[int, int]]:
    """Split 0..2d-1 into d pairs of indices carrying distinct values.

    Classes of equal values are concatenated by decreasing size into a
    permutation pi; the pairs are (pi[r], pi[r + d]). No class is longer than
    d, so no pair falls inside one class.
    """
    if d < 1 or len(theta) != 2 * d:
        raise InvalidInput(f"matching needs 2d = {2 * d} values, got {len(theta)}")
    classes = sorted(_value_classes(theta), key=len, reverse=True)
    largest = len(classes[0])
    if largest > d:
        raise InfeasibleInput(f"a value repeats {largest} times, more than d = {d}")
    pi = [index for block in classes for index in block]
    return [(pi[r], pi[r + d]) for r in range(d)]


def assignment_from_values(theta: Sequence[complex]) -> Tuple[PhaseSet, Assignment]:
    """Distinct values of theta as a phase set, and theta as indices into it."""
    classes = _value_classes(theta)
    values = tuple(complex(theta[block[0]]) for block in classes)
    index_of = {i: k for k, block in enumerate(classes) for i in block}
    return PhaseSet(values), Assignment(tuple(index_of[i] for i in range(len(theta))))


def construct_invertible_system(theta: Sequence[complex], d: int) -> VectorSystem:
    """g_j = g_k = e_r for the r-th matching pair (j, k)."""
    pairs = matching_partition(theta, d)
    F = np.zeros((d, 2 * d), dtype=np.complex128)
    for r, (j, k) in enumerate(pairs):
        F[r, j] = 1.0
        F[r, k] = 1.0
    return VectorSystem(F)


def expected_determinant(theta: Sequence[complex], pairs: Sequence[Tuple[int, int]]) -> complex:
    """conj of prod (theta_j - theta_k); the constraint determinant equals it up to sign."""
    product = complex(np.prod([complex(theta[j]) - complex(theta[k]) for j, k in pairs]))
    return product.conjugate()


def heinosaari_lower_bound(d: int) -> int:
    """Lower bound on the number of vectors doing phase retrieval in C^d.

    With a = number of ones in the binary expansion of d - 1, the bound is
    4d - 4 - 2a plus 2 (d odd, a = 2 mod 4), 3 (d odd, a = 3 mod 4) or 1.
    """
    if d < 2:
        raise InvalidInput(f"the bound needs d >= 2, got {d}")
    ones = bin(d - 1).count("1")
    base = 4 * d - 4 - 2 * ones
    if d % 2 == 1 and ones % 4 == 2:
        return base + 2
    if d % 2 == 1 and ones % 4 == 3:
        return base + 3
    return base + 1


def arc_count_lower_bound(d: int) -> float:
    """4d - 4 - 2 log2(d): vectors needed for Theta-PR when Theta contains an arc."""
    if d < 2:
        raise InvalidInput(f"the bound needs d >= 2, got {d}")
    return 4 * d - 4 - 2 * math.log2(d)
