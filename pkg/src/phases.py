"""Phase sets on the unit circle, roots of unity, arcs and cross ratios."""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from .errors import DegenerateInput, InvalidInput
from .numkernel import Cx

UNIT_TOL = 1e-12
DISTINCT_TOL = 1e-10
CR_POINT_TOL = 1e-12
CR_MATCH_TOL = 1e-9

_QUARTER_TURNS = {
    Fraction(0): 1 + 0j,
    Fraction(1, 4): 1j,
    Fraction(1, 2): -1 + 0j,
    Fraction(3, 4): -1j,
}


def unit_root(k: int, n: int) -> Cx:
    """e^{2 pi i k/n}, exact at quarter turns."""
    turn = Fraction(k, n) % 1
    if turn in _QUARTER_TURNS:
        return _QUARTER_TURNS[turn]
    return cmath.exp(2j * math.pi * float(turn))


@dataclass(frozen=True)
class PhaseSet:
    """Finite ordered set of distinct unit-modulus complex numbers."""
    values: Tuple[Cx, ...]

    def __post_init__(self) -> None:
        values = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise InvalidInput("phase set must be nonempty")
        for v in values:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidInput(f"phase {v} is not finite")
            if abs(abs(v) - 1.0) > UNIT_TOL:
                raise InvalidInput(f"phase {v} is not unimodular (|v| = {abs(v)!r})")
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                if abs(values[i] - values[j]) <= DISTINCT_TOL:
                    raise InvalidInput(f"phases {values[i]} and {values[j]} are not distinct")

    @classmethod
    def from_angles(cls, angles: Iterable[float], degrees: bool = False) -> "PhaseSet":
        radians = [math.radians(a) if degrees else float(a) for a in angles]
        return cls(tuple(cmath.exp(1j * t) for t in radians))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Cx]:
        return iter(self.values)

    def __getitem__(self, index: int) -> Cx:
        return self.values[index]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.complex128)

    def index_of(self, value: Cx) -> int:
        """Index of the element within DISTINCT_TOL of value."""
        for i, v in enumerate(self.values):
            if abs(v - value) <= DISTINCT_TOL:
                return i
        raise InvalidInput(f"{value} is not an element of the phase set")

    def subset(self, indices: Sequence[int]) -> "PhaseSet":
        return PhaseSet(tuple(self.values[i] for i in indices))


def roots_of_unity(n: int) -> PhaseSet:
    """The n-th roots of unity in order k = 0..n-1."""
    if n < 1:
        raise InvalidInput(f"roots_of_unity needs n >= 1, got {n}")
    return PhaseSet(tuple(unit_root(k, n) for k in range(n)))


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc {e^{it} : start <= t <= start + length}."""
    start: float
    length: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.length)):
            raise InvalidInput("arc parameters must be finite")
        if not 0.0 < self.length < 2.0 * math.pi:
            raise InvalidInput(f"arc length must lie in (0, 2pi), got {self.length}")

    @property
    def end(self) -> float:
        return self.start + self.length

    @property
    def center(self) -> float:
        return self.start + self.length / 2.0

    def endpoints(self) -> Tuple[Cx, Cx]:
        return cmath.exp(1j * self.start), cmath.exp(1j * self.end)

    def contains(self, z: Cx, tol: float = 1e-8) -> bool:
        offset = (cmath.phase(z) - self.start) % (2.0 * math.pi)
        if offset > math.pi + self.length / 2.0:
            offset -= 2.0 * math.pi
        return -tol <= offset <= self.length + tol

    def sample(self, count: int, interior: bool = True) -> np.ndarray:
        """Evenly spaced points of the arc (endpoints excluded when interior)."""
        if interior:
            t = self.start + self.length * (np.arange(1, count + 1) / (count + 1))
        else:
            t = np.linspace(self.start, self.end, count)
        return np.exp(1j * t)


def cross_ratio(z1: Cx, z2: Cx, z3: Cx, z4: Cx) -> Cx:
    """CR(z1, z2; z3, z4) = (z1-z3)(z2-z4) / ((z1-z4)(z2-z3))."""
    points = (complex(z1), complex(z2), complex(z3), complex(z4))
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(points[i] - points[j]) <= CR_POINT_TOL:
                raise DegenerateInput(f"cross ratio needs distinct points, got {points}")
    a, b, c, d = points
    return (a - c) * (b - d) / ((a - d) * (b - c))


def cr_orderings(T: PhaseSet) -> List[Cx]:
    """Cross ratios of all 24 orderings of a 4-element phase set."""
    if len(T) != 4:
        raise InvalidInput(f"cr_orderings needs |T| = 4, got {len(T)}")
    return [cross_ratio(*order) for order in permutations(T.values)]


def cr_equivalent(T: PhaseSet, T2: PhaseSet) -> bool:
    """True iff the cross-ratio orbits of T and T2 share a value."""
    first = cr_orderings(T)
    second = cr_orderings(T2)
    for u in first:
        for v in second:
            if abs(u - v) <= CR_MATCH_TOL * max(1.0, abs(u)):
                return True
    return False
