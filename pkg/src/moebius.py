"""Moebius transforms of the Riemann sphere, with the circle-preserving ones in focus.

Maps are 2x2 complex matrices up to scale: (a, b; c, d) acts by
z -> (a z + b) / (c z + d). The point at infinity is an explicit sentinel.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Tuple, Union

import numpy as np

from .errors import DegenerateInput, InvalidInput
from .numkernel import CMatrix, Cx, as_cmatrix
from .phases import Arc, PhaseSet

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
POLE_TOL = 1e-14
CIRCLE_TOL = 1e-9
PROJECTIVE_TOL = 1e-9


class PointAtInfinity:
    """The point at infinity of the extended complex plane."""

    _instance = None

    def __new__(cls) -> "PointAtInfinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = PointAtInfinity()
ExtendedCx = Union[Cx, PointAtInfinity]


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """z -> (a z + b) / (c z + d), stored as its matrix."""
    matrix: CMatrix
    circle_preserving: bool = False

    def __post_init__(self) -> None:
        matrix = as_cmatrix(self.matrix)
        if matrix.shape != (2, 2):
            raise InvalidInput(f"Moebius matrix must be 2x2, got {matrix.shape}")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        scale = float(np.max(np.abs(matrix))) ** 2
        if abs(self.det) <= SINGULAR_TOL * scale:
            raise DegenerateInput(f"Moebius matrix is singular (det = {self.det})")
        if self.circle_preserving and not preserves_unit_circle(self):
            raise InvalidInput("map flagged circle-preserving does not preserve the unit circle")

    @classmethod
    def from_entries(
        cls, a: Cx, b: Cx, c: Cx, d: Cx, circle_preserving: bool = False
    ) -> "MoebiusMap":
        return cls(np.array([[a, b], [c, d]], dtype=np.complex128), circle_preserving)

    @property
    def entries(self) -> Tuple[Cx, Cx, Cx, Cx]:
        m = self.matrix
        return complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])

    @property
    def det(self) -> Cx:
        a, b, c, d = self.entries
        return a * d - b * c

    def __call__(self, z: ExtendedCx) -> ExtendedCx:
        return apply(self, z)

    def __repr__(self) -> str:
        return f"MoebiusMap({self.entries}, circle_preserving={self.circle_preserving})"


def apply(M: MoebiusMap, z: ExtendedCx) -> ExtendedCx:
    """Evaluate M at z; returns INFINITY at the pole."""
    a, b, c, d = M.entries
    if isinstance(z, PointAtInfinity):
        if abs(c) < POLE_TOL * max(abs(a), 1.0):
            return INFINITY
        return a / c
    z = complex(z)
    denominator = c * z + d
    if abs(denominator) < POLE_TOL:
        return INFINITY
    return (a * z + b) / denominator


def apply_array(M: MoebiusMap, z: np.ndarray) -> np.ndarray:
    """Vectorized evaluation for points known to avoid the pole."""
    a, b, c, d = M.entries
    z = np.asarray(z, dtype=np.complex128)
    return (a * z + b) / (c * z + d)


def preserves_unit_circle(M: MoebiusMap) -> bool:
    """Three-point test: 1, i and -1 must land on the unit circle."""
    for z in (1.0 + 0j, 1j, -1.0 + 0j):
        w = apply(M, z)
        if isinstance(w, PointAtInfinity) or abs(abs(w) - 1.0) >= CIRCLE_TOL:
            return False
    return True


def identity() -> MoebiusMap:
    return MoebiusMap(np.eye(2, dtype=np.complex128), circle_preserving=True)


def rotation(angle: float) -> MoebiusMap:
    """z -> e^{i angle} z."""
    return MoebiusMap.from_entries(cmath.exp(1j * angle), 0, 0, 1, circle_preserving=True)


def translation(shift: Cx) -> MoebiusMap:
    """z -> z + shift."""
    return MoebiusMap.from_entries(1, shift, 0, 1)


def compose(M1: MoebiusMap, M2: MoebiusMap) -> MoebiusMap:
    """M1 after M2."""
    return MoebiusMap(
        M1.matrix @ M2.matrix,
        circle_preserving=M1.circle_preserving and M2.circle_preserving,
    )


def invert(M: MoebiusMap) -> MoebiusMap:
    a, b, c, d = M.entries
    scale = max(abs(a), abs(b), abs(c), abs(d)) ** 2
    if abs(a * d - b * c) <= SINGULAR_TOL * scale:
        raise DegenerateInput("cannot invert a near-singular Moebius map")
    return MoebiusMap.from_entries(d, -b, -c, a, circle_preserving=M.circle_preserving)


def is_projectively_equal(M1: MoebiusMap, M2: MoebiusMap, tol: float = PROJECTIVE_TOL) -> bool:
    """True iff M2 = lambda * M1 for some nonzero scalar, within tol (relative)."""
    x = M1.matrix.ravel()
    y = M2.matrix.ravel()
    scale = np.vdot(x, y) / np.vdot(x, x)
    return bool(np.linalg.norm(y - scale * x) <= tol * np.linalg.norm(y))


def u11_map(a: Cx, b: Cx) -> MoebiusMap:
    """Circle automorphism (a, b; conj b, conj a), normalized to |a|^2 - |b|^2 = 1."""
    a, b = complex(a), complex(b)
    gap = abs(a) ** 2 - abs(b) ** 2
    if not gap > SINGULAR_TOL:
        raise InvalidInput(f"U(1,1) map needs |a| > |b|, got |a|={abs(a)}, |b|={abs(b)}")
    s = math.sqrt(gap)
    a, b = a / s, b / s
    return MoebiusMap.from_entries(a, b, b.conjugate(), a.conjugate(), circle_preserving=True)


def image(M: MoebiusMap, T: PhaseSet) -> PhaseSet:
    """M(T) for a circle-preserving map, snapped back onto the circle."""
    values = []
    for theta in T:
        w = apply(M, theta)
        if isinstance(w, PointAtInfinity) or abs(abs(w) - 1.0) >= CIRCLE_TOL:
            raise DegenerateInput(f"map sends phase {theta} off the unit circle ({w})")
        values.append(w / abs(w))
    return PhaseSet(tuple(values))


# Cayley transform C(z) = i (1 + z) / (1 - z), unit circle -> real line.
CAYLEY = MoebiusMap.from_entries(1j, 1j, -1, 1)
CAYLEY_INVERSE = MoebiusMap.from_entries(1, -1j, 1, 1j)


def cayley(z: ExtendedCx) -> ExtendedCx:
    return apply(CAYLEY, z)


def cayley_inverse(w: ExtendedCx) -> ExtendedCx:
    return apply(CAYLEY_INVERSE, w)


def arc_to_arc(A: Arc, B: Arc) -> MoebiusMap:
    """Circle automorphism mapping arc A onto arc B, endpoints to endpoints.

    Rotate A to start at 1, send the circle to the real line by the Cayley
    transform (the arc becomes (-inf, -cot(l/2)]), translate so that
    -cot(l/2) + shift = -cot(L/2), return to the circle and rotate to B.
    """
    shift = 1.0 / math.tan(A.length / 2.0) - 1.0 / math.tan(B.length / 2.0)
    M = rotation(-A.start)
    for step in (CAYLEY, translation(shift), CAYLEY_INVERSE, rotation(B.start)):
        M = compose(step, M)
    M = MoebiusMap(M.matrix, circle_preserving=True)
    logger.debug(f"arc_to_arc: translation {shift:.6g}, det {M.det:.3g}")
    return M


@dataclass(frozen=True)
class RealLineArcMap:
    """m(x) = e^{i beta} ((x + i v1)/(x - i v1)) ((x - i v2)/(x + i v2)), v1 > v2 > 0."""
    v1: float
    v2: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.v1 > self.v2 > 0):
            raise InvalidInput(f"real_line_to_arc needs v1 > v2 > 0, got v1={self.v1}, v2={self.v2}")

    @property
    def half_width(self) -> float:
        return 4.0 * math.atan(math.sqrt(self.v1 / self.v2)) - math.pi

    @property
    def peak(self) -> float:
        """The positive point where arg m - beta attains the half-width."""
        return math.sqrt(self.v1 * self.v2)

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=np.float64)
        v1, v2 = self.v1, self.v2
        value = np.exp(1j * self.beta) * (x + 1j * v1) / (x - 1j * v1) * (x - 1j * v2) / (x + 1j * v2)
        return value if value.ndim else complex(value)

    def phase_offset(self, x: Any) -> Any:
        """arg m(x) - beta without branch wrapping; an odd function of x."""
        x = np.asarray(x, dtype=np.float64)
        offset = 2.0 * (np.arctan2(self.v1, x) - np.arctan2(self.v2, x))
        return offset if offset.ndim else float(offset)


def real_line_to_arc(v1: float, v2: float, beta: float) -> Tuple[RealLineArcMap, float]:
    """The map m of the real line onto the arc [beta - L, beta + L], and L."""
    m = RealLineArcMap(float(v1), float(v2), float(beta))
    return m, m.half_width


def arc_parameters(half_width: float) -> Tuple[float, float]:
    """(v1, v2) with v2 = 1 such that real_line_to_arc has the given half-width L in (0, pi)."""
    if not 0.0 < half_width < math.pi:
        raise InvalidInput(f"half-width must lie in (0, pi), got {half_width}")
    return math.tan((half_width + math.pi) / 4.0) ** 2, 1.0
