"""Dense complex linear algebra with explicit tolerance semantics."""

from dataclasses import dataclass
from typing import Any, List

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from .errors import InvalidInput

Cx = complex
CMatrix = NDArray[np.complex128]
CVector = NDArray[np.complex128]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds used by rank, null space and witness checks."""
    rank_rel: float = 1e-10
    minor: float = 1e-9
    witness: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("rank_rel", "minor", "witness"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidInput(f"tolerance {name} must be positive, got {value}")


DEFAULT_TOLERANCE = Tolerance()


def as_cmatrix(data: Any) -> CMatrix:
    """Coerce to a finite, nonempty 2-D complex128 array."""
    try:
        matrix = np.asarray(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"not a complex matrix: {e}") from e
    if matrix.ndim != 2 or matrix.size == 0:
        raise InvalidInput(f"expected a nonempty 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInput("matrix has non-finite entries")
    return matrix


def as_cvector(data: Any) -> CVector:
    """Coerce to a finite, nonempty 1-D complex128 array."""
    try:
        vector = np.asarray(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"not a complex vector: {e}") from e
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidInput(f"expected a nonempty 1-D vector, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise InvalidInput("vector has non-finite entries")
    return vector


def rank_threshold(sigma_max: float, shape: tuple, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    return tol.rank_rel * sigma_max * max(shape)


def rank(M: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Numerical rank: singular values above rank_rel * sigma_max * max(rows, cols)."""
    matrix = as_cmatrix(M)
    sigma = linalg.svdvals(matrix)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rank_threshold(sigma[0], matrix.shape, tol)))


def null_space_basis(M: Any, tol: Tolerance = DEFAULT_TOLERANCE) -> List[CVector]:
    """Orthonormal basis of the numerical null space, from a full SVD.

    The basis is the conjugated trailing rows of V^H, so every returned vector
    b satisfies M @ b ~ 0 (not M^H).
    """
    matrix = as_cmatrix(M)
    _, sigma, vh = linalg.svd(matrix, full_matrices=True)
    cols = matrix.shape[1]
    if sigma.size == 0 or sigma[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(sigma > rank_threshold(sigma[0], matrix.shape, tol)))
    return [np.conj(vh[k]).copy() for k in range(r, cols)]


def determinant(M: Any) -> Cx:
    """Determinant by LU factorization with partial pivoting."""
    matrix = as_cmatrix(M)
    if matrix.shape[0] != matrix.shape[1]:
        raise InvalidInput(f"determinant needs a square matrix, got shape {matrix.shape}")
    return complex(linalg.det(matrix))


def inner(f: CVector, g: CVector) -> Cx:
    """<f, g> = sum f_i conj(g_i), linear in the first argument."""
    return complex(np.vdot(g, f))
