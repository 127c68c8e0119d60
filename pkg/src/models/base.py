"""Domain types and the oracle interface shared by the decision engine and experiments."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..numkernel import CMatrix, CVector, as_cmatrix
from ..errors import InvalidInput


class OracleKind(str, Enum):
    """Decision procedures available for cross-validation."""
    ENGINE = "engine"
    COMPLEMENT = "complement"
    COVER3 = "cover3"
    C2 = "c2"


@dataclass(frozen=True, eq=False)
class VectorSystem:
    """The columns g_1..g_m of a d x m complex matrix F."""
    F: CMatrix

    def __post_init__(self) -> None:
        matrix = as_cmatrix(self.F).copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "F", matrix)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[complex]]) -> "VectorSystem":
        if not columns:
            raise InvalidInput("a vector system needs at least one vector")
        return cls(np.column_stack([np.asarray(c, dtype=np.complex128) for c in columns]))

    @property
    def d(self) -> int:
        return int(self.F.shape[0])

    @property
    def m(self) -> int:
        return int(self.F.shape[1])

    def column(self, j: int) -> CVector:
        return self.F[:, j]

    def columns(self) -> List[CVector]:
        return [self.F[:, j] for j in range(self.m)]

    def select(self, indices: Sequence[int]) -> CMatrix:
        return self.F[:, list(indices)]

    @property
    def zero_columns(self) -> List[int]:
        return [j for j in range(self.m) if not np.any(self.F[:, j])]

    def transformed(self, T: CMatrix) -> "VectorSystem":
        return VectorSystem(np.asarray(T, dtype=np.complex128) @ self.F)

    def rescaled(self, factors: Sequence[complex]) -> "VectorSystem":
        return VectorSystem(self.F * np.asarray(factors, dtype=np.complex128)[None, :])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorSystem):
            return NotImplemented
        return self.F.shape == other.F.shape and bool(np.array_equal(self.F, other.F))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"VectorSystem(d={self.d}, m={self.m})"


@dataclass(frozen=True)
class Assignment:
    """A phase choice theta in Theta^m, as indices into a PhaseSet."""
    indices: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def values(self, phases: Sequence[complex]) -> np.ndarray:
        return np.asarray([phases[i] for i in self.indices], dtype=np.complex128)


@dataclass(eq=False)
class Witness:
    """Linearly independent (f, h) with <f, g_j> = theta_j <h, g_j> for every column."""
    f: CVector
    h: CVector
    assignment: Assignment
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "f": [[float(z.real), float(z.imag)] for z in self.f],
            "h": [[float(z.real), float(z.imag)] for z in self.h],
            "assignment": list(self.assignment.indices),
            "residual": float(self.residual),
        }


@dataclass
class DecisionReport:
    """Outcome of a Theta-PR decision."""
    does_pr: bool
    witness: Optional[Witness] = None
    assignments_checked: int = 0
    total_assignments: int = 0
    elapsed: float = 0.0
    warnings: List[str] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.does_pr == (self.witness is not None):
            raise InvalidInput("a witness must be present exactly when Theta-PR fails")

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "does_pr": self.does_pr,
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "assignments_checked": self.assignments_checked,
            "total_assignments": self.total_assignments,
            "warnings": list(self.warnings),
            "metadata": dict(self.metadata),
        }
        if include_timing:
            result["elapsed"] = self.elapsed
        return result


@dataclass(eq=False)
class Cover3:
    """Labels in {1, 2, 3} and x_1, x_2, x_3 with x_k orthogonal to the columns labeled k."""
    labels: Tuple[int, ...]
    x1: CVector
    x2: CVector
    x3: CVector

    def to_dict(self) -> Dict[str, Any]:
        def pairs(v: CVector) -> List[List[float]]:
            return [[float(z.real), float(z.imag)] for z in v]

        return {
            "labels": list(self.labels),
            "x1": pairs(self.x1),
            "x2": pairs(self.x2),
            "x3": pairs(self.x3),
        }


class PhaseRetrievalOracle(ABC):
    """Abstract base class for procedures deciding Theta-PR."""

    def __init__(self, name: str, config: Optional[Dict[str, Any]] = None):
        self.name = name
        self.config = config or {}

    @abstractmethod
    def supports(self, system: VectorSystem, phases: Sequence[complex]) -> bool:
        """Check whether this oracle applies to the instance."""
        pass

    @abstractmethod
    def does_theta_pr(self, system: VectorSystem, phases: Sequence[complex]) -> bool:
        """Decide whether the system does Theta-PR."""
        pass

    def describe(self) -> Dict[str, Any]:
        """Short description for reports."""
        return {"name": self.name, "config": dict(self.config)}
