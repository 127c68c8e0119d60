"""Domain types and the oracle interface."""

from .base import (
    Assignment,
    Cover3,
    DecisionReport,
    OracleKind,
    PhaseRetrievalOracle,
    VectorSystem,
    Witness,
)

__all__ = [
    "Assignment",
    "Cover3",
    "DecisionReport",
    "OracleKind",
    "PhaseRetrievalOracle",
    "VectorSystem",
    "Witness",
]
