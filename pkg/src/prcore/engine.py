"""Exhaustive Theta-PR decision engine for finite systems in C^d.

A system fails Theta-PR iff some assignment theta in Theta^m admits linearly
independent (f, h) with <f, g_j> = theta_j <h, g_j> for all j. For a fixed
assignment these (f, h) are, after conjugation, the null vectors of
M(theta) = (F^T, -D(conj theta) F^T), so the engine scans assignments in
lexicographic order and tests each null space for an independent pair.
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import InvalidInput, ResourceLimit
from ..models.base import Assignment, DecisionReport, VectorSystem, Witness
from ..numkernel import (
    CMatrix,
    CVector,
    DEFAULT_TOLERANCE,
    Tolerance,
    null_space_basis,
)
from ..phases import PhaseSet
from .frames import CompletenessCache

logger = logging.getLogger(__name__)


class EngineOptions(BaseModel):
    """Knobs for decide_theta_pr."""
    model_config = ConfigDict(frozen=True)

    assignment_budget: int = Field(10**7, ge=1)
    threads: int = Field(1, ge=1)
    chunk_size: int = Field(4096, ge=1)
    rank_tol: float = Field(DEFAULT_TOLERANCE.rank_rel, gt=0)
    minor_tol: float = Field(DEFAULT_TOLERANCE.minor, gt=0)
    witness_tol: float = Field(DEFAULT_TOLERANCE.witness, gt=0)
    prune: bool = True

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(rank_rel=self.rank_tol, minor=self.minor_tol, witness=self.witness_tol)


def build_constraint_matrix(G: VectorSystem, T: Sequence[complex], a: Assignment) -> CMatrix:
    """Row j is (g_j^T, -conj(theta_j) g_j^T)."""
    if len(a) != G.m:
        raise InvalidInput(f"assignment has length {len(a)}, system has {G.m} vectors")
    if any(i < 0 or i >= len(T) for i in a.indices):
        raise InvalidInput(f"assignment {a.indices} indexes outside a phase set of size {len(T)}")
    theta = a.values(T)
    Ft = G.F.T
    return np.hstack([Ft, -np.conj(theta)[:, None] * Ft])


def subspace_contains_independent_pair(
    basis: Sequence[CVector], tol: Tolerance = DEFAULT_TOLERANCE
) -> Optional[CVector]:
    """Find v = (u, w) in span(basis) with u, w linearly independent, or None.

    Each 2x2 minor u_a w_b - u_b w_a is a quadratic form on the span, so it
    vanishes identically iff it vanishes on every basis vector and every
    pairwise sum of basis vectors. Among those evaluation points the one with
    the largest normalized minor is returned, scaled to unit norm.
    """
    if not basis:
        return None
    B = np.column_stack([np.asarray(b, dtype=np.complex128) for b in basis])
    n = B.shape[0]
    if n % 2:
        raise InvalidInput(f"basis vectors must have even length, got {n}")
    d = n // 2
    if d < 2:
        return None
    k = B.shape[1]
    upper_i, upper_j = np.triu_indices(k, 1)
    V = np.hstack([B, B[:, upper_i] + B[:, upper_j]])
    U, W = V[:d], V[d:]
    products = U[:, None, :] * W[None, :, :]
    minors = products - products.transpose(1, 0, 2)
    norms = np.sum(np.abs(V) ** 2, axis=0)
    scores = np.max(np.abs(minors), axis=(0, 1)) / np.where(norms > 0, norms, 1.0)
    best = int(np.argmax(scores))
    if scores[best] <= tol.minor:
        return None
    v = V[:, best]
    return v / np.linalg.norm(v)


def witness_residual(G: VectorSystem, theta: np.ndarray, f: CVector, h: CVector) -> float:
    # <f, g_j> for all j is F^H f
    Fh = np.conj(G.F).T
    return float(np.max(np.abs(Fh @ f - theta * (Fh @ h))))


def verify_witness(
    G: VectorSystem, T: Sequence[complex], w: Witness, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Re-check a witness: small residual and f separated from every theta h."""
    if len(w.assignment) != G.m or any(i < 0 or i >= len(T) for i in w.assignment.indices):
        return False
    f = np.asarray(w.f, dtype=np.complex128)
    h = np.asarray(w.h, dtype=np.complex128)
    scale = max(float(np.linalg.norm(f)), float(np.linalg.norm(h)))
    if scale == 0.0:
        return False
    column_scale = max(1.0, float(np.max(np.linalg.norm(G.F, axis=0))))
    residual = witness_residual(G, w.assignment.values(T), f, h)
    if residual > tol.witness * column_scale * scale:
        return False
    separation = min(float(np.linalg.norm(f - theta * h)) for theta in T) / scale
    return separation > 10.0 * tol.rank_rel


def analyze_assignment(
    G: VectorSystem, T: Sequence[complex], a: Assignment, tol: Tolerance = DEFAULT_TOLERANCE
) -> Optional[Witness]:
    """Witness for a single assignment, or None when its null space has no independent pair."""
    M = build_constraint_matrix(G, T, a)
    v = subspace_contains_independent_pair(null_space_basis(M, tol), tol)
    if v is None:
        return None
    f = np.conj(v[: G.d])
    h = np.conj(v[G.d :])
    return Witness(f=f, h=h, assignment=a, residual=witness_residual(G, a.values(T), f, h))


class _LowestWitness:
    """Monotonic cell holding the lowest witness index found so far."""

    def __init__(self, ceiling: int):
        self._lock = threading.Lock()
        self.index = ceiling
        self.found = threading.Event()

    def offer(self, index: int) -> None:
        with self._lock:
            if index < self.index:
                self.index = index
            self.found.set()

    def beaten(self, index: int) -> bool:
        return self.found.is_set() and self.index < index


class _AssignmentSearch:
    """Scans a range of lexicographic assignment indices."""

    def __init__(self, G: VectorSystem, T: PhaseSet, options: EngineOptions):
        self.G = G
        self.T = T
        self.options = options
        self.tol = options.tolerance
        self.k = len(T)
        self.phases = T.as_array()
        self.Ft = G.F.T
        self.complete = CompletenessCache(G, self.tol)
        self._powers = [self.k ** (G.m - 1 - c) for c in range(G.m)]

    def digits(self, indices: np.ndarray) -> np.ndarray:
        top = int(indices[-1]) if indices.size else 0
        columns = []
        for p in self._powers:
            if p > top:
                columns.append(np.zeros_like(indices))
            else:
                columns.append((indices // p) % self.k)
        return np.stack(columns, axis=1)

    def _screen(self, start: int, stop: int) -> List[Tuple[int, Tuple[int, ...]]]:
        """Assignments in [start, stop) whose constraint matrix is rank deficient."""
        indices = np.arange(start, stop, dtype=np.int64)
        digits = self.digits(indices)
        d, m = self.G.d, self.G.m
        if m >= 2 * d:
            theta = self.phases[digits]
            M = np.concatenate(
                [
                    np.broadcast_to(self.Ft, (len(indices), m, d)),
                    -np.conj(theta)[:, :, None] * self.Ft[None, :, :],
                ],
                axis=2,
            )
            sigma = np.linalg.svd(M, compute_uv=False)
            threshold = self.tol.rank_rel * sigma[:, :1] * max(m, 2 * d)
            deficient = np.count_nonzero(sigma > threshold, axis=1) < 2 * d
            rows = np.flatnonzero(deficient)
        else:
            rows = np.arange(len(indices))
        return [(start + int(r), tuple(int(x) for x in digits[r])) for r in rows]

    def _pruned(self, digits: Tuple[int, ...]) -> bool:
        # a phase class spanning C^d forces f = theta h
        masks = {}
        for j, value in enumerate(digits):
            masks[value] = masks.get(value, 0) | (1 << j)
        return any(self.complete(mask) for mask in masks.values())

    def scan(self, start: int, stop: int, best: _LowestWitness) -> Optional[Tuple[int, Witness]]:
        chunk = self.options.chunk_size
        for chunk_start in range(start, stop, chunk):
            if best.beaten(chunk_start):
                return None
            chunk_stop = min(chunk_start + chunk, stop)
            logger.debug(f"scanning assignments [{chunk_start}, {chunk_stop})")
            for index, digits in self._screen(chunk_start, chunk_stop):
                if best.beaten(index):
                    return None
                if self.options.prune and self._pruned(digits):
                    continue
                witness = analyze_assignment(self.G, self.T, Assignment(digits), self.tol)
                if witness is not None:
                    best.offer(index)
                    return index, witness
        return None


def _ranges(limit: int, parts: int, chunk: int) -> List[Tuple[int, int]]:
    step = max(chunk, -(-limit // parts))
    step = -(-step // chunk) * chunk
    return [(s, min(s + step, limit)) for s in range(0, limit, step)]


def decide_theta_pr(
    G: VectorSystem, T: PhaseSet, options: Optional[EngineOptions] = None
) -> DecisionReport:
    """Decide whether G does Theta-PR by scanning Theta^m lexicographically.

    Serial and threaded runs return the same report: every worker stops at its
    first witness and the lowest index wins.

    When assignment_budget is below |Theta|^m only the first budget assignments
    are scanned. A witness found there is returned with does_pr False and a
    truncation warning, since it settles the question. ResourceLimit is raised
    only when the truncated scan finds no witness.
    """
    options = options or EngineOptions()
    if G.m < 1:
        raise InvalidInput("empty vector system")
    started = time.perf_counter()
    warnings: List[str] = []
    zero = G.zero_columns
    if zero:
        message = f"columns {zero} are zero and impose no constraint"
        logger.warning(message)
        warnings.append(message)

    total = len(T) ** G.m
    limit = min(total, options.assignment_budget)
    if limit < total:
        message = f"budget covers {limit} of {total} assignments"
        logger.warning(message)
        warnings.append(message)

    search = _AssignmentSearch(G, T, options)
    best = _LowestWitness(limit)
    if options.threads == 1:
        results = [search.scan(0, limit, best)]
    else:
        ranges = _ranges(limit, options.threads * 4, options.chunk_size)
        with ThreadPoolExecutor(max_workers=options.threads) as executor:
            results = list(executor.map(lambda r: search.scan(r[0], r[1], best), ranges))

    found = [r for r in results if r is not None]
    metadata = {
        "d": G.d,
        "m": G.m,
        "phase_count": len(T),
        "assignment_budget": options.assignment_budget,
        "rank_tol": options.rank_tol,
        "minor_tol": options.minor_tol,
        "witness_tol": options.witness_tol,
    }
    elapsed = time.perf_counter() - started
    if found:
        index, witness = min(found, key=lambda r: r[0])
        logger.info(
            f"d={G.d} m={G.m} |T|={len(T)}: fails Theta-PR at assignment {witness.assignment.indices}"
        )
        return DecisionReport(
            does_pr=False,
            witness=witness,
            assignments_checked=index + 1,
            total_assignments=total,
            elapsed=elapsed,
            warnings=warnings,
            metadata=metadata,
        )
    if limit < total:
        raise ResourceLimit(
            f"no witness among the first {limit} of {total} assignments; raise the budget",
            checked=limit,
            total=total,
        )
    logger.info(f"d={G.d} m={G.m} |T|={len(T)}: does Theta-PR ({total} assignments)")
    return DecisionReport(
        does_pr=True,
        assignments_checked=total,
        total_assignments=total,
        elapsed=elapsed,
        warnings=warnings,
        metadata=metadata,
    )
