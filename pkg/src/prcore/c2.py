"""Closed forms for four vectors in C^2.

Every such system with some nonzero column parallel to no other column is
equivalent (invertible transform, column rescaling and reordering) to
G(a, b, c) = {(1, 0), (a, 1), (b, 1), (c, 1)}.
"""

import cmath
import math
from itertools import permutations
from typing import Optional, Tuple

import numpy as np

from ..errors import DegenerateInput, InfeasibleInput, InvalidInput
from ..models.base import Assignment, VectorSystem, Witness
from ..phases import PhaseSet, cr_orderings, cross_ratio
from .engine import witness_residual

EQUAL_TOL = 1e-10
CR_TOL = 1e-9
REAL_TOL = 1e-10


def c2_system(a: complex, b: complex, c: complex) -> VectorSystem:
    return VectorSystem.from_columns([(1, 0), (a, 1), (b, 1), (c, 1)])


def _coincide(x: complex, y: complex, scale: float) -> bool:
    return abs(x - y) <= EQUAL_TOL * scale


def c2_oracle(a: complex, b: complex, c: complex, T: PhaseSet) -> bool:
    """Does G(a, b, c) do Theta-PR, for |T| in {2, 3, 4}."""
    a, b, c = complex(a), complex(b), complex(c)
    k = len(T)
    if k not in (2, 3, 4):
        raise InvalidInput(f"the C^2 closed form covers |T| in {{2, 3, 4}}, got {k}")
    scale = max(1.0, abs(a), abs(b), abs(c))
    ab, bc, ac = _coincide(a, b, scale), _coincide(b, c, scale), _coincide(a, c, scale)
    if k == 2:
        return not (ab and bc)
    if ab or bc or ac:
        return False
    if k == 3:
        return True
    ratio = (c - a) / (b - a)
    tol = CR_TOL * max(1.0, abs(ratio))
    return not any(abs(ratio - cr.conjugate()) <= tol for cr in cr_orderings(T))


def c2_pr_oracle(a: complex, b: complex, c: complex) -> bool:
    """Does G(a, b, c) do phase retrieval for the whole circle."""
    a, b, c = complex(a), complex(b), complex(c)
    if _coincide(a, b, max(1.0, abs(a), abs(b))):
        return False
    return abs(((c - a) / (b - a)).imag) >= REAL_TOL


def _normal_form_at(G: VectorSystem, pivot: int) -> Optional[Tuple[complex, complex, complex]]:
    g1 = G.column(pivot)
    if np.linalg.norm(g1) == 0.0:
        return None
    basis = np.column_stack([g1, [-np.conj(g1[1]), np.conj(g1[0])]])
    to_normal = np.linalg.inv(basis)
    params = []
    for j in range(G.m):
        if j == pivot:
            continue
        g = G.column(j)
        p, q = to_normal @ g
        if abs(q) <= 1e-12 * max(float(np.linalg.norm(g)), 1e-300):
            return None
        params.append(complex(p / q))
    return params[0], params[1], params[2]


def c2_normal_form(G: VectorSystem) -> Optional[Tuple[complex, complex, complex]]:
    """(a, b, c) with G equivalent to G(a, b, c), or None if no column can serve as (1, 0).

    Columns are tried in order as the pivot; the remaining three keep their order.
    """
    if G.d != 2 or G.m != 4:
        raise InvalidInput(f"normal form needs 4 vectors in C^2, got d={G.d}, m={G.m}")
    for pivot in range(G.m):
        params = _normal_form_at(G, pivot)
        if params is not None:
            return params
    return None


def c2_failure_witness(a: complex, b: complex, c: complex, T: PhaseSet) -> Witness:
    """Explicit (f, h) for G(a, b, c) when (c-a)/(b-a) = conj CR(t1, t2; t3, t4).

    Built on the normalized system {(1,0), (0,1), (p,1), (q,1)}, p = b-a, q = c-a,
    where f = (t1/conj p, -t2 r), h = (1/conj p, -r), r = (t1-t3)/(t2-t3),
    then pulled back through (1, -a; 0, 1).
    """
    if len(T) != 4:
        raise InvalidInput(f"the cross-ratio witness needs |T| = 4, got {len(T)}")
    a, b, c = complex(a), complex(b), complex(c)
    p, q = b - a, c - a
    scale = max(1.0, abs(a), abs(b), abs(c))
    if abs(p) <= EQUAL_TOL * scale or abs(q) <= EQUAL_TOL * scale or abs(p - q) <= EQUAL_TOL * scale:
        raise InvalidInput("parameters coincide; use the three-element characterization")
    ratio = q / p
    for order in permutations(T.values):
        t1, t2, t3, t4 = order
        if abs(ratio - cross_ratio(t1, t2, t3, t4).conjugate()) > CR_TOL * max(1.0, abs(ratio)):
            continue
        r = (t1 - t3) / (t2 - t3)
        f_normal = np.array([t1 / p.conjugate(), -t2 * r], dtype=np.complex128)
        h_normal = np.array([1 / p.conjugate(), -r], dtype=np.complex128)
        pull_back = np.array([[1, 0], [-a.conjugate(), 1]], dtype=np.complex128)
        f, h = pull_back @ f_normal, pull_back @ h_normal
        assignment = Assignment(tuple(T.index_of(t) for t in order))
        system = c2_system(a, b, c)
        residual = witness_residual(system, assignment.values(T), f, h)
        return Witness(f=f, h=h, assignment=assignment, residual=residual)
    raise InfeasibleInput(f"(c-a)/(b-a) = {ratio} matches no cross ratio of the phase set")


def phases_for_real_ratio(r: float) -> PhaseSet:
    """{1, e^{i s}, -e^{i s}, i e^{i s}} in this order, whose cross ratio equals r.

    CR(1, w; -w, i w) = 1 / (1 + tan(s/2)) for w = e^{i s}, so s = 2 atan(1/r - 1).
    """
    r = float(r)
    if not math.isfinite(r) or abs(r) <= 1e-12 or abs(r - 1.0) <= 1e-12:
        raise DegenerateInput(f"no four distinct phases have cross ratio {r}")
    s = 2.0 * math.atan(1.0 / r - 1.0)
    w = cmath.exp(1j * s)
    return PhaseSet((1.0 + 0j, w, -w, 1j * w))
