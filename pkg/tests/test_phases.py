"""Tests for phase sets, arcs and cross ratios."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import DegenerateInput, InvalidInput
from src.moebius import rotation, u11_map
from src.phases import (
    Arc,
    PhaseSet,
    cr_equivalent,
    cr_orderings,
    cross_ratio,
    roots_of_unity,
    unit_root,
)


def test_unit_root_exact_quarter_turns():
    """Test that quarter turns are exact."""
    assert unit_root(0, 5) == 1
    assert unit_root(1, 4) == 1j
    assert unit_root(2, 4) == -1
    assert unit_root(3, 4) == -1j
    assert unit_root(5, 4) == 1j
    assert unit_root(1, 3) == pytest.approx(complex(-0.5, math.sqrt(3) / 2))


def test_roots_of_unity():
    """Test roots of unity ordering."""
    assert roots_of_unity(4).values == (1, 1j, -1, -1j)
    assert roots_of_unity(2).values == (1, -1)
    with pytest.raises(InvalidInput):
        roots_of_unity(0)


def test_phase_set_validation():
    """Test rejection of empty, non-unimodular and repeated phases."""
    with pytest.raises(InvalidInput):
        PhaseSet(())
    with pytest.raises(InvalidInput):
        PhaseSet((1.0, 1.1))
    with pytest.raises(InvalidInput):
        PhaseSet((1.0, 1.0 + 1e-12j))


def test_phase_set_from_angles():
    """Test construction from angles in degrees."""
    T = PhaseSet.from_angles([0, 90], degrees=True)
    assert T[0] == pytest.approx(1)
    assert T[1] == pytest.approx(1j)
    assert T.index_of(1j) == 1
    with pytest.raises(InvalidInput):
        T.index_of(-1)


def test_arc_contains():
    """Test arc membership, including arcs that wrap past angle pi."""
    arc = Arc(start=3.0, length=1.0)
    assert arc.contains(cmath.exp(3.5j))
    assert arc.contains(cmath.exp(1j * (3.9 - 2 * math.pi)))
    assert not arc.contains(cmath.exp(0.5j))
    assert all(arc.contains(z) for z in arc.sample(20))
    with pytest.raises(InvalidInput):
        Arc(0.0, 2 * math.pi)


def test_cross_ratio_of_fourth_roots():
    """Test CR(1, -1; i, -i) = -1."""
    assert cross_ratio(1, -1, 1j, -1j) == pytest.approx(-1.0)


def test_cross_ratio_needs_distinct_points():
    """Test that repeated points are degenerate."""
    with pytest.raises(DegenerateInput):
        cross_ratio(1, 1, 1j, -1j)


def test_cr_orderings():
    """Test that the orbit of the fourth roots is the harmonic one."""
    orbit = cr_orderings(roots_of_unity(4))
    assert len(orbit) == 24
    for value in orbit:
        assert min(abs(value - v) for v in (-1.0, 2.0, 0.5)) < 1e-12
    with pytest.raises(InvalidInput):
        cr_orderings(roots_of_unity(3))


def test_cr_equivalent():
    """Test cross-ratio equivalence of phase sets."""
    T = roots_of_unity(4)
    rotated = PhaseSet(tuple(cmath.exp(0.3j) * t for t in T))
    quarter = PhaseSet.from_angles([0, 30, 60, 90], degrees=True)
    assert cr_equivalent(T, rotated)
    assert not cr_equivalent(T, quarter)


def _spread_angles(rng, gap=0.05):
    while True:
        angles = np.sort(rng.uniform(0.0, 2 * math.pi, 4))
        if min(np.min(np.diff(angles)), 2 * math.pi - (angles[-1] - angles[0])) >= gap:
            return angles


def test_cross_ratio_of_circle_points_is_real():
    """Test that four points on the unit circle have a real cross ratio."""
    rng = np.random.default_rng(12)
    for _ in range(1000):
        points = [cmath.exp(1j * a) for a in _spread_angles(rng)]
        assert abs(cross_ratio(*points).imag) < 1e-10


def test_fourth_roots_differ_from_random_quadruples():
    """Test that random phase quadruples are not cross-ratio equivalent to the fourth roots."""
    rng = np.random.default_rng(13)
    T = roots_of_unity(4)
    for _ in range(20):
        other = PhaseSet.from_angles(_spread_angles(rng))
        assert not cr_equivalent(T, other)
        assert cr_equivalent(other, other)


@given(
    angles=st.lists(
        st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True),
        min_size=4,
        max_size=4,
        unique=True,
    ),
    b_re=st.floats(min_value=-2.0, max_value=2.0),
    b_im=st.floats(min_value=-2.0, max_value=2.0),
    turn=st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_cross_ratio_invariant_under_circle_maps(angles, b_re, b_im, turn):
    """Test that circle automorphisms preserve the cross ratio."""
    ordered = np.sort(angles)
    if np.min(np.diff(np.append(ordered, ordered[0] + 2 * math.pi))) < 1e-2:
        return
    points = [cmath.exp(1j * a) for a in angles]
    b = complex(b_re, b_im)
    M = u11_map(math.sqrt(1 + abs(b) ** 2) * cmath.exp(1j * turn), b)
    before = cross_ratio(*points)
    after = cross_ratio(*(M(z) for z in points))
    assert abs(after - before) <= 1e-8 * max(1.0, abs(before))
    R = rotation(turn)
    assert abs(cross_ratio(*(R(z) for z in points)) - before) <= 1e-8 * max(1.0, abs(before))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
