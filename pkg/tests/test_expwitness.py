"""Tests for the band-limited lattice witnesses and the arc counterexample."""

import dataclasses
import io
import math

import numpy as np
import pytest

from src.errors import InvalidInput
from src.expwitness import (
    GridFunction,
    GridSpec,
    Lattice,
    arc_counterexample_for,
    arc_identity_residual,
    build_arc_counterexample,
    build_bump,
    build_lattice_witnesses,
    bundle_to_csv,
    convolution_support_demo,
    independence_measure,
    ratio_phase_offsets,
    residual_report,
    spectrum_leakage,
    verify_recurrence,
    verify_vanishing,
    write_csv,
)
from src.moebius import real_line_to_arc
from src.phases import Arc, unit_root

CASES = [(n, alpha) for n in (2, 3, 4) for alpha in (n + 0.5, n + 1.0, 2.0 * n)]


def test_grid_spec():
    """Test grid geometry and validation."""
    grid = GridSpec(points=8, half_width=2.0)
    assert grid.dt == 0.5
    assert grid.times()[0] == -2.0
    assert grid.times()[4] == 0.0
    assert grid.frequencies()[4] == 0.0
    with pytest.raises(InvalidInput):
        GridSpec(points=7)
    with pytest.raises(InvalidInput):
        GridSpec(half_width=0.0)


def test_bump_transform_is_real_and_even():
    """Test that the bump transform is real and even."""
    phi = build_bump(0.25, GridSpec(points=4096, half_width=64.0))
    samples = phi.samples
    peak = phi.sup_norm()
    half = len(phi) // 2
    assert np.abs(samples.imag).max() <= 1e-12 * peak
    assert np.abs(samples[half + 1 :] - samples[half - 1 : 0 : -1]).max() <= 1e-12 * peak
    assert abs(samples[half]) > 0.1 * peak
    assert spectrum_leakage(phi, 0.25) < 1e-10


def test_bump_needs_valid_xi():
    """Test the xi range."""
    for xi in (0.0, 0.5, -0.1):
        with pytest.raises(InvalidInput):
            build_bump(xi)


def test_lattice_points_order():
    """Test the order in which lattice points are enumerated."""
    points = Lattice(2.0).points(1, 3, 5)
    assert list(points) == [2.0, -4.0, 8.0, -10.0, 14.0]
    assert Lattice(4.0).density == 0.25
    with pytest.raises(InvalidInput):
        Lattice(0.0)


def test_roots_relation():
    """Test zeta^2 = omega and 2 cos(pi/n) zeta = 1 + omega."""
    for n in range(2, 13):
        zeta, omega = unit_root(1, 2 * n), unit_root(1, n)
        assert abs(zeta**2 - omega) < 1e-12
        assert abs(2 * math.cos(math.pi / n) * zeta - (1 + omega)) < 1e-12


def test_n2_specialization():
    """Test that n = 2 gives omega = -1, zeta = i and x_{j+2} = x_j."""
    w = build_lattice_witnesses(2, 3.0)
    assert w.omega == -1
    assert w.zeta == 1j
    assert len(w.xs) == 4
    scale = max(x.sup_norm() for x in w.xs)
    for j in range(2, 4):
        assert np.abs(w.xs[j].samples - w.xs[j - 2].samples).max() <= 1e-12 * scale
    direct = max(np.abs(w.xs[j].samples - w.xs[j - 2].samples).max() for j in (2, 3)) / scale
    assert verify_recurrence(w) == pytest.approx(direct, abs=1e-15)


@pytest.mark.parametrize("n,alpha", CASES)
def test_recurrence_and_vanishing(n, alpha):
    """Test the recurrence, lattice vanishing and independence."""
    w = build_lattice_witnesses(n, alpha)
    assert not w.outside_stated_hypothesis
    assert verify_recurrence(w) < 1e-10
    assert verify_vanishing(w, 8) < 1e-8
    assert verify_vanishing(w, 0) == 0.0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_independence(n):
    """Test that x_1 and x_2 are far from parallel."""
    assert independence_measure(build_lattice_witnesses(n, 2.0 * n)) > 1e-4


def test_perturbed_lattice_does_not_vanish():
    """Test that vanishing is specific to the lattice."""
    w = build_lattice_witnesses(2, 3.0)
    exact = verify_vanishing(w, 4)
    perturbed = verify_vanishing(w, 4, Lattice(3.03))
    assert perturbed > 1e-6
    assert perturbed > 100 * exact


def test_broken_recurrence_is_detected():
    """Test that doubling x_2 breaks the recurrence."""
    w = build_lattice_witnesses(3, 4.0)
    xs = list(w.xs)
    xs[2] = GridFunction(xs[2].t0, xs[2].dt, 2 * xs[2].samples)
    assert verify_recurrence(dataclasses.replace(w, xs=xs)) > 0.1


def test_alpha_range():
    """Test flagged and rejected lattice spacings."""
    w = build_lattice_witnesses(3, 1.0)
    assert w.outside_stated_hypothesis
    assert w.warnings
    with pytest.raises(InvalidInput):
        build_lattice_witnesses(3, 0.2)
    with pytest.raises(InvalidInput):
        build_lattice_witnesses(1, 5.0)


def test_points_outside_the_grid():
    """Test that evaluation outside the grid is refused."""
    w = build_lattice_witnesses(2, 3.0, GridSpec(points=1024, half_width=5.0))
    with pytest.raises(InvalidInput):
        verify_vanishing(w, 8)


def test_residual_report_and_csv():
    """Test the report fields and the CSV layout."""
    w = build_lattice_witnesses(2, 3.0, GridSpec.for_lattice(2, 3.0, points=256))
    report = residual_report(w, count=4)
    assert report["grid_points"] == 256
    assert report["n"] == 2
    assert not report["outside_stated_hypothesis"]
    lines = bundle_to_csv(w).strip().splitlines()
    assert lines[0] == "t,re_x0,im_x0,re_x1,im_x1,re_x2,im_x2,re_x3,im_x3"
    assert len(lines) == 257
    other = GridFunction(0.0, 1.0, np.ones(256))
    with pytest.raises(InvalidInput):
        write_csv([w.xs[0], other], io.StringIO())


def _unit_interval_pair():
    rng = np.random.default_rng(3)
    dt = 1.0 / 64
    f = GridFunction(0.0, dt, rng.standard_normal(65) + 1j * rng.standard_normal(65))
    h = GridFunction(0.0, dt, rng.standard_normal(65) + 1j * rng.standard_normal(65))
    return f, h


def test_convolution_support():
    """Test that the product convolution lives on [0, n] with matching transform."""
    f, h = _unit_interval_pair()
    report = convolution_support_demo(f, h, 3)
    assert report.outside_mass == 0.0
    assert report.support[0] == pytest.approx(0.0)
    assert report.support[1] <= 3.0 + 1e-12
    assert report.transform_residual < 1e-8
    single = convolution_support_demo(f, h, 1)
    assert np.allclose(single.p.samples, f.samples - h.samples)
    assert report.to_dict()["n"] == 3


def test_convolution_of_equal_functions_vanishes():
    """Test that f = h makes the first factor, and so p, vanish."""
    f, _ = _unit_interval_pair()
    report = convolution_support_demo(f, f, 4)
    assert not np.any(report.p.samples)
    assert report.transform_residual == 0.0


def test_convolution_validation():
    """Test grid checks for the convolution demo."""
    f, h = _unit_interval_pair()
    with pytest.raises(InvalidInput):
        convolution_support_demo(f, h, 0)
    with pytest.raises(InvalidInput):
        convolution_support_demo(f, GridFunction(0.0, 1.0 / 32, h.samples[:33]), 2)
    wide = GridFunction(-0.5, 1.0 / 64, f.samples)
    with pytest.raises(InvalidInput):
        convolution_support_demo(wide, wide, 2)


def test_arc_counterexample():
    """Test that f = m h and that the ratio sweeps the arc."""
    f, h, L = build_arc_counterexample(4.0, 1.0, 0.7)
    m, half_width = real_line_to_arc(4.0, 1.0, 0.7)
    assert L == pytest.approx(half_width)
    assert arc_identity_residual(f, h, m) < 1e-10
    offsets = ratio_phase_offsets(f, h, 0.7)
    assert np.abs(offsets).max() <= L + 1e-6
    assert offsets.max() - offsets.min() > L / 2
    with pytest.raises(InvalidInput):
        build_arc_counterexample(1.0, 4.0, 0.0)


def test_arc_counterexample_at_origin():
    """Test that f(0) = h(0) when beta = 0."""
    f, h, _ = build_arc_counterexample(4.0, 1.0, 0.0)
    middle = len(f) // 2
    assert f.times()[middle] == pytest.approx(0.0)
    assert f.samples[middle] / h.samples[middle] == pytest.approx(1.0)


def test_arc_counterexample_for_arc():
    """Test the counterexample built for a given arc."""
    arc = Arc(1.0, 2.0)
    f, h, L = arc_counterexample_for(arc)
    assert L == pytest.approx(1.0)
    offsets = ratio_phase_offsets(f, h, arc.center)
    assert np.abs(offsets).max() <= 1.0 + 1e-6


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
