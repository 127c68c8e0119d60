"""Sampled band-limited constructions on the real line.

Lattice witnesses x_j = zeta^j sin(2 pi xi t - j pi / n) Phi(t), where Phi is the
inverse Fourier transform of a smooth bump, vanish on alpha(nZ + j) and obey
x_j = (1 + omega) x_{j-1} - omega x_{j-2}. The arc counterexample pairs f and h
whose pointwise ratio sweeps an arc of the circle without being constant.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline

from .errors import InvalidInput
from .moebius import RealLineArcMap, arc_parameters, real_line_to_arc
from .phases import Arc, unit_root

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 2**14
ARC_GRID_POINTS = 4096


@dataclass(frozen=True)
class GridSpec:
    """points samples t_i = -half_width + i * dt, dt = 2 half_width / points."""
    points: int = DEFAULT_GRID_POINTS
    half_width: float = 16.0

    def __post_init__(self) -> None:
        if self.points < 4 or self.points % 2:
            raise InvalidInput(f"grid needs an even number of points >= 4, got {self.points}")
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise InvalidInput(f"grid half-width must be positive, got {self.half_width}")

    @classmethod
    def for_lattice(cls, n: int, alpha: float, points: int = DEFAULT_GRID_POINTS) -> "GridSpec":
        return cls(points=points, half_width=4.0 * n * alpha)

    @property
    def dt(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def t0(self) -> float:
        return -self.half_width

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.points)

    def frequencies(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) / (2.0 * self.half_width)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on the uniform grid t0 + i * dt."""
    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise InvalidInput(f"grid step must be positive, got {self.dt}")
        samples = np.asarray(self.samples, dtype=np.complex128).copy()
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidInput("grid function needs a non-empty 1-D sample array")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    @property
    def t_last(self) -> float:
        return self.t0 + self.dt * (len(self) - 1)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def same_grid(self, other: "GridFunction") -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.t0, other.t0, rel_tol=1e-12, abs_tol=1e-12)
            and math.isclose(self.dt, other.dt, rel_tol=1e-12)
        )

    def evaluate(self, points: Any) -> np.ndarray:
        """Cubic-spline values at off-grid points inside [t0, t_last]."""
        points = np.atleast_1d(np.asarray(points, dtype=np.float64))
        slack = 1e-9 * self.dt
        if points.size and (points.min() < self.t0 - slack or points.max() > self.t_last + slack):
            raise InvalidInput(
                f"points span [{points.min()}, {points.max()}], grid covers [{self.t0}, {self.t_last}]"
            )
        t = self.times()
        real = CubicSpline(t, self.samples.real)(points)
        imag = CubicSpline(t, self.samples.imag)(points)
        return real + 1j * imag


@dataclass(frozen=True)
class Lattice:
    """alpha Z, with sublattices alpha (nZ + j)."""
    alpha: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidInput(f"lattice step must be positive, got {self.alpha}")

    @property
    def density(self) -> float:
        return 1.0 / self.alpha

    def points(self, j: int, n: int, count: int) -> np.ndarray:
        """First count points of alpha (nZ + j), taking k = 0, -1, 1, -2, 2, ..."""
        ks = [(i + 1) // 2 * (1 if i % 2 == 0 else -1) for i in range(count)]
        return self.alpha * (n * np.asarray(ks, dtype=np.float64) + j)


@dataclass(frozen=True, eq=False)
class WitnessBundle:
    n: int
    xi: float
    omega: complex
    zeta: complex
    xs: List[GridFunction]
    lattice: Lattice
    outside_stated_hypothesis: bool = False
    warnings: List[str] = field(default_factory=list)


def _bump(s: np.ndarray, radius: float) -> np.ndarray:
    u2 = (s / radius) ** 2
    inside = u2 < 1.0
    safe = np.where(inside, 1.0 - u2, 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


def _inverse_transform(spectrum: np.ndarray, dt: float) -> np.ndarray:
    return sfft.fftshift(sfft.ifft(sfft.ifftshift(spectrum))) / dt


def _forward_transform(samples: np.ndarray, dt: float) -> np.ndarray:
    return sfft.fftshift(sfft.fft(sfft.ifftshift(samples))) * dt


def _bump_transform(radius: float, grid: GridSpec) -> GridFunction:
    samples = _inverse_transform(_bump(grid.frequencies(), radius), grid.dt)
    return GridFunction(grid.t0, grid.dt, samples)


def build_bump(xi: float, grid: Optional[GridSpec] = None) -> GridFunction:
    """Phi, the inverse transform of exp(-1/(1 - (s/r)^2)) on |s| < r = 1/2 - xi."""
    if not 0.0 < xi < 0.5:
        raise InvalidInput(f"xi must lie in (0, 1/2), got {xi}")
    return _bump_transform(0.5 - xi, grid or GridSpec())


def spectrum_leakage(phi: GridFunction, radius: float) -> float:
    """Largest transform coefficient outside [-radius, radius], relative to the largest overall."""
    spectrum = np.abs(_forward_transform(phi.samples, phi.dt))
    freqs = (np.arange(len(phi)) - len(phi) // 2) / (len(phi) * phi.dt)
    outside = np.abs(freqs) > radius
    peak = float(spectrum.max())
    if peak == 0.0 or not outside.any():
        return 0.0
    return float(spectrum[outside].max()) / peak


def build_lattice_witnesses(
    n: int, alpha: float, grid: Optional[GridSpec] = None
) -> WitnessBundle:
    """Sample x_0..x_{n+1} for the lattice alpha Z and n-th roots of unity."""
    if n < 2:
        raise InvalidInput(f"n must be at least 2, got {n}")
    if not alpha > 0:
        raise InvalidInput(f"alpha must be positive, got {alpha}")
    xi = 1.0 / (2.0 * n * alpha)
    if not 0.0 < xi < 0.5:
        raise InvalidInput(f"xi = 1/(2 n alpha) = {xi} is outside (0, 1/2); need alpha > 1/n")
    grid = grid or GridSpec.for_lattice(n, alpha)
    warnings: List[str] = []
    outside = alpha <= n
    if outside:
        message = f"alpha = {alpha} lies in (1/n, n]; the construction runs but alpha > n is not met"
        logger.warning(message)
        warnings.append(message)

    phi = build_bump(xi, grid).samples
    t = grid.times()
    xs = []
    for j in range(n + 2):
        s_j = np.sin(2.0 * math.pi * xi * t - j * math.pi / n)
        xs.append(GridFunction(grid.t0, grid.dt, unit_root(j, 2 * n) * s_j * phi))
    logger.debug(f"built {len(xs)} lattice witnesses for n={n}, alpha={alpha}")
    return WitnessBundle(
        n=n,
        xi=xi,
        omega=unit_root(1, n),
        zeta=unit_root(1, 2 * n),
        xs=xs,
        lattice=Lattice(alpha),
        outside_stated_hypothesis=outside,
        warnings=warnings,
    )


def _largest_sup(w: WitnessBundle) -> float:
    return max(x.sup_norm() for x in w.xs)


def verify_recurrence(w: WitnessBundle) -> float:
    """max_j sup |x_j - (1 + omega) x_{j-1} + omega x_{j-2}|, relative to the largest sup |x_j|."""
    if len(w.xs) < 3:
        raise InvalidInput("the recurrence needs at least three functions")
    scale = _largest_sup(w)
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for j in range(2, len(w.xs)):
        r = w.xs[j].samples - (1 + w.omega) * w.xs[j - 1].samples + w.omega * w.xs[j - 2].samples
        worst = max(worst, float(np.max(np.abs(r))))
    return worst / scale


def verify_vanishing(w: WitnessBundle, count: int, lattice: Optional[Lattice] = None) -> float:
    """max over j < n and the first count points of alpha (nZ + j) of |x_j| / sup |x_j|."""
    if count < 0:
        raise InvalidInput(f"count must be non-negative, got {count}")
    lattice = lattice or w.lattice
    worst = 0.0
    for j in range(w.n):
        points = lattice.points(j, w.n, count)
        if points.size == 0:
            continue
        x = w.xs[j]
        values = np.abs(x.evaluate(points))
        worst = max(worst, float(values.max()) / x.sup_norm())
    return worst


def independence_measure(w: WitnessBundle) -> float:
    """Gram determinant of x_1, x_2 over the product of their squared norms."""
    x1, x2 = w.xs[1].samples, w.xs[2].samples
    n1, n2 = float(np.vdot(x1, x1).real), float(np.vdot(x2, x2).real)
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    return 1.0 - abs(np.vdot(x1, x2)) ** 2 / (n1 * n2)


def residual_report(w: WitnessBundle, count: int = 8) -> Dict[str, Any]:
    return {
        "n": w.n,
        "alpha": w.lattice.alpha,
        "xi": w.xi,
        "grid_points": len(w.xs[0]),
        "grid_step": w.xs[0].dt,
        "recurrence_residual": verify_recurrence(w),
        "vanishing_residual": verify_vanishing(w, count),
        "vanishing_points": count,
        "independence": independence_measure(w),
        "outside_stated_hypothesis": w.outside_stated_hypothesis,
        "warnings": list(w.warnings),
    }


def write_csv(functions: Sequence[GridFunction], stream: Any, prefix: str = "x") -> None:
    """Columns t, re_x0, im_x0, re_x1, ... for functions sharing one grid."""
    if not functions:
        raise InvalidInput("nothing to export")
    first = functions[0]
    if any(not first.same_grid(g) for g in functions[1:]):
        raise InvalidInput("exported functions must share one grid")
    writer = csv.writer(stream)
    header = ["t"]
    for j in range(len(functions)):
        header += [f"re_{prefix}{j}", f"im_{prefix}{j}"]
    writer.writerow(header)
    columns = [g.samples for g in functions]
    for i, t in enumerate(first.times()):
        row = [repr(float(t))]
        for samples in columns:
            row += [repr(float(samples[i].real)), repr(float(samples[i].imag))]
        writer.writerow(row)


def bundle_to_csv(w: WitnessBundle) -> str:
    buffer = io.StringIO()
    write_csv(w.xs, buffer)
    return buffer.getvalue()


@dataclass(frozen=True, eq=False)
class ConvolutionReport:
    n: int
    p: GridFunction
    support: Tuple[float, float]
    outside_mass: float
    transform_residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "support": list(self.support),
            "samples": len(self.p),
            "outside_mass": self.outside_mass,
            "transform_residual": self.transform_residual,
        }


def convolution_support_demo(f: GridFunction, h: GridFunction, n: int) -> ConvolutionReport:
    """p = p_0 * ... * p_{n-1} with p_j = f - omega^j h, for f and h supported in [0, 1].

    Checks that p lives on [0, n] and that its transform is the product of the
    transforms of the p_j.
    """
    if n < 1:
        raise InvalidInput(f"n must be at least 1, got {n}")
    if not f.same_grid(h):
        raise InvalidInput("f and h must be sampled on the same grid")
    slack = 1e-9 * f.dt
    if f.t0 < -slack or f.t_last > 1.0 + slack:
        raise InvalidInput(f"grid [{f.t0}, {f.t_last}] is not inside [0, 1]")

    factors = [f.samples - unit_root(j, n) * h.samples for j in range(n)]
    p = factors[0]
    for factor in factors[1:]:
        p = np.convolve(p, factor) * f.dt
    result = GridFunction(n * f.t0, f.dt, p)

    times = result.times()
    outside = (times < -slack) | (times > n + slack)
    total = float(np.sum(np.abs(p)))
    outside_mass = float(np.sum(np.abs(p[outside]))) / total if total > 0 else 0.0

    size = len(result)
    lhs = sfft.fft(p, size)
    rhs = np.ones(size, dtype=np.complex128)
    for factor in factors:
        rhs = rhs * sfft.fft(factor, size)
    rhs = rhs * f.dt ** (n - 1)
    scale = float(np.linalg.norm(rhs))
    error = float(np.linalg.norm(lhs - rhs))
    residual = error / scale if scale > 0 else error
    return ConvolutionReport(
        n=n,
        p=result,
        support=(result.t0, result.t_last),
        outside_mass=outside_mass,
        transform_residual=residual,
    )


def build_arc_counterexample(
    v1: float, v2: float, beta: float, grid: Optional[GridSpec] = None
) -> Tuple[GridFunction, GridFunction, float]:
    """f = (t + i v1)(t - i v2) S and h = e^{-i beta}(t - i v1)(t + i v2) S, with f = m h.

    S is the inverse transform of a bump on [-1/2, 1/2] and m maps the real
    line onto the arc [beta - L, beta + L].
    """
    m, half_width = real_line_to_arc(v1, v2, beta)
    grid = grid or GridSpec(points=ARC_GRID_POINTS, half_width=max(8.0, 4.0 * m.peak))
    S = _bump_transform(0.5, grid).samples
    t = grid.times()
    f = (t + 1j * v1) * (t - 1j * v2) * S
    h = np.exp(-1j * beta) * (t - 1j * v1) * (t + 1j * v2) * S
    return GridFunction(grid.t0, grid.dt, f), GridFunction(grid.t0, grid.dt, h), half_width


def arc_counterexample_for(
    arc: Arc, grid: Optional[GridSpec] = None
) -> Tuple[GridFunction, GridFunction, float]:
    """The counterexample whose ratio sweeps the given arc."""
    v1, v2 = arc_parameters(arc.length / 2.0)
    return build_arc_counterexample(v1, v2, arc.center, grid)


def arc_identity_residual(f: GridFunction, h: GridFunction, m: RealLineArcMap) -> float:
    """max_t |f(t) - m(t) h(t)| / (|f(t)| + |h(t)| + tiny)."""
    t = f.times()
    gap = np.abs(f.samples - m(t) * h.samples)
    return float(np.max(gap / (np.abs(f.samples) + np.abs(h.samples) + 1e-300)))


def ratio_phase_offsets(
    f: GridFunction, h: GridFunction, beta: float, threshold: float = 1e-8
) -> np.ndarray:
    """arg(f/h) - beta, wrapped to (-pi, pi], where |h| exceeds threshold * sup |h|."""
    keep = np.abs(h.samples) > threshold * h.sup_norm()
    ratio = f.samples[keep] * np.conj(h.samples[keep]) * np.exp(-1j * beta)
    return np.angle(ratio)
