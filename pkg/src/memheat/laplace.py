"""Numerical Laplace analysis: sampled-signal transforms, contour inversion,
and finite-time truncation projections.

Conventions: transforms are F(z) = int_0^inf e^{-zt} f(t) dt evaluated in
Re z > 0; inversion contours assume conjugate-symmetric transforms of real
signals (checked, not trusted).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from . import defaults
from .errors import (
    EmptySignal,
    NonconvergentSum,
    NonpositiveRealPart,
    SlowDecay,
    SymmetryViolation,
    TruncationBeyondHorizon,
)

__all__ = [
    "TimeSignal",
    "FrequencyGrid",
    "TalbotSpec",
    "BromwichFFTSpec",
    "AxisQuadratureSpec",
    "forward_laplace",
    "inverse_laplace",
    "project_RT_timedomain",
    "project_RT_contour",
    "fourier_integral_linear",
    "invert_line_fft",
]


@dataclass(frozen=True)
class TimeSignal:
    """Uniformly sampled real function on [0, T], T = dt*(len-1)."""

    dt: float
    values: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if vals.ndim != 1 or vals.size < 2:
            raise EmptySignal(f"need >= 2 samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal contains non-finite samples")
        if self.t0 != 0.0:
            raise ValueError("signals start at t0 = 0")

    @property
    def horizon(self) -> float:
        return self.dt * (len(self.values) - 1)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.values))

    def interp(self, t):
        return np.interp(t, self.times, self.values)

    def restrict(self, T: float) -> "TimeSignal":
        """Samples on [0, T]; T must not exceed the horizon."""
        if T > self.horizon * (1 + 1e-12) + 1e-300:
            raise TruncationBeyondHorizon(
                f"T = {T} exceeds horizon {self.horizon}")
        n = int(math.floor(T / self.dt + 1e-9))
        n = min(n, len(self.values) - 1)
        return TimeSignal(self.dt, self.values[: n + 1])


@dataclass(frozen=True)
class FrequencyGrid:
    """Finite set of sample points in the open right half-plane."""

    points: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "points", pts)
        if pts.size == 0:
            raise ValueError("frequency grid is empty")
        if np.min(pts.real) <= 0:
            raise ValueError("all grid points need Re z > 0")
        if self.symmetric:
            conj_set = set(np.round(pts.conj(), 12).tolist())
            pts_set = set(np.round(pts, 12).tolist())
            if conj_set != pts_set:
                raise ValueError("grid marked symmetric but not closed under conjugation")

    @property
    def z_min(self) -> float:
        return float(np.min(self.points.real))

    @classmethod
    def geometric_real(cls, z_min: float, z_max: float, n: int) -> "FrequencyGrid":
        return cls(np.geomspace(z_min, z_max, n) + 0j, symmetric=True)

    @classmethod
    def with_conjugates(cls, points) -> "FrequencyGrid":
        pts = np.asarray(points, dtype=complex)
        closed = np.concatenate([pts, pts[np.abs(pts.imag) > 0].conj()])
        return cls(closed, symmetric=True)


@dataclass(frozen=True)
class TalbotSpec:
    """Cotangent contour s = shift + (scale/t)*theta*(cot theta + i),
    midpoint rule, node doubling until agreement."""

    n_nodes: int = defaults.TALBOT_NODES
    scale: float = defaults.TALBOT_SCALE
    shift: float = 0.0
    agreement_tol: float = defaults.TALBOT_AGREEMENT
    max_doublings: int = defaults.TALBOT_MAX_DOUBLINGS

    def __post_init__(self):
        if self.n_nodes < 8 or self.n_nodes % 2:
            raise ValueError("Talbot needs an even node count >= 8")
        if self.scale <= 0:
            raise ValueError("Talbot scale must be positive")


@dataclass(frozen=True)
class BromwichFFTSpec:
    """Vertical-line contour Re z = abscissa, trapezoid over |y| <= omega_max.

    The abscissa must lie strictly right of every singularity of the
    transform being inverted (caller-asserted).
    """

    abscissa: float = 1.0
    omega_max: float = 2e3
    n_nodes: int = 200_000

    def __post_init__(self):
        if self.abscissa <= 0:
            raise ValueError("abscissa must be positive")
        if self.omega_max <= 0 or self.n_nodes < 16:
            raise ValueError("bad BromwichFFT window")


@dataclass(frozen=True)
class AxisQuadratureSpec:
    """Composite Gauss-Legendre quadrature along the line Re p = eps."""

    eps: float = defaults.AXIS_EPS
    y_max: float = defaults.AXIS_YMAX
    gauss_order: int = defaults.AXIS_GAUSS_ORDER
    panels_per_osc: int = defaults.AXIS_PANELS_PER_OSC


def forward_laplace(signal: TimeSignal, z):
    """Transform of a sampled signal by composite trapezoid.

    Returns (value, truncation_bound): the bound covers the discarded tail
    assuming |signal(t)| <= C (1 + t) beyond the horizon, with C estimated
    from the last samples.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise NonpositiveRealPart("forward_laplace needs Re z > 0")
    t = signal.times
    v = signal.values
    zz = z[..., None]
    integrand = v * np.exp(-zz * t)
    value = np.trapezoid(integrand, dx=signal.dt, axis=-1)
    T = signal.horizon
    m = max(2, len(v) // 10)
    C = float(np.max(np.abs(v[-m:]))) / (1.0 + T)
    sig = z.real
    bound = C * np.exp(-sig * T) * ((1.0 + T) / sig + 1.0 / sig**2)
    if value.ndim == 0:
        return complex(value), float(bound)
    return value, bound


def _talbot_sum(transform, t: float, n: int, scale: float, shift: float):
    """Two-sided midpoint Talbot sum; returns the full complex value so the
    caller can test the imaginary residual."""
    r = scale / t
    theta = (np.arange(n // 2) + 0.5) * (2.0 * np.pi / n)
    cot = np.cos(theta) / np.sin(theta)
    s = shift + r * theta * (cot + 1j)
    ds = r * (cot - theta / np.sin(theta) ** 2 + 1j)
    with np.errstate(over="ignore", invalid="ignore"):
        up = np.exp(s * t) * np.asarray(transform(s), dtype=complex) * ds
        dn = -np.exp(s.conj() * t) * np.asarray(transform(s.conj()), dtype=complex) * ds.conj()
    total = (np.sum(up) + np.sum(dn)) * (2.0 * np.pi / n) / (2j * np.pi)
    if not np.isfinite(total):
        raise NonconvergentSum(
            f"Talbot terms not decaying at t={t} (n={n}); transform grows on the contour")
    return total


def _bromwich_sum(transform, t: float, spec: BromwichFFTSpec):
    y = np.linspace(0.0, spec.omega_max, spec.n_nodes)
    w = np.ones_like(y)
    w[0] = w[-1] = 0.5
    p = spec.abscissa + 1j * y
    up = np.exp(p * t) * np.asarray(transform(p), dtype=complex)
    dn = np.exp(p.conj() * t) * np.asarray(transform(p.conj()), dtype=complex)
    dy = y[1] - y[0]
    return (np.sum(w * up) + np.sum(w * dn)) * dy / (2.0 * np.pi)


def inverse_laplace(transform, t: float, contour=None) -> float:
    """Bromwich-integral value at t > 0 for a conjugate-symmetric transform.

    The imaginary residual (which must vanish by symmetry) is checked against
    SYMMETRY_TOL; Talbot contours double their node count until two successive
    values agree to `agreement_tol`.
    """
    if t <= 0:
        raise ValueError("inverse_laplace needs t > 0")
    if contour is None:
        contour = TalbotSpec()
    if isinstance(contour, BromwichFFTSpec):
        val = _bromwich_sum(transform, t, contour)
        _check_symmetry(val, t)
        return float(val.real)
    spec: TalbotSpec = contour
    n = spec.n_nodes
    prev = _talbot_sum(transform, t, n, spec.scale, spec.shift)
    floor = 64 * n * np.finfo(float).eps * math.exp(min(spec.scale + spec.shift * t, 700.0))
    for _ in range(spec.max_doublings):
        n *= 2
        cur = _talbot_sum(transform, t, n, spec.scale, spec.shift)
        if abs(cur - prev) <= spec.agreement_tol * (1.0 + abs(cur)) + floor:
            _check_symmetry(cur, t)
            return float(cur.real)
        prev = cur
    raise NonconvergentSum(
        f"Talbot did not reach {spec.agreement_tol} agreement by n={n} at t={t}")


def _check_symmetry(value: complex, t: float):
    if abs(value.imag) > defaults.SYMMETRY_TOL * (1.0 + abs(value.real)):
        raise SymmetryViolation(
            f"imaginary residual {value.imag:.3e} at t={t}: transform is not "
            "conjugate-symmetric (branch or contour bug)")


def project_RT_timedomain(r: TimeSignal, T: float, z):
    """Transform of the truncated signal chi_[0,T] * r at z (tail bound zero)."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise NonpositiveRealPart("projection needs Re z > 0")
    if T > r.horizon * (1 + 1e-12) + 1e-300:
        raise TruncationBeyondHorizon(f"T = {T} exceeds horizon {r.horizon}")
    t = r.times
    n = int(math.floor(T / r.dt + 1e-9))
    n = min(n, len(t) - 1)
    ts = t[: n + 1]
    vs = r.values[: n + 1]
    if T > ts[-1] + 1e-12 * r.dt:
        ts = np.append(ts, T)
        vs = np.append(vs, r.interp(T))
    zz = z[..., None]
    value = np.trapezoid(vs * np.exp(-zz * ts), x=ts, axis=-1)
    return complex(value) if value.ndim == 0 else value


def project_RT_contour(R_on_axis, T: float, z: complex,
                       quad: AxisQuadratureSpec | None = None) -> complex:
    """Projection onto the first T seconds, computed from the full transform:

        R^T(z) = (1/2pi) int (e^{T(p-z)} - 1)/(p - z) R(p) dy,  p = eps + i y,

    integrated just right of the imaginary axis (eps regularises the branch
    point at 0). Composite Gauss-Legendre panels resolve the e^{iyT}
    oscillation; the cutoff assumes |R| = O(1/|y|)."""
    if quad is None:
        quad = AxisQuadratureSpec()
    z = complex(z)
    if z.real <= quad.eps:
        raise NonpositiveRealPart("need Re z > eps for the projection line")
    # decay check at the cutoff: integrand must be O(1/y^2)
    r_half = abs(complex(np.asarray(R_on_axis(quad.eps + 0.5j * quad.y_max)).reshape(-1)[0]))
    r_full = abs(complex(np.asarray(R_on_axis(quad.eps + 1j * quad.y_max)).reshape(-1)[0]))
    if r_full > 0 and r_half > 0:
        decay = math.log(r_half / r_full) / math.log(2.0)
        if decay < 0.8:
            raise SlowDecay(
                f"|R| decays like y^-{decay:.2f} at the cutoff; tail not O(1/y^2)")
    period = 2.0 * np.pi / max(T, 1e-6)
    h = min(1.0, period / quad.panels_per_osc)
    n_panels = int(np.ceil(2.0 * quad.y_max / h))
    edges = np.linspace(-quad.y_max, quad.y_max, n_panels + 1)
    xg, wg = roots_legendre(quad.gauss_order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    y = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    p = quad.eps + 1j * y
    Rv = np.asarray(R_on_axis(p), dtype=complex)
    kernel = np.expm1(T * (p - z)) / (p - z)
    return complex(np.sum(w * kernel * Rv) / (2.0 * np.pi))


# --- FFT helpers for line transforms (used by the data-driven inverse path) ---

def fourier_integral_linear(g: np.ndarray, dt: float, ny: int):
    """int_0^T g(t) e^{-iyt} dt for the piecewise-linear interpolant of g,
    evaluated at y_j = j * dy, dy = 2 pi / (nfft * dt), j < ny.

    Exact for the interpolant at every frequency, so the error is the
    interpolation error O(dt^2 g'') uniformly in y. Returns (y, values).
    """
    n = len(g)
    if n < 2:
        raise EmptySignal("need >= 2 samples")
    nfft = int(2 ** math.ceil(math.log2(max(2 * n, 16))))
    dy = 2.0 * np.pi / (nfft * dt)
    if ny > nfft // 2 + 1:
        raise ValueError("requested frequencies beyond Nyquist; sample finer")
    y = np.arange(ny) * dy
    F = np.fft.rfft(g, nfft)[:ny]
    phi = y * dt
    small = np.abs(phi) < 1e-3
    ph = np.where(small, 1.0, phi)
    em = np.exp(-1j * ph)
    S0 = np.where(small, 1 - 1j * phi / 2 - phi**2 / 6 + 1j * phi**3 / 24,
                  (1 - em) / (1j * ph))
    S1 = np.where(small, 0.5 - 1j * phi / 3 - phi**2 / 8 + 1j * phi**3 / 30,
                  (S0 - em) / (1j * ph))
    A = S0 - S1
    B = S1
    W = A + B * np.exp(1j * phi)
    T = (n - 1) * dt
    val = dt * (W * F - A * g[-1] * np.exp(-1j * y * T) - B * np.exp(1j * phi) * g[0])
    return y, val


def invert_line_fft(G: np.ndarray, dy: float, sigma: float, min_pow: int = 2):
    """(e^{sigma t}/pi) Re int_0^Omega e^{iyt} G(y) dy by trapezoid + irfft.

    G sampled on y_j = j*dy; returns (t_grid, values) on the FFT's natural
    uniform grid covering [0, 2 pi / dy)."""
    ny = len(G)
    n_inv = int(2 ** math.ceil(math.log2(max(min_pow * ny, 16))))
    dt_out = 2.0 * np.pi / (n_inv * dy)
    buf = np.zeros(n_inv // 2 + 1, dtype=complex)
    buf[:ny] = G
    g0 = G[0].real
    buf[0] = 0.5 * g0
    buf[ny - 1] *= 0.5
    s = np.fft.irfft(buf, n_inv) * n_inv
    tm = np.arange(n_inv) * dt_out
    vals = (dy / np.pi) * 0.5 * (s + 0.5 * g0) * np.exp(sigma * tm)
    return tm, vals
