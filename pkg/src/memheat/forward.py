"""Forward solvers for theta_t = k * theta_xx on the semi-axis or an interval:
Laplace-domain boundary response, time-domain evaluation by contour inversion,
and an independent convolution-quadrature time stepper.

The time stepper offers two schemes. On characteristic-aligned grids
(dx = m * a * dt, m in {1, 2}) it uses a leapfrog composition that transports
the wavefront exactly (zero numerical dispersion, domain of dependence equal
to the true cone), with the memory term handled by trapezoidal convolution
quadrature on each sublattice. On general grids it falls back to implicit
Crank-Nicolson stepping with trapezoidal convolution quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0e, i1e

from . import defaults
from ._backend import get_backend
from .errors import (
    BranchViolation,
    CFLViolation,
    KernelZero,
    NearPole,
    UnstableStep,
)
from .kernels import ConstantKernel, DiracDeltaKernel, ExponentialKernel
from .laplace import TalbotSpec, TimeSignal, forward_laplace, inverse_laplace

__all__ = [
    "Geometry",
    "RampControl",
    "SampledControl",
    "FieldSolution",
    "ModalValue",
    "omega",
    "theta_hat_semiaxis",
    "response_semiaxis",
    "response_interval",
    "solve_time_domain",
    "extract_response",
    "modal_solution",
    "theta_time_semiaxis",
    "response_time_semiaxis",
    "closed_form_response",
    "aligned_solver_grid",
]


@dataclass(frozen=True)
class Geometry:
    """Spatial domain (0, L); L = inf for the semi-axis."""

    L: float = math.inf

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive (or inf)")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.L)


@dataclass(frozen=True)
class RampControl:
    """Boundary control f(t) = t^+, transform F(z) = 1/z^2 exactly."""

    kind = "ramp"
    supports_left_plane = True

    def time_values(self, t):
        return np.maximum(np.asarray(t, dtype=float), 0.0)

    def laplace(self, z):
        return np.asarray(z, dtype=complex) ** -2.0


@dataclass(frozen=True)
class SampledControl:
    """Sampled boundary control; must start at f(0) = 0."""

    signal: TimeSignal
    kind = "sampled"
    supports_left_plane = False

    def __post_init__(self):
        if abs(self.signal.values[0]) > 0:
            raise ValueError("controls must satisfy f(0) = 0")

    def time_values(self, t):
        return self.signal.interp(t)

    def laplace(self, z):
        value, _ = forward_laplace(self.signal, z)
        return value


@dataclass(frozen=True)
class FieldSolution:
    """theta(x, t) on a tensor grid; values[ix, it]."""

    x_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    scheme: str = ""
    kernel_form: str = ""

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])


def omega(kernel, z):
    """Principal symbol sqrt(z / K(z)) with Re omega > 0, for Re z > 0.

    Raises KernelZero where K vanishes and BranchViolation where the
    principal root lands off the right half-plane (inadmissible kernel)."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise ValueError("omega is defined for Re z > 0")
    K = np.asarray(kernel.laplace(z), dtype=complex)
    if np.any(np.abs(K) * (1.0 + np.abs(z)) < 1e-300):
        raise KernelZero("K(z) = 0 at a queried point")
    w = np.asarray(kernel.omega(z), dtype=complex)
    if np.any(w.real <= 0):
        raise BranchViolation("Re omega <= 0: kernel violates the admissibility assumptions")
    return complex(w) if w.ndim == 0 else w


def theta_hat_semiaxis(kernel, control, x: float, z):
    """Laplace-domain field F(z) e^{-omega(z) x} on the semi-axis."""
    if x < 0:
        raise ValueError("x must be >= 0")
    w = omega(kernel, z)
    F = control.laplace(z)
    return F * np.exp(-w * x)


def response_semiaxis(kernel, control, z):
    """Boundary-flux transform R(z) = -F(z) omega(z) on the semi-axis."""
    return -control.laplace(z) * omega(kernel, z)


def _coth(w):
    """coth on Re w > 0 without overflow."""
    q = np.exp(-2.0 * np.asarray(w, dtype=complex))
    return (1.0 + q) / (1.0 - q)


def response_interval(kernel, control, L: float, z,
                      pole_tol_factor: float = defaults.POLE_TOL_FACTOR):
    """R(z) = -omega F coth(omega L) on (0, L); converges to the semi-axis
    response as Re(omega L) grows. Raises NearPole on the resonance set."""
    if not (L > 0 and math.isfinite(L)):
        raise ValueError("finite L required")
    w = np.asarray(omega(kernel, z), dtype=complex)
    u = w * L
    x, y = u.real, u.imag
    # |sinh u|^2 = sinh^2 x + sin^2 y; for x > 20 it cannot be near zero
    small = x <= 20.0
    if np.any(small):
        mag = np.sqrt(np.sinh(x[small] if np.ndim(x) else x) ** 2
                      + np.sin(y[small] if np.ndim(y) else y) ** 2)
        tol = pole_tol_factor * np.exp(np.abs(x[small] if np.ndim(x) else x))
        if np.any(mag <= tol):
            raise NearPole("z lies on the excluded set: sinh(omega L) ~ 0")
    F = control.laplace(z)
    out = -w * F * _coth(u)
    return complex(out) if np.ndim(out) == 0 else out


def aligned_solver_grid(a: float, T: float, dt: float, courant: float = 0.5,
                        margin: float = 1.2):
    """Pick (nx, x_max) so dx = (a*dt)/courant exactly and x_max >= margin*a*T.

    courant = 0.5 gives the two-sublattice aligned scheme, 1.0 the
    single-lattice one."""
    if courant not in (0.5, 1.0):
        raise ValueError("courant must be 0.5 or 1.0")
    dx = a * dt / courant
    nx = int(math.ceil(margin * a * T / dx))
    return nx, nx * dx


def solve_time_domain(kernel, control, geometry: Geometry, nx: int, dt: float,
                      T: float, scheme: str = "auto", backend: str = "auto",
                      x_max: float | None = None) -> FieldSolution:
    """March theta_t = k * theta_xx with Dirichlet data f at x=0 and 0 at the
    far end (an exact truncation at x_max >= a*T for the semi-axis, by finite
    propagation speed).

    scheme: "auto" picks the characteristic-aligned leapfrog when
    dx = m*a*dt (m in {1,2}) and falls back to "trapezoid" (implicit CN with
    trapezoidal convolution quadrature) otherwise; both can be forced.
    """
    if nx < 16:
        raise ValueError("nx >= 16 required")
    nt = int(round(T / dt))
    if abs(nt * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError("T must be an integer number of steps")
    t = np.arange(nt + 1) * dt
    boundary = np.asarray(control.time_values(t), dtype=float)

    delta = isinstance(kernel, DiracDeltaKernel)
    if delta:
        if x_max is None:
            x_max = geometry.L if not geometry.is_infinite else 12.0 * math.sqrt(T)
    else:
        if not hasattr(kernel, "time_value"):
            raise ValueError("time-domain solver needs a kernel time evaluator")
        a2 = kernel.wave_speed_sq
        a = math.sqrt(a2) if a2 and a2 > 0 else 0.0
        if x_max is None:
            if geometry.is_infinite:
                if a <= 0:
                    raise ValueError("cannot truncate the semi-axis for a kernel "
                                     "with zero wave speed; pass x_max")
                x_max = 1.2 * a * T
            else:
                x_max = geometry.L
    dx = x_max / nx

    theta = np.zeros((nx + 1, nt + 1))
    theta[0, :] = boundary
    bk = get_backend(backend)

    if delta:
        bk.run_heat_cn(theta, boundary, dx, dt)
        used = "heat_cn"
    else:
        if a > 0 and a * dt > dx * (1 + 1e-12):
            raise CFLViolation(f"a*dt = {a*dt:.3e} exceeds dx = {dx:.3e}")
        m = dx / (a * dt) if a > 0 else 0.0
        aligned = a > 0 and abs(m - round(m)) < 1e-9 and round(m) in (1, 2)
        if scheme == "characteristic" and not aligned:
            raise ValueError("characteristic scheme needs dx = m*a*dt, m in {1,2}")
        if scheme == "auto":
            scheme = "characteristic" if aligned else "trapezoid"
        if scheme == "characteristic":
            mm = int(round(m))
            tau = mm * dt
            kp = np.asarray(kernel.time_derivative(
                np.arange(nt // mm + 2) * tau), dtype=float)
            for p in range(mm):
                idx = np.arange(p, nt + 1, mm, dtype=np.int64)
                bk.run_characteristic(theta, idx, kp, boundary, dx, tau)
            used = "characteristic"
        elif scheme == "trapezoid":
            k_lags = np.asarray(kernel.time_value(t), dtype=float)
            k0 = float(np.asarray(kernel.time_value(0.0)).reshape(-1)[0])
            trip = bk.run_cn_memory(theta, k_lags, boundary, dx, dt, k0,
                                    defaults.UNSTABLE_GROWTH)
            if trip >= 0:
                raise UnstableStep(f"field norm blew up at step {trip}")
            used = "trapezoid"
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        peak = float(np.max(np.abs(theta)))
        if not np.isfinite(peak) or peak > defaults.UNSTABLE_GROWTH * (
                np.max(np.abs(boundary)) + 1.0):
            raise UnstableStep("field norm beyond divergence threshold")

    return FieldSolution(x_grid=np.linspace(0.0, x_max, nx + 1), t_grid=t,
                         values=theta, scheme=used, kernel_form=kernel.form)


def extract_response(field: FieldSolution) -> TimeSignal:
    """One-sided second-order flux theta_x(0, t) from the field."""
    if field.values.shape[0] < 3:
        raise ValueError("need >= 3 spatial nodes")
    th = field.values
    r = (-3.0 * th[0] + 4.0 * th[1] - th[2]) / (2.0 * field.dx)
    return TimeSignal(dt=field.dt, values=r)


@dataclass(frozen=True)
class ModalValue:
    """One sine-mode sample theta_n(t) with pole metadata when available."""

    value: float
    poles: np.ndarray | None = None


def modal_solution(kernel, n: int, xi_n: float, t: float,
                   contour: TalbotSpec | None = None) -> ModalValue:
    """Mode amplitude for initial data xi_n sin(nx) on (0, pi):
    inverse transform of Theta_n(z) = xi_n / (z + n^2 K(z)).

    For the t^2/2 kernel the four poles z^4 = -n^2 are returned and the
    inversion contour is shifted right of max Re z = sqrt(n/2)."""
    if n < 1:
        raise ValueError("mode index n >= 1")
    if t < 0:
        raise ValueError("t >= 0")
    if not kernel.supports_left_plane:
        raise ValueError("modal inversion needs an analytic kernel form")
    poles = None
    shift = 0.0
    scale = defaults.TALBOT_SCALE
    if kernel.form == "poly_half_square":
        root = math.sqrt(n)
        angles = np.array([np.pi / 4, 3 * np.pi / 4, -3 * np.pi / 4, -np.pi / 4])
        poles = root * np.exp(1j * angles)
        shift = math.sqrt(n / 2.0) + 1.0
    elif kernel.form == "constant":
        # poles on the imaginary axis at |y| = n*sqrt(amplitude): the contour
        # must cross above them, which needs scale > 2|y|t/pi
        y0 = n * math.sqrt(kernel.amplitude)
        scale = max(scale, 0.8 * y0 * max(t, 1e-12))
    if t == 0.0:
        return ModalValue(value=float(xi_n), poles=poles)
    if contour is None:
        contour = TalbotSpec(scale=scale, shift=shift)

    def transform(z):
        return xi_n / (z + n * n * np.asarray(kernel.laplace(z), dtype=complex))

    return ModalValue(value=inverse_laplace(transform, t, contour), poles=poles)


def theta_time_semiaxis(kernel, control, x: float, t: float,
                        contour: TalbotSpec | None = None) -> float:
    """Time-domain field value at (x, t) on the semi-axis, by inverting the
    Laplace-domain solution.

    The known front delay x/a is peeled off exactly before the contour
    inversion (theta = 0 ahead of the front; behind it, the delay factor
    e^{-zx/a} is removed so the remaining transform decays on deformed
    contours). Needs an analytic kernel with a > 0 and a ramp control, or a
    delta kernel (no front)."""
    if x < 0 or t < 0:
        raise ValueError("x, t >= 0")
    if not kernel.supports_left_plane:
        raise ValueError("contour evaluation needs an analytic kernel form")
    if not control.supports_left_plane:
        raise ValueError("contour evaluation needs an analytic control transform")
    if contour is None:
        contour = TalbotSpec()
    if x == 0.0:
        return float(np.asarray(control.time_values(t)).reshape(-1))

    if isinstance(kernel, DiracDeltaKernel):
        if t <= 0:
            return 0.0
        return inverse_laplace(
            lambda z: control.laplace(z) * np.exp(-kernel.omega(z) * x), t, contour)

    a2 = kernel.wave_speed_sq
    if not a2 or a2 <= 0:
        raise ValueError("front peeling needs a = sqrt(k(0)) > 0")
    a = math.sqrt(a2)
    tp = t - x / a
    if tp <= 1e-12:
        return 0.0

    def peeled(z):
        return control.laplace(z) * np.exp(-(kernel.omega(z) - z / a) * x)

    return inverse_laplace(peeled, tp, contour)


def response_time_semiaxis(kernel, control, t: float,
                           contour: TalbotSpec | None = None) -> float:
    """Time-domain boundary flux r(t) by inverting R(z) = -F(z) omega(z)."""
    if t <= 0:
        raise ValueError("t > 0")
    if not (kernel.supports_left_plane and control.supports_left_plane):
        raise ValueError("contour evaluation needs analytic transforms")

    def transform(z):
        z = np.asarray(z, dtype=complex)
        return -control.laplace(z) * kernel.omega(z)

    return inverse_laplace(transform, t, contour or TalbotSpec())


def closed_form_response(kernel, t):
    """Exact ramp-control semi-axis response for the catalog kernels:

    constant(alpha^2):  r = -1/alpha
    exponential(b):     r(t) = -[i0e(bt/2) + bt (i0e + i1e)(bt/2)] (Bessel)
    dirac delta:        r(t) = -2 sqrt(t/pi)

    Used as an independent oracle for the time stepper and as a synthetic
    data generator.
    """
    t = np.asarray(t, dtype=float)
    if isinstance(kernel, ConstantKernel):
        return np.full_like(t, -1.0 / math.sqrt(kernel.amplitude))
    if isinstance(kernel, ExponentialKernel):
        u = kernel.decay * t
        return -(i0e(u / 2) + u * (i0e(u / 2) + i1e(u / 2)))
    if isinstance(kernel, DiracDeltaKernel):
        return -2.0 * np.sqrt(t / np.pi)
    raise ValueError(f"no closed-form response for kernel form {kernel.form!r}")
