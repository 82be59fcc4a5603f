"""Memory-kernel catalog with exact/numeric Laplace transforms and
admissibility validation.

Every kernel k(t) carries a Laplace evaluator K(z) for Re z > 0. The analytic
catalog forms additionally provide K and omega(z) = sqrt(z / K(z)) as genuine
analytic continuations off the right half-plane (cuts confined to the negative
real axis), which deformed inversion contours rely on; quadrature-backed
kernels do not (``supports_left_plane`` is False).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .errors import NonpositiveRealPart, QuadratureDivergence
from .laplace import FrequencyGrid, TimeSignal

__all__ = [
    "ConstantKernel",
    "ExponentialKernel",
    "PolynomialHalfSquareKernel",
    "DiracDeltaKernel",
    "SampledKernel",
    "SumKernel",
    "K0Report",
    "laplace_of_kernel",
    "validate_K0",
    "validate_no_zeros",
    "default_k0_probes",
]


@dataclass(frozen=True)
class ConstantKernel:
    """k(t) = amplitude; turns the evolution into an integrated wave."""

    amplitude: float = 1.0
    form = "constant"
    supports_left_plane = True

    def __post_init__(self):
        if self.amplitude == 0:
            raise ValueError("zero kernel")

    @property
    def wave_speed_sq(self):
        return self.amplitude

    def time_value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.amplitude)

    def time_derivative(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def laplace(self, z):
        return self.amplitude / np.asarray(z, dtype=complex)

    def omega(self, z):
        # z / sqrt(amplitude): entire, no spurious cut from sqrt(z^2)
        return np.asarray(z, dtype=complex) / math.sqrt(self.amplitude)

    def params(self):
        return {"amplitude": self.amplitude}


@dataclass(frozen=True)
class ExponentialKernel:
    """k(t) = e^{-decay t}; the damped-wave kernel."""

    decay: float = 1.0
    form = "exponential"
    supports_left_plane = True

    def __post_init__(self):
        if self.decay <= 0:
            raise ValueError("decay must be positive")

    @property
    def wave_speed_sq(self):
        return 1.0

    def time_value(self, t):
        return np.exp(-self.decay * np.asarray(t, dtype=float))

    def time_derivative(self, t):
        return -self.decay * np.exp(-self.decay * np.asarray(t, dtype=float))

    def laplace(self, z):
        return 1.0 / (np.asarray(z, dtype=complex) + self.decay)

    def omega(self, z):
        # factored sqrt(z)*sqrt(z+b) keeps the cut on (-inf, 0]
        z = np.asarray(z, dtype=complex)
        return np.sqrt(z) * np.sqrt(z + self.decay)

    def params(self):
        return {"decay": self.decay}


@dataclass(frozen=True)
class PolynomialHalfSquareKernel:
    """k(t) = t^2 / 2, K(z) = 1/z^3; vanishes at the origin (inadmissible)."""

    form = "poly_half_square"
    supports_left_plane = True

    @property
    def wave_speed_sq(self):
        return 0.0

    def time_value(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * t * t

    def time_derivative(self, t):
        return np.asarray(t, dtype=float).copy()

    def laplace(self, z):
        return np.asarray(z, dtype=complex) ** -3.0

    def omega(self, z):
        return np.asarray(z, dtype=complex) ** 2

    def params(self):
        return {}


@dataclass(frozen=True)
class DiracDeltaKernel:
    """k = delta; the memoryless (heat-equation) limit, K(z) = 1."""

    form = "dirac_delta"
    supports_left_plane = True

    @property
    def wave_speed_sq(self):
        return None  # not a finite-speed kernel

    def laplace(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    def omega(self, z):
        return np.sqrt(np.asarray(z, dtype=complex))

    def params(self):
        return {}


@dataclass(frozen=True)
class SampledKernel:
    """Kernel given by samples; time values by linear interpolation, Laplace
    values by composite trapezoid on the sample grid (Re z > 0 only)."""

    signal: TimeSignal
    form = "sampled"
    supports_left_plane = False

    @property
    def wave_speed_sq(self):
        return float(self.signal.values[0])

    def time_value(self, t):
        return self.signal.interp(t)

    def time_derivative(self, t):
        grad = np.gradient(self.signal.values, self.signal.dt)
        return np.interp(t, self.signal.times, grad)

    def _growth_rate(self):
        v = np.abs(self.signal.values)
        m = max(4, len(v) // 4)
        tail = v[-m:]
        tt = self.signal.times[-m:]
        mask = tail > 0
        if mask.sum() < 3:
            return 0.0
        slope = np.polyfit(tt[mask], np.log(tail[mask]), 1)[0]
        return max(0.0, float(slope))

    def laplace(self, z):
        value, _ = self.laplace_with_bound(z)
        return value

    def laplace_with_bound(self, z):
        """Quadrature transform plus the documented tail estimate
        max(k(0), |k(T)|) * e^{-Re z * T} / Re z."""
        z = np.asarray(z, dtype=complex)
        if np.any(z.real <= 0):
            raise NonpositiveRealPart("sampled-kernel transform needs Re z > 0")
        rho = self._growth_rate()
        if np.any(z.real <= rho + 1e-12):
            raise QuadratureDivergence(
                f"kernel grows like e^{rho:.3g} t; need Re z > {rho:.3g}")
        t = self.signal.times
        v = self.signal.values
        zz = z[..., None]
        value = np.trapezoid(v * np.exp(-zz * t), dx=self.signal.dt, axis=-1)
        T = self.signal.horizon
        scale = max(abs(v[0]), abs(v[-1]))
        bound = scale * np.exp(-z.real * T) / z.real
        if value.ndim == 0:
            return complex(value), float(bound)
        return value, bound

    def omega(self, z):
        z = np.asarray(z, dtype=complex)
        return np.sqrt(z / self.laplace(z))

    def params(self):
        return {"dt": self.signal.dt, "n": len(self.signal.values)}


@dataclass(frozen=True)
class SumKernel:
    """Pointwise sum of component kernels (transform is linear)."""

    components: tuple
    form = "sum"
    supports_left_plane = False

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("empty sum")

    @property
    def wave_speed_sq(self):
        total = 0.0
        for c in self.components:
            w = c.wave_speed_sq
            if w is None:
                return None
            total += w
        return total

    def time_value(self, t):
        return sum(c.time_value(t) for c in self.components)

    def time_derivative(self, t):
        return sum(c.time_derivative(t) for c in self.components)

    def laplace(self, z):
        return sum(c.laplace(z) for c in self.components)

    def omega(self, z):
        z = np.asarray(z, dtype=complex)
        return np.sqrt(z / self.laplace(z))

    def params(self):
        return {"components": [c.form for c in self.components]}


def laplace_of_kernel(kernel, z):
    """K(z) for Re z > 0; closed form for the analytic catalog, quadrature
    for sampled kernels."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise NonpositiveRealPart("laplace_of_kernel needs Re z > 0")
    value = kernel.laplace(z)
    return complex(value) if np.ndim(value) == 0 and np.ndim(z) == 0 else value


@dataclass(frozen=True)
class K0Report:
    """Outcome of the leading-order admissibility check."""

    a: float
    max_residual: float
    admissible: bool


def default_k0_probes(z_min: float = 1.0, decades: float = 3.0,
                      per_decade: int = 4) -> np.ndarray:
    """Geometrically increasing real probes for validate_K0."""
    n = int(decades * per_decade) + 1
    return np.geomspace(z_min, z_min * 10.0**decades, n) + 0j


def validate_K0(kernel, z_probe=None, tol: float = defaults.K0_TOL) -> K0Report:
    """Check K(z) = a^2/z + O(1/z^2) with a^2 > 0 on a probe grid.

    a^2 comes from k(0) when a time evaluator exists, otherwise from a
    least-squares fit of z*K(z) over the largest probes. The remainder is
    measured as |z^2 (K - a^2/z)| / (1 + a^2) and must stay bounded as |z|
    grows. This is a necessary-condition sampling check, not a proof.
    """
    if z_probe is None:
        z_probe = default_k0_probes()
    z = np.asarray(z_probe, dtype=complex)
    if np.any(z.real <= 0):
        raise NonpositiveRealPart("probes need Re z > 0")
    order = np.argsort(np.abs(z))
    z = z[order]
    K = np.asarray(kernel.laplace(z), dtype=complex)

    if hasattr(kernel, "time_value"):
        a2 = float(np.asarray(kernel.time_value(0.0)).reshape(-1)[0])
    else:
        top = max(2, len(z) // 2)
        a2 = float(np.mean((z[-top:] * K[-top:]).real))

    residual = np.abs(z**2 * (K - a2 / z)) / (1.0 + abs(a2))
    max_residual = float(np.max(residual))
    half = len(z) // 2
    lower = float(np.max(residual[:half])) if half else 0.0
    upper = float(np.max(residual[half:]))
    bounded = np.all(np.isfinite(residual)) and upper <= 4.0 * lower + max(tol, 1e-15)
    admissible = bool(a2 > tol and bounded)
    a = math.sqrt(a2) if a2 > 0 else 0.0
    return K0Report(a=a, max_residual=max_residual, admissible=admissible)


def validate_no_zeros(kernel, grid: FrequencyGrid,
                      tol: float = defaults.ZERO_CHECK_TOL) -> bool:
    """True iff |K(z)| clears the scaled threshold tol/(1+|z|) at every grid
    point. A sampling check, not a proof; the scaling matches |K| ~ a^2/|z|."""
    z = grid.points
    K = np.asarray(kernel.laplace(z), dtype=complex)
    return bool(np.all(np.abs(K) * (1.0 + np.abs(z)) > tol))
