"""Pure-numpy time-stepping loops; drop-in replacement for the compiled core.

All three entry points fill a preallocated theta[ix, it] array in place.
Selected automatically when the Cython extension is unavailable (or forced
via MEMHEAT_FORCE_FALLBACK=1).
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

BACKEND_NAME = "python"


def run_characteristic(theta, times_idx, kp_lags, boundary, dx, tau):
    """Leapfrog on one characteristic-aligned sublattice.

    theta: (nx+1, nt+1) field, boundary column and level times_idx[0] already
    set; times_idx: indices of this sublattice's levels; kp_lags[q] = k'(q*tau).
    Update: theta_N = theta_E + theta_W - theta_S + tau^2 * (k' conv theta_xx),
    trapezoid convolution over the sublattice history (current level included).
    """
    nq = len(times_idx)
    nx = theta.shape[0] - 1
    if nq < 2:
        return
    inv_dx2 = 1.0 / (dx * dx)
    V = np.zeros((nq, nx - 1))
    cur = theta[:, times_idx[0]]
    V[0] = (cur[:-2] - 2.0 * cur[1:-1] + cur[2:]) * inv_dx2
    prev_interior = np.zeros(nx - 1)  # ghost level: field is 0 for t < start
    for q in range(1, nq):
        w = kp_lags[q - 1::-1]  # k'((q-1-s)*tau), s = 0..q-1
        hist = w @ V[:q]
        hist -= 0.5 * (kp_lags[q - 1] * V[0] + kp_lags[0] * V[q - 1])
        c = theta[:, times_idx[q - 1]]
        interior = c[2:] + c[:-2] - prev_interior + tau * tau * tau * hist
        theta[1:-1, times_idx[q]] = interior
        theta[0, times_idx[q]] = boundary[times_idx[q]]
        theta[nx, times_idx[q]] = 0.0
        prev_interior = c[1:-1].copy()
        nxt = theta[:, times_idx[q]]
        V[q] = (nxt[:-2] - 2.0 * nxt[1:-1] + nxt[2:]) * inv_dx2


def run_cn_memory(theta, k_lags, boundary, dx, dt, k0, growth_cap):
    """Trapezoidal-CQ Crank-Nicolson stepping of theta_t = k * theta_xx,
    implicit in the newest value. Returns the step index where the growth
    cap tripped, or -1."""
    nx = theta.shape[0] - 1
    nt = theta.shape[1] - 1
    inv_dx2 = 1.0 / (dx * dx)
    gamma = 0.25 * dt * dt * k0
    c = gamma * inv_dx2
    ab = np.zeros((3, nx - 1))
    ab[0, 1:] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[2, :-1] = -c
    V = np.zeros((nt + 1, nx - 1))
    I_prev = np.zeros(nx - 1)
    cap = growth_cap * (np.max(np.abs(boundary)) + 1.0)
    for n in range(1, nt + 1):
        if n >= 2:
            w = k_lags[1:n][::-1]
            hist = dt * (w @ V[1:n])
        else:
            hist = np.zeros(nx - 1)
        rhs = theta[1:-1, n - 1] + 0.5 * dt * (I_prev + hist)
        rhs[0] += c * boundary[n]
        sol = solve_banded((1, 1), ab, rhs)
        theta[1:-1, n] = sol
        theta[0, n] = boundary[n]
        theta[nx, n] = 0.0
        V[n] = (theta[:-2, n] - 2.0 * theta[1:-1, n] + theta[2:, n]) * inv_dx2
        I_prev = hist + 0.5 * dt * k0 * V[n]
        if np.max(np.abs(sol)) > cap:
            return n
    return -1


def run_heat_cn(theta, boundary, dx, dt):
    """Crank-Nicolson for the memoryless (delta-kernel) heat limit."""
    nx = theta.shape[0] - 1
    nt = theta.shape[1] - 1
    r = 0.5 * dt / (dx * dx)
    ab = np.zeros((3, nx - 1))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r
    for n in range(1, nt + 1):
        u = theta[:, n - 1]
        rhs = u[1:-1] + r * (u[:-2] - 2.0 * u[1:-1] + u[2:])
        rhs[0] += r * boundary[n]
        theta[1:-1, n] = solve_banded((1, 1), ab, rhs)
        theta[0, n] = boundary[n]
        theta[nx, n] = 0.0
    return -1
