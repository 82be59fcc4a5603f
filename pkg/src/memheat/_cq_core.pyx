# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping loops (hot kernels of the time-domain solver).

Mirrors _cq_fallback exactly; parity is enforced by tests.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


def run_characteristic(double[:, ::1] theta, long long[::1] times_idx,
                       double[::1] kp_lags, double[::1] boundary,
                       double dx, double tau):
    cdef Py_ssize_t nq = times_idx.shape[0]
    cdef Py_ssize_t nx = theta.shape[0] - 1
    cdef Py_ssize_t ni = nx - 1
    if nq < 2:
        return
    cdef double inv_dx2 = 1.0 / (dx * dx)
    cdef double tau3 = tau * tau * tau
    cdef cnp.ndarray Vbuf = np.zeros((nq, ni), dtype=np.float64)
    cdef double[:, ::1] V = Vbuf
    cdef cnp.ndarray pbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] prev_interior = pbuf
    cdef cnp.ndarray hbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] hist = hbuf
    cdef Py_ssize_t q, s, i, col, col_prev
    cdef double w, h

    col = times_idx[0]
    for i in range(ni):
        V[0, i] = (theta[i, col] - 2.0 * theta[i + 1, col] + theta[i + 2, col]) * inv_dx2

    for q in range(1, nq):
        # trapezoid convolution over the sublattice history
        for i in range(ni):
            hist[i] = 0.0
        for s in range(q):
            w = kp_lags[q - 1 - s]
            for i in range(ni):
                hist[i] += w * V[s, i]
        for i in range(ni):
            hist[i] -= 0.5 * (kp_lags[q - 1] * V[0, i] + kp_lags[0] * V[q - 1, i])
        col_prev = times_idx[q - 1]
        col = times_idx[q]
        for i in range(ni):
            h = theta[i, col_prev] + theta[i + 2, col_prev] - prev_interior[i] \
                + tau3 * hist[i]
            theta[i + 1, col] = h
        theta[0, col] = boundary[col]
        theta[nx, col] = 0.0
        for i in range(ni):
            prev_interior[i] = theta[i + 1, col_prev]
        for i in range(ni):
            V[q, i] = (theta[i, col] - 2.0 * theta[i + 1, col] + theta[i + 2, col]) * inv_dx2


def run_cn_memory(double[:, ::1] theta, double[::1] k_lags, double[::1] boundary,
                  double dx, double dt, double k0, double growth_cap):
    cdef Py_ssize_t nx = theta.shape[0] - 1
    cdef Py_ssize_t nt = theta.shape[1] - 1
    cdef Py_ssize_t ni = nx - 1
    cdef double inv_dx2 = 1.0 / (dx * dx)
    cdef double c = 0.25 * dt * dt * k0 * inv_dx2
    cdef double diag = 1.0 + 2.0 * c

    # Thomas factorisation of the constant tridiagonal (-c, diag, -c)
    cdef cnp.ndarray cpbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] cp = cpbuf
    cdef Py_ssize_t i, n, m
    cp[0] = -c / diag
    for i in range(1, ni):
        cp[i] = -c / (diag + c * cp[i - 1])

    cdef cnp.ndarray Vbuf = np.zeros((nt + 1, ni), dtype=np.float64)
    cdef double[:, ::1] V = Vbuf
    cdef cnp.ndarray ibuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] I_prev = ibuf
    cdef cnp.ndarray hbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] hist = hbuf
    cdef cnp.ndarray rbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] rhs = rbuf
    cdef double cap = growth_cap
    cdef double bmax = 0.0, w, amax
    for n in range(nt + 1):
        if boundary[n] > bmax:
            bmax = boundary[n]
        elif -boundary[n] > bmax:
            bmax = -boundary[n]
    cap = growth_cap * (bmax + 1.0)

    for n in range(1, nt + 1):
        for i in range(ni):
            hist[i] = 0.0
        for m in range(1, n):
            w = dt * k_lags[n - m]
            for i in range(ni):
                hist[i] += w * V[m, i]
        for i in range(ni):
            rhs[i] = theta[i + 1, n - 1] + 0.5 * dt * (I_prev[i] + hist[i])
        rhs[0] += c * boundary[n]
        # Thomas solve (I - gamma D2) x = rhs
        rhs[0] = rhs[0] / diag
        for i in range(1, ni):
            rhs[i] = (rhs[i] + c * rhs[i - 1]) / (diag + c * cp[i - 1])
        for i in range(ni - 2, -1, -1):
            rhs[i] = rhs[i] - cp[i] * rhs[i + 1]
        amax = 0.0
        for i in range(ni):
            theta[i + 1, n] = rhs[i]
            if rhs[i] > amax:
                amax = rhs[i]
            elif -rhs[i] > amax:
                amax = -rhs[i]
        theta[0, n] = boundary[n]
        theta[nx, n] = 0.0
        for i in range(ni):
            V[n, i] = (theta[i, n] - 2.0 * theta[i + 1, n] + theta[i + 2, n]) * inv_dx2
            I_prev[i] = hist[i] + 0.5 * dt * k0 * V[n, i]
        if amax > cap:
            return n
    return -1


def run_heat_cn(double[:, ::1] theta, double[::1] boundary, double dx, double dt):
    cdef Py_ssize_t nx = theta.shape[0] - 1
    cdef Py_ssize_t nt = theta.shape[1] - 1
    cdef Py_ssize_t ni = nx - 1
    cdef double r = 0.5 * dt / (dx * dx)
    cdef double diag = 1.0 + 2.0 * r
    cdef cnp.ndarray cpbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] cp = cpbuf
    cdef cnp.ndarray rbuf = np.zeros(ni, dtype=np.float64)
    cdef double[::1] rhs = rbuf
    cdef Py_ssize_t i, n
    cp[0] = -r / diag
    for i in range(1, ni):
        cp[i] = -r / (diag + r * cp[i - 1])
    for n in range(1, nt + 1):
        for i in range(ni):
            rhs[i] = theta[i + 1, n - 1] + r * (theta[i, n - 1]
                     - 2.0 * theta[i + 1, n - 1] + theta[i + 2, n - 1])
        rhs[0] += r * boundary[n]
        rhs[0] = rhs[0] / diag
        for i in range(1, ni):
            rhs[i] = (rhs[i] + r * rhs[i - 1]) / (diag + r * cp[i - 1])
        for i in range(ni - 2, -1, -1):
            rhs[i] = rhs[i] - cp[i] * rhs[i + 1]
        for i in range(ni):
            theta[i + 1, n] = rhs[i]
        theta[0, n] = boundary[n]
        theta[nx, n] = 0.0
    return -1
