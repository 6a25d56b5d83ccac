"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The numpy implementations are the reference; the numba versions are
line-for-line ports compiled with cache=True, non-parallel and without
fastmath so both paths follow the same IEEE arithmetic order per element.
Set GPDISC_NO_NUMBA=1 to force the numpy path (used by the benchmark and
for debugging).
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("GPDISC_NO_NUMBA", "") != "1"


# ------------------------------------------------------- phase product


def phase_product_np(x, y, px, py):
    """prod_i (z - z_i)/|z - z_i| per node; nodes flat, sites (px, py)."""
    g = np.ones(x.shape, dtype=np.complex128)
    for i in range(px.size):  # fixed site order keeps the product deterministic
        dz = (x - px[i]) + 1j * (y - py[i])
        g *= dz / np.abs(dz)
    return g


@njit(cache=True)
def phase_product_nb(x, y, px, py):  # pragma: no cover - exercised via dispatch
    out = np.empty(x.size, dtype=np.complex128)
    for j in range(x.size):
        acc = 1.0 + 0.0j
        for i in range(px.size):
            dx = x[j] - px[i]
            dy = y[j] - py[i]
            d = math.hypot(dx, dy)
            acc = acc * complex(dx / d, dy / d)
        out[j] = acc
    return out


def phase_product(x, y, px, py):
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    if px.size == 0:
        return np.ones(x.shape, dtype=np.complex128)
    if numba_enabled():
        return phase_product_nb(x.ravel(), y.ravel(), px, py).reshape(x.shape)
    return phase_product_np(x, y, px, py)


# --------------------------------------------------- nearest-site distance


def nearest_distance_np(x, y, px, py):
    d = np.full(x.shape, np.inf)
    for i in range(px.size):
        np.minimum(d, np.hypot(x - px[i], y - py[i]), out=d)
    return d


@njit(cache=True)
def nearest_distance_nb(x, y, px, py):  # pragma: no cover
    out = np.empty(x.size)
    for j in range(x.size):
        best = np.inf
        for i in range(px.size):
            d = math.hypot(x[j] - px[i], y[j] - py[i])
            if d < best:
                best = d
        out[j] = best
    return out


def nearest_distance(x, y, px, py):
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    if px.size == 0:
        return np.full(x.shape, np.inf)
    if numba_enabled():
        return nearest_distance_nb(x.ravel(), y.ravel(), px, py).reshape(x.shape)
    return nearest_distance_np(x, y, px, py)


# ------------------------------------------------ analytic phase gradient


def phase_grad_sq_np(x, y, px, py):
    """|grad arg prod_i (z - z_i)|^2 per node: squared sum of unit whirls."""
    gx = np.zeros(x.shape)
    gy = np.zeros(x.shape)
    for i in range(px.size):
        dx = x - px[i]
        dy = y - py[i]
        d2 = dx * dx + dy * dy
        gx -= dy / d2
        gy += dx / d2
    return gx * gx + gy * gy


@njit(cache=True)
def phase_grad_sq_nb(x, y, px, py):  # pragma: no cover
    out = np.empty(x.size)
    for j in range(x.size):
        gx = 0.0
        gy = 0.0
        for i in range(px.size):
            dx = x[j] - px[i]
            dy = y[j] - py[i]
            d2 = dx * dx + dy * dy
            gx -= dy / d2
            gy += dx / d2
        out[j] = gx * gx + gy * gy
    return out


def phase_grad_sq(x, y, px, py):
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    if px.size == 0:
        return np.zeros(x.shape)
    if numba_enabled():
        return phase_grad_sq_nb(x.ravel(), y.ravel(), px, py).reshape(x.shape)
    return phase_grad_sq_np(x, y, px, py)


# ------------------------------------------------- batched tridiagonal


def thomas_batched_np(lower, diag, upper, rhs):
    """Solve m tridiagonal systems sharing off-diagonals.

    lower/upper: (n-1,) real; diag: (n, m) real; rhs: (n, m) complex.
    Row i couples to i-1 via lower[i-1] and to i+1 via upper[i].
    """
    n, m = rhs.shape
    cp = np.empty((n - 1, m))
    dp = np.empty((n, m), dtype=rhs.dtype)
    den = diag[0].copy()
    if n > 1:
        cp[0] = upper[0] / den
    dp[0] = rhs[0] / den
    for i in range(1, n):
        den = diag[i] - lower[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = upper[i] / den
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / den
    x = np.empty_like(dp)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@njit(cache=True)
def thomas_batched_nb(lower, diag, upper, rhs):  # pragma: no cover
    n, m = rhs.shape
    cp = np.empty((n - 1, m))
    dp = np.empty((n, m), dtype=rhs.dtype)
    x = np.empty_like(dp)
    for k in range(m):
        den = diag[0, k]
        if n > 1:
            cp[0, k] = upper[0] / den
        dp[0, k] = rhs[0, k] / den
        for i in range(1, n):
            den = diag[i, k] - lower[i - 1] * cp[i - 1, k]
            if i < n - 1:
                cp[i, k] = upper[i] / den
            dp[i, k] = (rhs[i, k] - lower[i - 1] * dp[i - 1, k]) / den
        x[n - 1, k] = dp[n - 1, k]
        for i in range(n - 2, -1, -1):
            x[i, k] = dp[i, k] - cp[i, k] * x[i + 1, k]
    return x


def thomas_batched(lower, diag, upper, rhs):
    lower = np.ascontiguousarray(lower, dtype=np.float64)
    upper = np.ascontiguousarray(upper, dtype=np.float64)
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    rhs = np.ascontiguousarray(rhs, dtype=np.complex128)
    if numba_enabled():
        return thomas_batched_nb(lower, diag, upper, rhs)
    return thomas_batched_np(lower, diag, upper, rhs)
