"""Restricted minimization over single angular-momentum sectors.

A state xi(r) e^{i n theta} turns the disc functional into a 1D radial
problem: E_n = int { |xi'|^2 + n^2 xi^2/r^2 + xi^4/eps^2 } dA, with the
rotation contributing only the constant shift -Omega n once xi is
normalized.  E_n is minimized per sector by the same projected descent as
the 2D solver (1D tridiagonal smoother, Neumann wall, cell-centered grid),
and the "symmetric branch" is the best E_n - Omega n over a window of n.

The interaction is quartic, matching the full functional: the sector
values E_0 = 1/(pi eps^2) and the printed radial stationarity equation
both pin that convention down.

The instability predicate is the closed-form inequality
n^2 - 2 Omega n + 1/(pi eps^2) > 0 for sectors n >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import thomas_batched
from .field import anisotropy_index  # re-export: it is a symmetry diagnostic
from .minimize import StepUnderflowError, _line_search

__all__ = [
    "RadialProfile",
    "SymmetricBranch",
    "radial_minimize",
    "instability_predicate",
    "omega_gap",
    "symmetric_branch_energy",
    "anisotropy_index",
]


@dataclass(frozen=True)
class RadialProfile:
    n: int
    r: np.ndarray
    xi: np.ndarray
    e_n_part: float  # kinetic + centrifugal + interaction, no rotation shift
    energy_restricted: float  # e_n_part - Omega n
    residual: float
    iterations: int
    converged: bool
    nondecreasing: bool  # profile monotonicity diagnostic


@dataclass(frozen=True)
class SymmetricBranch:
    best_n: int
    energy: float
    table: list  # (n, e_n_part, energy_restricted) per scanned sector
    seed_hint: float
    window_warning: bool  # best_n hit the top of the scan window


def _radial_arrays(n_r: int):
    dr = 1.0 / n_r
    r = (np.arange(n_r) + 0.5) * dr
    faces = np.arange(n_r + 1) * dr
    w = 2.0 * math.pi * r * dr
    return r, faces, w, dr


def _radial_tridiag_1d(r, faces, dr):
    inv = 1.0 / (r * dr * dr)
    lower = -faces[1:-1] * inv[1:]
    upper = -faces[1:-1] * inv[:-1]
    diag = (faces[:-1] + faces[1:]) * inv
    diag[-1] = faces[-2] * inv[-1]  # Neumann wall: no outer-face flux
    return lower, diag, upper


def radial_minimize(n: int, eps: float, omega: float, n_r: int = 512,
                    max_iters: int = 20000, tol: float = 1e-8) -> RadialProfile:
    """Minimize the n-sector radial functional; Neumann at the wall.

    The minimizer of E_n does not depend on Omega (the rotation term is the
    constant -Omega n); Omega only shifts energy_restricted.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"sector index must be a nonnegative integer, got {n}")
    if not (eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    n = int(n)
    r, faces, w, dr = _radial_arrays(n_r)
    lower, kdiag, upper = _radial_tridiag_1d(r, faces, dr)
    cent = n * n / (r * r)
    face_w = 2.0 * math.pi * faces[1:-1] * dr
    inv_eps2 = 1.0 / (eps * eps)

    def energy(xi):
        dxi = (xi[1:] - xi[:-1]) / dr
        e = float(np.sum(face_w * dxi * dxi))
        e += float(np.sum(w * cent * xi * xi))
        e += float(np.sum(w * xi ** 4)) * inv_eps2
        return e

    def wnorm(xi):
        return math.sqrt(float(np.sum(w * xi * xi)))

    def gradient(xi):
        g = np.zeros_like(xi)
        flux = faces[1:-1] * (xi[1:] - xi[:-1])
        g[:-1] -= flux
        g[1:] += flux
        g /= r * dr * dr
        return 2.0 * g + 2.0 * cent * xi + 4.0 * inv_eps2 * xi ** 3

    if n == 0:
        xi = np.full(n_r, 1.0 / math.sqrt(math.pi))
    else:
        xi = r ** min(n, 12)
        xi = xi / wnorm(xi)

    e = energy(xi)
    best_e, best_xi = e, xi.copy()
    s = 1.0
    res = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        g = gradient(xi)
        lam = float(np.sum(w * xi * g))
        gt = g - lam * xi
        res = math.sqrt(float(np.sum(w * gt * gt)))
        if res <= tol:
            converged = True
            break
        c = 4.0 * float(np.max(xi * xi)) * inv_eps2 + 1.0
        diag = (c + 2.0 * kdiag + 2.0 * cent)[:, None]
        d = thomas_batched(2.0 * lower, diag, 2.0 * upper, gt[:, None].astype(complex))
        d = d[:, 0].real
        slope = float(np.sum(w * gt * d))
        if not slope > 0.0:
            d, slope = gt, res * res
        try:
            xi, e, s_used = _line_search(
                xi, d, e, slope, s, energy, wnorm, 1e-13 * (1.0 + abs(e))
            )
        except StepUnderflowError:
            break  # numerical floor reached; report the best iterate
        s = min(s_used * 1.5, 1e3)
        if e < best_e:
            best_e, best_xi = e, xi.copy()

    xi = best_xi / wnorm(best_xi)
    e_n = energy(xi)
    nondecr = bool(np.all(np.diff(xi) >= -1e-9 * float(np.max(np.abs(xi)))))
    return RadialProfile(
        n=n,
        r=r,
        xi=xi,
        e_n_part=e_n,
        energy_restricted=e_n - omega * n,
        residual=res,
        iterations=iterations,
        converged=converged,
        nondecreasing=nondecr,
    )


def instability_predicate(n: int, omega: float, eps: float) -> bool:
    """Closed-form sector-instability inequality for n >= 2."""
    if n < 2 or int(n) != n:
        raise ValueError(f"the instability criterion applies to sectors n >= 2, got {n}")
    return n * n - 2.0 * omega * n + 1.0 / (math.pi * eps * eps) > 0.0


def omega_gap(n: int, eps: float, n_r: int = 512) -> float:
    """Critical-velocity gap E_{n+1} - E_n of the rotation-free sector energies."""
    hi = radial_minimize(n + 1, eps, 0.0, n_r=n_r)
    lo = radial_minimize(n, eps, 0.0, n_r=n_r)
    return hi.e_n_part - lo.e_n_part


def branch_seed(omega: float, eps: float) -> float:
    """Candidate winding for the best symmetric sector at rotation omega."""
    omega0 = eps * omega
    if omega0 <= 4.0 / math.sqrt(math.pi):
        return (omega / 4.0) * (1.0 + math.pi * omega0 * omega0 / 48.0)
    return (omega / 2.0) * (1.0 - 4.0 / (3.0 * math.sqrt(math.pi) * omega0))


def symmetric_branch_energy(eps: float, omega: float, n_max: Optional[int] = None,
                            n_r: int = 512) -> SymmetricBranch:
    """Best single-sector energy over n in {0..n_max} at rotation omega.

    n_max defaults to ceil(2 omega), a factor >~4 above the candidate
    winding, so the scan window comfortably brackets the optimum; a
    window_warning is set when the best sector sits on the window edge.
    """
    if n_max is None:
        n_max = max(1, math.ceil(2.0 * omega))
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    table = []
    best_n, best_e = 0, math.inf
    for n in range(0, n_max + 1):
        prof = radial_minimize(n, eps, omega, n_r=n_r)
        table.append((n, prof.e_n_part, prof.energy_restricted))
        if prof.energy_restricted < best_e:
            best_n, best_e = n, prof.energy_restricted
    return SymmetricBranch(
        best_n=best_n,
        energy=best_e,
        table=table,
        seed_hint=branch_seed(omega, eps),
        window_warning=(best_n == n_max),
    )
