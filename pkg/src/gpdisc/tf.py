"""Thomas-Fermi (strong coupling) ground states of a rotating condensate
in a flat unit-disc trap.

Everything here is closed-form algebra on densities: the 2D wavefunction
never appears.  Two rotation regimes are covered:

* fixed:  Omega = omega0 / eps with omega0 held constant.  The density is
  an explicit quadratic in r, developing a central hole of radius R0 once
  omega0 exceeds 4/sqrt(pi).
* fast:   Omega = omega1 / eps**(1+alpha).  The density concentrates in a
  thin layer near the boundary of the disc.

`giant_vortex_energy` minimizes the reduced one-dimensional functional in
which all vorticity sits in a single central phase winding nu; its value
stays strictly above the unrestricted TF energy but approaches the same
-omega1**2/4 limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "FixedRegime",
    "FastRegime",
    "TfSolution",
    "OMEGA0_HOLE_THRESHOLD",
    "InvalidParameterError",
    "QuadratureError",
    "BracketError",
    "tf_solve",
    "tf_energy_quadrature",
    "giant_vortex_energy",
]

# Rotation coefficient separating the simply connected profile from the
# annular one with a central hole.
OMEGA0_HOLE_THRESHOLD = 4.0 / math.sqrt(math.pi)


class InvalidParameterError(ValueError):
    """Regime parameters outside their admissible range."""


class QuadratureError(RuntimeError):
    """Successive quadrature refinements failed to agree."""


class BracketError(RuntimeError):
    """The 1D search could not bracket an interior minimum."""


@dataclass(frozen=True)
class FixedRegime:
    """Rotation Omega = omega0/eps with fixed coefficient omega0 > 0."""

    omega0: float

    def __post_init__(self):
        if not (self.omega0 > 0.0 and math.isfinite(self.omega0)):
            raise InvalidParameterError(f"omega0 must be positive, got {self.omega0}")


@dataclass(frozen=True)
class FastRegime:
    """Rotation Omega = omega1/eps**(1+alpha) with omega1 > 0, alpha > 0."""

    omega1: float
    alpha: float
    eps: float

    def __post_init__(self):
        if not (self.omega1 > 0.0 and math.isfinite(self.omega1)):
            raise InvalidParameterError(f"omega1 must be positive, got {self.omega1}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise InvalidParameterError(f"alpha must be positive, got {self.alpha}")
        if not (0.0 < self.eps < 1.0):
            raise InvalidParameterError(f"eps must lie in (0,1), got {self.eps}")


TfRegime = Union[FixedRegime, FastRegime]


@dataclass(frozen=True)
class TfSolution:
    """Closed-form TF minimizer: density profile, energy and support radii.

    density maps radii in [0,1] (scalar or ndarray) to the nonnegative
    density; hole_radius is set only for fixed-regime profiles with a
    central hole; boundary_radius is the inner support radius R_eps of the
    fast-regime annulus.
    """

    density: Callable[[np.ndarray], np.ndarray]
    energy: float
    hole_radius: Optional[float]
    boundary_radius: Optional[float]
    regime: TfRegime


# ---------------------------------------------------------------- solve


def tf_solve(params: TfRegime) -> TfSolution:
    """Return the exact TF minimizer for the given rotation regime.

    The density is the positive part of an explicit quadratic in r; the
    energy is the corresponding closed form.  No numerics beyond scalar
    arithmetic happen here.
    """
    if isinstance(params, FixedRegime):
        return _solve_fixed(params)
    if isinstance(params, FastRegime):
        return _solve_fast(params)
    raise InvalidParameterError(f"unknown regime {params!r}")


def _solve_fixed(params: FixedRegime) -> TfSolution:
    w = params.omega0
    if w <= OMEGA0_HOLE_THRESHOLD:
        # Simply connected profile: 1/pi + (w^2/16)(2r^2 - 1), nonnegative
        # on the whole disc up to the threshold where the center touches 0.
        def density(r, _w=w):
            r = np.asarray(r, dtype=float)
            return 1.0 / math.pi + (_w * _w / 16.0) * (2.0 * r * r - 1.0)

        energy = (
            1.0 / math.pi - w * w / 8.0 - math.pi * w ** 4 / 768.0
        )
        return TfSolution(density, energy, None, None, params)

    # Annular profile with a hole of radius R0.
    r0_sq = 1.0 - 4.0 / (math.sqrt(math.pi) * w)
    r0 = math.sqrt(r0_sq)

    def density(r, _w=w, _r0_sq=r0_sq):
        r = np.asarray(r, dtype=float)
        val = (_w * _w / 8.0) * (r * r - _r0_sq)
        return np.maximum(val, 0.0)

    energy = (w / 4.0) * (8.0 / (3.0 * math.sqrt(math.pi)) - w)
    return TfSolution(density, energy, r0, None, params)


def _solve_fast(params: FastRegime) -> TfSolution:
    w1, alpha, eps = params.omega1, params.alpha, params.eps
    layer = 4.0 * eps ** alpha / (math.sqrt(math.pi) * w1)
    if layer >= 1.0:
        raise InvalidParameterError(
            "coupling too weak for the fast-regime profile: "
            f"4*eps^alpha/(sqrt(pi)*omega1) = {layer:.4g} >= 1"
        )
    r_eps_sq = 1.0 - layer
    r_eps = math.sqrt(r_eps_sq)
    scale = w1 * w1 / (8.0 * eps ** (2.0 * alpha))

    def density(r, _s=scale, _r2=r_eps_sq):
        r = np.asarray(r, dtype=float)
        return np.maximum(_s * (r * r - _r2), 0.0)

    energy = -(w1 * w1 / 4.0) * (1.0 - 8.0 * eps ** alpha / (3.0 * math.sqrt(math.pi) * w1))
    return TfSolution(density, energy, None, r_eps, params)


# ----------------------------------------------------------- quadrature


def _gauss_disc_integral(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> float:
    """Integral of f over the annulus a <= r <= b with disc measure 2*pi*r dr."""
    x, wts = np.polynomial.legendre.leggauss(n)
    r = 0.5 * (b - a) * x + 0.5 * (a + b)
    return float(np.sum(wts * f(r) * 2.0 * math.pi * r) * 0.5 * (b - a))


def _tf_integrand(solution: TfSolution) -> Callable[[np.ndarray], np.ndarray]:
    # Energy density of the TF functional in the regime-appropriate scaling.
    if isinstance(solution.regime, FixedRegime):
        w = solution.regime.omega0

        def f(r):
            rho = solution.density(r)
            return rho * rho - (w * w / 4.0) * r * r * rho

        return f

    w1 = solution.regime.omega1
    e2a = solution.regime.eps ** (2.0 * solution.regime.alpha)

    def f(r):
        rho = solution.density(r)
        return e2a * rho * rho - (w1 * w1 / 4.0) * r * r * rho

    return f


def _support_pieces(solution: TfSolution) -> list[tuple[float, float]]:
    # Split at the kink of the positive part so each piece is smooth.
    if solution.hole_radius is not None:
        return [(0.0, solution.hole_radius), (solution.hole_radius, 1.0)]
    if solution.boundary_radius is not None:
        return [(0.0, solution.boundary_radius), (solution.boundary_radius, 1.0)]
    return [(0.0, 1.0)]


def tf_energy_quadrature(solution: TfSolution, n_nodes: int = 32, tol: float = 1e-11) -> float:
    """Numerically integrate the TF energy functional of the solution.

    Composite Gauss-Legendre on the support pieces, with the breakpoint at
    the positive-part kink.  Serves as an independent cross-check of the
    closed-form energy.  Raises QuadratureError when doubling the node
    count moves the value by more than tol.
    """
    f = _tf_integrand(solution)
    coarse = sum(_gauss_disc_integral(f, a, b, n_nodes) for a, b in _support_pieces(solution))
    fine = sum(_gauss_disc_integral(f, a, b, 2 * n_nodes) for a, b in _support_pieces(solution))
    if abs(fine - coarse) > tol * (1.0 + abs(fine)):
        raise QuadratureError(
            f"quadrature did not settle: {coarse!r} vs {fine!r} at n={n_nodes}"
        )
    return fine


def density_normalization(solution: TfSolution, n_nodes: int = 64) -> float:
    """2*pi * integral of density(r) * r dr; equals 1 for a valid solution."""
    return sum(
        _gauss_disc_integral(lambda r: solution.density(r), a, b, n_nodes)
        for a, b in _support_pieces(solution)
    )


# ---------------------------------------------------- giant vortex branch


def _annulus_coeff(nu: float, e2a: float) -> float:
    """Solve the normalization for c = mu + omega1*nu at winding nu.

    The density [c - nu^2/r^2]_+ / (2 eps^(2 alpha)) integrates to one iff
    g(c) = c - nu^2 + nu^2 log(nu^2/c) - 2 eps^(2 alpha)/pi = 0; g is
    increasing and convex for c > nu^2 with g(nu^2) < 0.
    """
    target = 2.0 * e2a / math.pi
    nu_sq = nu * nu
    if nu_sq == 0.0:
        return target

    def g(c):
        return c - nu_sq + nu_sq * math.log(nu_sq / c) - target

    lo = nu_sq
    hi = nu_sq + target
    for _ in range(200):
        if g(hi) > 0.0:
            break
        hi = 2.0 * hi - nu_sq  # double the offset from the singular end
    else:
        raise BracketError("normalization root not bracketed")
    return brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)


def _reduced_energy(nu: float, omega1: float, e2a: float) -> float:
    """Reduced energy at winding nu after the closed-form density step."""
    c = _annulus_coeff(nu, e2a)
    nu_sq = nu * nu
    if nu_sq == 0.0:
        int_rho_sq = math.pi * c * c / (4.0 * e2a * e2a)
    else:
        s0 = nu_sq / c
        # integral of (c - nu^2/s)^2 ds over [s0, 1], times pi/(2 e2a)^2
        poly = c * c * (1.0 - s0) + 2.0 * c * nu_sq * math.log(s0) + nu_sq * c - nu_sq * nu_sq
        int_rho_sq = math.pi * poly / (4.0 * e2a * e2a)
    mu = c - omega1 * nu
    return mu - e2a * int_rho_sq


def giant_vortex_energy(omega1: float, alpha: float, eps: float) -> tuple[float, float]:
    """Minimize the reduced single-winding energy over the winding nu.

    The inner minimization over densities is closed form; the outer 1D
    minimization over nu >= 0 runs a 64-point coarse scan of [0, 2*omega1]
    followed by golden-section refinement.  Returns (energy, optimal nu).
    Raises BracketError when the coarse scan pins the minimum to an edge.
    """
    params = FastRegime(omega1, alpha, eps)  # validates inputs
    e2a = eps ** (2.0 * alpha)

    grid = np.linspace(0.0, 2.0 * omega1, 64)
    vals = [_reduced_energy(float(nu), omega1, e2a) for nu in grid]
    i = int(np.argmin(vals))
    if i == 0 or i == len(grid) - 1:
        raise BracketError(
            f"reduced energy minimum at scan edge nu={grid[i]:.4g}; no interior bracket"
        )

    lo, hi = float(grid[i - 1]), float(grid[i + 1])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _reduced_energy(x1, omega1, e2a)
    f2 = _reduced_energy(x2, omega1, e2a)
    for _ in range(200):
        if b - a < 1e-12 * (1.0 + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = _reduced_energy(x1, omega1, e2a)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = _reduced_energy(x2, omega1, e2a)
    nu_opt = 0.5 * (a + b)
    energy = _reduced_energy(nu_opt, omega1, e2a)

    # The reduced branch can touch but never cross the unrestricted energy.
    e_tf = _solve_fast(params).energy
    if not energy > e_tf:
        raise RuntimeError(
            f"reduced energy {energy!r} fell below the unrestricted TF energy {e_tf!r}"
        )
    return energy, nu_opt
