"""Trial wavefunctions for the two rotation regimes.

Two families are built here, each a product of closed-form pieces sampled
on the polar grid and then renormalized:

* vortex-lattice trial: c_eps * f_eps(r) * chi_eps * g_eps, where f_eps is
  the square root of the fixed-regime TF density (ramped linearly across
  the hole edge when there is one), g_eps is the unit-modulus product of
  degree-1 phase factors over a square lattice of spacing ell = delta
  sqrt(eps), and chi_eps cuts each factor off linearly inside a core of
  radius eps^eta around the nearest lattice site.
* giant-vortex trial: c_eps * j_eps(r) * sqrt(rho_eps(r)) * e^{i N theta},
  a pure central winding N = floor(omega1 / (2 eps^(1+alpha))) on top of
  the fast-regime annular density, zero-ramped over a width eps^beta in
  r^2 at the inner annulus edge.

Normalization constants are recorded before renormalizing so their bands
(c^2 in [1, 1+C eps], resp. (1, 1+C eps^(2 beta - 2 alpha)]) can be
checked.  Vortex cores are allowed to be sub-grid: chi_eps is sampled, not
resolved, and a ResolutionWarning flags that situation.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import nearest_distance, phase_grad_sq, phase_product
from .field import Field, Grid, make_field, normalize
from .tf import FastRegime, FixedRegime, TfRegime, TfSolution, tf_solve

__all__ = [
    "DegenerateLatticeError",
    "SingularPointError",
    "InvalidSpecError",
    "WindingAliasError",
    "ResolutionWarning",
    "EmptyLatticeWarning",
    "VortexLattice",
    "LatticeTrialSpec",
    "GiantTrialSpec",
    "LatticeTrial",
    "GiantTrial",
    "build_lattice",
    "lattice_count_residual",
    "lattice_phase",
    "phase_winding_on_circle",
    "ring_winding",
    "build_lattice_trial",
    "build_giant_vortex_trial",
    "phase_kinetic_probe",
    "trial_tf_energy_check",
]

logger = logging.getLogger(__name__)

# Sites are kept inside r <= 1 - RADIUS_MARGIN * spacing, leaving a clear
# band of cells between the outermost vortex and the wall.
RADIUS_MARGIN = 2.0 * math.sqrt(2.0)


class DegenerateLatticeError(ValueError):
    """Spacing so coarse that the lattice has no admissible site."""


class SingularPointError(ValueError):
    """Phase product evaluated exactly at a lattice site."""


class InvalidSpecError(ValueError):
    """Trial-family exponents outside their admissible range."""


class WindingAliasError(ValueError):
    """Requested phase winding exceeds the angular Nyquist mode."""


class ResolutionWarning(UserWarning):
    """A constructed length scale falls below the grid spacing."""


class EmptyLatticeWarning(UserWarning):
    """Lattice trial requested where no lattice site fits; the trial
    degenerates to the vortex-free profile (empty phase product)."""


# ------------------------------------------------------------ lattice


@dataclass(frozen=True)
class VortexLattice:
    """Square lattice of unit-vortex positions inside the disc.

    points holds (x, y) rows in lexicographic (m, n) order of the integer
    coordinates; the admissible region is r <= 1 - 2*sqrt(2)*spacing.
    """

    spacing: float
    delta: float
    eps: float
    points: np.ndarray

    @property
    def count(self) -> int:
        return int(self.points.shape[0])


def build_lattice(eps: float, delta: float) -> VortexLattice:
    """Enumerate the square lattice of spacing delta*sqrt(eps) in the disc.

    Sites are the integer multiples (m*ell, n*ell) with radius at most
    1 - 2*sqrt(2)*ell, in lexicographic (m, n) order.  Raises
    DegenerateLatticeError when the spacing is too coarse for any site
    (ell >= 1/(2*sqrt(2)) empties the admissible region up to at most the
    origin, which is not a usable lattice).
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    if not (delta > 0.0):
        raise ValueError(f"delta must be positive, got {delta}")
    ell = delta * math.sqrt(eps)
    if ell >= 1.0 / RADIUS_MARGIN:
        raise DegenerateLatticeError(
            f"spacing {ell:.4g} leaves no room inside the unit disc "
            f"(needs < 1/(2*sqrt(2)) = {1.0 / RADIUS_MARGIN:.4g})"
        )
    r_max = 1.0 - RADIUS_MARGIN * ell
    k_max = int(math.floor(r_max / ell))
    pts = []
    for m in range(-k_max, k_max + 1):
        for n in range(-k_max, k_max + 1):
            if (m * m + n * n) * ell * ell <= r_max * r_max:
                pts.append((m * ell, n * ell))
    if not pts:
        raise DegenerateLatticeError(
            f"no lattice point within radius {r_max:.4g} at spacing {ell:.4g}"
        )
    return VortexLattice(ell, delta, eps, np.array(pts, dtype=float))


def lattice_count_residual(lattice: VortexLattice) -> float:
    """Deviation of the site count from the area law, in units of ell^(-2/3).

    |N - pi (1-2*sqrt(2) ell)^2 / ell^2| * ell^(2/3); lattice-point
    counting says this stays below a fixed constant as ell -> 0.
    """
    ell = lattice.spacing
    r_max = max(0.0, 1.0 - RADIUS_MARGIN * ell)
    target = math.pi * r_max * r_max / (ell * ell)
    return abs(lattice.count - target) * ell ** (2.0 / 3.0)


def lattice_phase(z, lattice: VortexLattice):
    """Unit-modulus phase product prod_i (z - z_i)/|z - z_i|.

    z may be a complex scalar or any complex ndarray; the return matches
    the input shape.  Raises SingularPointError when z coincides exactly
    with a lattice site.  The product order over sites is fixed
    (lexicographic), so results are bit-reproducible.
    """
    z_arr = np.asarray(z, dtype=complex)
    x = np.ascontiguousarray(z_arr.real.ravel())
    y = np.ascontiguousarray(z_arr.imag.ravel())
    px = np.ascontiguousarray(lattice.points[:, 0])
    py = np.ascontiguousarray(lattice.points[:, 1])
    if lattice.count and np.any(nearest_distance(x, y, px, py) == 0.0):
        raise SingularPointError("phase product is singular at a lattice site")
    vals = phase_product(x, y, px, py).reshape(z_arr.shape)
    if z_arr.shape == ():
        return complex(vals)
    return vals


def phase_winding_on_circle(lattice: VortexLattice, radius: float,
                            n_samples: int = 4096) -> int:
    """Winding number of the lattice phase around the circle of given radius."""
    theta = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
    vals = lattice_phase(radius * np.exp(1j * theta), lattice)
    diffs = np.angle(np.roll(vals, -1) / vals)
    return int(round(float(np.sum(diffs)) / (2.0 * math.pi)))


def ring_winding(field: Field, radius: float) -> int:
    """Phase winding of a sampled field along the grid ring nearest radius."""
    j = int(np.argmin(np.abs(field.grid.r - radius)))
    ring = field.values[j]
    if np.any(ring == 0.0):
        raise ValueError(f"field vanishes on the ring r = {field.grid.r[j]:.4g}")
    diffs = np.angle(np.roll(ring, -1) / ring)
    return int(round(float(np.sum(diffs)) / (2.0 * math.pi)))


# ------------------------------------------------------------ trial specs


@dataclass(frozen=True)
class LatticeTrialSpec:
    """Vortex-lattice family: fixed regime Omega = omega0/eps.

    delta defaults to sqrt(2*pi/omega0), the spacing that balances the
    vortex kinetic cost against the rotation gain; eta is the core-size
    exponent and must exceed 5/2 for the core energy to stay subleading.
    """

    omega0: float
    eps: float
    delta: Optional[float] = None
    eta: float = 3.0

    def __post_init__(self):
        if not (self.omega0 > 0.0 and math.isfinite(self.omega0)):
            raise InvalidSpecError(f"omega0 must be positive, got {self.omega0}")
        if not (0.0 < self.eps < 1.0):
            raise InvalidSpecError(f"eps must lie in (0,1), got {self.eps}")
        if self.delta is None:
            object.__setattr__(self, "delta", math.sqrt(2.0 * math.pi / self.omega0))
        if not (self.delta > 0.0):
            raise InvalidSpecError(f"delta must be positive, got {self.delta}")
        if not (self.eta > 2.5):
            raise InvalidSpecError(f"eta must exceed 5/2, got {self.eta}")


@dataclass(frozen=True)
class GiantTrialSpec:
    """Giant-vortex family: fast regime Omega = omega1/eps^(1+alpha).

    beta controls the width eps^beta (in r^2) of the inner zero-ramp and
    defaults to 2*alpha + 1; beta <= 2*alpha would let the ramp's kinetic
    cost overwhelm the term it regularizes.
    """

    omega1: float
    eps: float
    alpha: float
    beta: Optional[float] = None

    def __post_init__(self):
        if not (self.omega1 > 0.0 and math.isfinite(self.omega1)):
            raise InvalidSpecError(f"omega1 must be positive, got {self.omega1}")
        if not (0.0 < self.eps < 1.0):
            raise InvalidSpecError(f"eps must lie in (0,1), got {self.eps}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise InvalidSpecError(f"alpha must be positive, got {self.alpha}")
        if self.beta is None:
            object.__setattr__(self, "beta", 2.0 * self.alpha + 1.0)
        if not (self.beta > 2.0 * self.alpha):
            raise InvalidSpecError(
                f"beta must exceed 2*alpha = {2.0 * self.alpha}, got {self.beta}"
            )


@dataclass(frozen=True)
class LatticeTrial:
    field: Field
    lattice: VortexLattice  # count == 0 when no site fits the disc
    c_sq: float  # normalization constant squared, recorded pre-renormalization
    spec: LatticeTrialSpec
    tf: TfSolution


@dataclass(frozen=True)
class GiantTrial:
    field: Field
    winding: int
    c_sq: float
    spec: GiantTrialSpec
    tf: TfSolution


# ------------------------------------------------------------ builders


def _lattice_radial_profile(sol: TfSolution, r: np.ndarray, eps: float) -> np.ndarray:
    f = np.sqrt(sol.density(r))
    if sol.hole_radius is not None:
        # Linear ramp of width eps across the hole edge regularizes the
        # square-root kink; the density is zero below the edge anyway.
        ramp = np.clip((r - sol.hole_radius) / eps, 0.0, 1.0)
        f = ramp * f
    return f


def build_lattice_trial(spec: LatticeTrialSpec, grid: Grid) -> LatticeTrial:
    """Sample the vortex-lattice trial on the grid and renormalize.

    When the requested spacing admits no lattice site at all (coarse
    lattices at large eps), the phase product over the empty site set is
    identically one and the construction degenerates to the vortex-free
    radial profile; an EmptyLatticeWarning reports that.
    """
    sol = tf_solve(FixedRegime(spec.omega0))
    try:
        lattice = build_lattice(spec.eps, spec.delta)
    except DegenerateLatticeError as exc:
        warnings.warn(
            f"{exc}; building the vortex-free trial", EmptyLatticeWarning,
            stacklevel=2,
        )
        lattice = VortexLattice(
            spec.delta * math.sqrt(spec.eps), spec.delta, spec.eps,
            np.empty((0, 2), dtype=float),
        )

    core = spec.eps ** spec.eta
    if core < max(grid.dr, grid.dtheta):
        warnings.warn(
            f"vortex core radius {core:.3g} is below the grid spacing; "
            "cores are sampled, not resolved",
            ResolutionWarning,
            stacklevel=2,
        )

    f = _lattice_radial_profile(sol, grid.r, spec.eps)
    x = np.ascontiguousarray(grid.x.ravel())
    y = np.ascontiguousarray(grid.y.ravel())
    px = np.ascontiguousarray(lattice.points[:, 0])
    py = np.ascontiguousarray(lattice.points[:, 1])
    dist = nearest_distance(x, y, px, py).reshape(grid.x.shape)
    chi = np.minimum(1.0, dist / core)
    g = phase_product(x, y, px, py).reshape(grid.x.shape)

    raw = f[:, None] * chi * g
    nsq = float(np.sum(grid.weights[:, None] * (np.abs(raw) ** 2)))
    if nsq <= 0.0:
        raise RuntimeError("trial profile vanished identically on the grid")
    field = normalize(make_field(grid, raw))
    return LatticeTrial(field=field, lattice=lattice, c_sq=1.0 / nsq, spec=spec, tf=sol)


def build_giant_vortex_trial(spec: GiantTrialSpec, grid: Grid) -> GiantTrial:
    """Sample the giant-vortex trial on the grid and renormalize.

    The phase is the single harmonic e^{i N theta} with integer winding
    N = floor(omega1 / (2 eps^(1+alpha))); windings above the angular
    Nyquist mode n_theta/2 cannot be represented and raise
    WindingAliasError.
    """
    sol = tf_solve(FastRegime(spec.omega1, spec.alpha, spec.eps))
    # Guard the integer part against the argument landing a hair below an
    # integer through roundoff.
    winding = int(math.floor(spec.omega1 / (2.0 * spec.eps ** (1.0 + spec.alpha)) + 1e-9))
    if winding > grid.n_theta // 2:
        raise WindingAliasError(
            f"winding {winding} exceeds the angular Nyquist mode "
            f"{grid.n_theta // 2}; increase n_theta"
        )

    r_in = sol.boundary_radius
    layer = 1.0 - r_in
    if grid.dr > layer:
        warnings.warn(
            f"annulus width {layer:.3g} is below the radial spacing {grid.dr:.3g}",
            ResolutionWarning,
            stacklevel=2,
        )

    rsq = grid.r * grid.r
    ramp = np.clip((rsq - r_in * r_in) / spec.eps ** spec.beta, 0.0, 1.0)
    radial = ramp * np.sqrt(sol.density(grid.r))
    raw = radial[:, None] * np.exp(1j * winding * grid.theta)[None, :]
    nsq = float(np.sum(grid.weights[:, None] * (np.abs(raw) ** 2)))
    if nsq <= 0.0:
        raise RuntimeError("trial profile vanished identically on the grid")
    field = normalize(make_field(grid, raw))
    return GiantTrial(field=field, winding=winding, c_sq=1.0 / nsq, spec=spec, tf=sol)


# ------------------------------------------------------------ probes


def phase_kinetic_probe(lattice: VortexLattice, eta: float, eps: float,
                        grid: Grid) -> tuple[float, float]:
    """Kinetic energy of the lattice phase outside the vortex cores.

    Integrates |grad g|^2 (computed analytically per node from the site
    sum) over grid nodes whose nearest-site distance is at least eps^eta,
    and returns (value, leading analytic term pi^3/(2 delta^4 eps^2)).
    The residual in units of |log eps|/eps is logged for calibrating the
    subleading constant.
    """
    x = np.ascontiguousarray(grid.x.ravel())
    y = np.ascontiguousarray(grid.y.ravel())
    px = np.ascontiguousarray(lattice.points[:, 0])
    py = np.ascontiguousarray(lattice.points[:, 1])
    w = np.repeat(grid.weights, grid.n_theta)
    core = eps ** eta
    mask = nearest_distance(x, y, px, py) >= core
    gsq = phase_grad_sq(x, y, px, py)
    value = float(np.sum(w[mask] * gsq[mask]))
    bound = math.pi ** 3 / (2.0 * lattice.delta ** 4 * eps * eps)
    scale = abs(math.log(eps)) / eps
    logger.info(
        "phase kinetic probe: value=%.6g leading=%.6g residual/(|log eps|/eps)=%.4g",
        value, bound, (value - bound) / scale,
    )
    return value, bound


def trial_tf_energy_check(field: Field, params: TfRegime) -> float:
    """TF functional of |field|^2 minus the unconstrained TF minimum.

    Nonnegative up to quadrature error, and O(eps) small for the trials
    built here (the density perturbations are the cores and ramps).
    """
    sol = tf_solve(params)
    grid = field.grid
    rho = np.abs(field.values) ** 2
    r_sq = (grid.r * grid.r)[:, None]
    if isinstance(params, FixedRegime):
        coeff, w_sq = 1.0, params.omega0 ** 2
    else:
        coeff, w_sq = params.eps ** (2.0 * params.alpha), params.omega1 ** 2
    integrand = coeff * rho * rho - (w_sq / 4.0) * r_sq * rho
    value = float(np.sum(grid.weights[:, None] * integrand))
    return value - sol.energy
