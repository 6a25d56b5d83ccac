"""Polar-grid discretization of the unit disc and the rotating-condensate
energy functional in its two printed forms.

Grid layout: cell-centered radii r_j = (j + 1/2) dr with dr = 1/n_r, so the
coordinate singularity at r = 0 and the wall at r = 1 fall on cell faces,
never on nodes; equispaced angles theta_k = 2 pi k/n_theta.  Quadrature is
midpoint in r (weight r_j dr dtheta per node) and the periodic trapezoid in
theta; the discrete disc area comes out as pi exactly.

Radial derivatives are second-order face differences.  At the outer wall a
Neumann grid mirrors the last node (zero flux, no energy term) while a
Dirichlet grid reflects it negatively, pinning the wall value to zero and
adding the corresponding boundary kinetic penalty.  Angular derivatives are
evaluated spectrally (FFT with integer mode numbers), which makes pure
harmonics exact eigenfunctions of the angular operators; this is what the
angular-momentum and winding diagnostics rely on.

The two energy forms:

* "angular":   |grad psi|^2 - Omega psi* L psi + |psi|^4/eps^2
* "magnetic":  |(grad - i A) psi|^2 - Omega^2 r^2 |psi|^2/4 + |psi|^4/eps^2

with A the solid-rotation vector potential (Omega r/2 in the angular
direction).  They agree identically in exact arithmetic; both are computed
term by term so their floating-point agreement is a real consistency check.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "BC_NEUMANN",
    "BC_DIRICHLET",
    "Grid",
    "Field",
    "EnergyBreakdown",
    "GridParameterError",
    "ZeroFieldError",
    "UnnormalizedFieldError",
    "make_grid",
    "make_field",
    "norm",
    "normalize",
    "gp_energy",
    "chemical_potential",
    "angular_momentum",
    "l1_density_distance",
    "detect_vortices",
    "anisotropy_index",
    "rescale_breakdown",
    "random_field",
    "save_field",
    "load_field",
    "export_csv",
]

BC_NEUMANN = "neumann"
BC_DIRICHLET = "dirichlet"
_BC_CODES = {BC_NEUMANN: 0, BC_DIRICHLET: 1}
_BC_NAMES = {v: k for k, v in _BC_CODES.items()}


class GridParameterError(ValueError):
    """Grid sizes outside the supported range."""


class ZeroFieldError(ValueError):
    """Normalization of an identically zero field."""


class UnnormalizedFieldError(ValueError):
    """Operation requires a unit-norm field."""


@dataclass(frozen=True)
class Grid:
    """Cell-centered polar grid on the unit disc.

    r holds the n_r node radii, theta the n_theta angles, faces the n_r + 1
    cell-face radii (faces[0] = 0, faces[-1] = 1).  weights is the per-node
    quadrature weight r_j dr dtheta, shared by every angle on ring j.
    modes holds the integer FFT mode numbers for the theta axis.
    Treat all arrays as read-only.
    """

    n_r: int
    n_theta: int
    bc: str
    dr: float
    dtheta: float
    r: np.ndarray
    theta: np.ndarray
    faces: np.ndarray
    weights: np.ndarray
    modes: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.r[:, None] * np.cos(self.theta)[None, :]

    @property
    def y(self) -> np.ndarray:
        return self.r[:, None] * np.sin(self.theta)[None, :]


def make_grid(n_r: int, n_theta: int, bc: str = BC_NEUMANN) -> Grid:
    """Build a polar grid; n_r, n_theta >= 16 and n_theta even."""
    if not (isinstance(n_r, (int, np.integer)) and isinstance(n_theta, (int, np.integer))):
        raise GridParameterError("grid sizes must be integers")
    if n_r < 16 or n_theta < 16:
        raise GridParameterError(f"grid too coarse: {n_r}x{n_theta}, need >= 16 each")
    if n_theta % 2 != 0:
        raise GridParameterError(f"n_theta must be even, got {n_theta}")
    if bc not in _BC_CODES:
        raise GridParameterError(f"bc must be 'neumann' or 'dirichlet', got {bc!r}")
    dr = 1.0 / n_r
    dtheta = 2.0 * math.pi / n_theta
    r = (np.arange(n_r) + 0.5) * dr
    theta = np.arange(n_theta) * dtheta
    faces = np.arange(n_r + 1) * dr
    weights = r * dr * dtheta
    modes = np.fft.fftfreq(n_theta, d=1.0 / n_theta).astype(np.int64)
    return Grid(int(n_r), int(n_theta), bc, dr, dtheta, r, theta, faces, weights, modes)


@dataclass(frozen=True)
class Field:
    """Complex wavefunction sampled on a Grid; values shape (n_r, n_theta).

    Values are treated as immutable after construction; operations return
    new Field instances.
    """

    grid: Grid
    values: np.ndarray


def make_field(grid: Grid, values: np.ndarray) -> Field:
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (grid.n_r, grid.n_theta):
        raise ValueError(f"values shape {values.shape} does not match grid "
                         f"({grid.n_r}, {grid.n_theta})")
    return Field(grid, values)


# ------------------------------------------------------------ norms


def norm(field: Field) -> float:
    """L2 norm over the disc."""
    density = np.abs(field.values) ** 2
    return math.sqrt(float(np.sum(field.grid.weights[:, None] * density)))


def normalize(field: Field) -> Field:
    """Rescale to unit L2 norm; direction unchanged."""
    n = norm(field)
    if n == 0.0:
        raise ZeroFieldError("cannot normalize the zero field")
    return Field(field.grid, field.values / n)


def _require_normalized(field: Field, tol: float = 1e-6) -> None:
    n = norm(field)
    if abs(n - 1.0) > tol:
        raise UnnormalizedFieldError(f"field norm is {n!r}, expected 1 within {tol}")


# ----------------------------------------------------- derivatives


def theta_derivative(values: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Spectral d/dtheta along axis 1."""
    return np.fft.ifft(1j * modes * np.fft.fft(values, axis=1), axis=1)


def apply_angular_momentum(values: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """L = -i d/dtheta along axis 1; pure harmonics are exact eigenvectors."""
    return np.fft.ifft(modes * np.fft.fft(values, axis=1), axis=1)


def radial_face_gradient(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Finite-difference d/dr on the n_r - 1 interior faces."""
    return (values[1:] - values[:-1]) / grid.dr


def _radial_kinetic(values: np.ndarray, grid: Grid) -> float:
    dpsi = radial_face_gradient(values, grid)
    face_w = grid.faces[1:-1] * grid.dr * grid.dtheta
    e = float(np.sum(face_w[:, None] * np.abs(dpsi) ** 2))
    if grid.bc == BC_DIRICHLET:
        # Negative-mirror ghost: wall derivative -2 psi_L/dr on the r=1 face.
        e += float(np.sum(np.abs(values[-1]) ** 2)) * 4.0 * grid.dtheta / grid.dr
    return e


def apply_radial_kinetic(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Operator K_r with <u, K_r u>_w equal to the radial kinetic energy."""
    out = np.zeros_like(values)
    faces = grid.faces
    r = grid.r
    dr2 = grid.dr * grid.dr
    diff = values[1:] - values[:-1]
    flux = faces[1:-1, None] * diff  # R_f (psi_j+1 - psi_j) on interior faces
    out[:-1] -= flux
    out[1:] += flux
    out /= (r[:, None] * dr2)
    if grid.bc == BC_DIRICHLET:
        out[-1] += values[-1] * (4.0 * faces[-1] / (r[-1] * dr2))
    return out


# ------------------------------------------------------- energy forms


@dataclass(frozen=True)
class EnergyBreakdown:
    """kinetic + rotation + interaction = total for one form.

    In the angular form rotation is -Omega <L>; in the magnetic form the
    kinetic part is covariant and rotation is the centrifugal well
    -Omega^2 r^2/4.
    """

    kinetic: float
    rotation: float
    interaction: float
    total: float
    form: str


def _interaction_energy(values: np.ndarray, grid: Grid, eps: float) -> float:
    density = np.abs(values) ** 2
    return float(np.sum(grid.weights[:, None] * density * density)) / (eps * eps)


def gp_energy(field: Field, omega: float, eps: float, form: str = "angular",
              check_norm: bool = True):
    """Energy of the field at rotation speed omega and coupling eps.

    form 'angular' or 'magnetic' returns one EnergyBreakdown; form 'both'
    returns {'angular': ..., 'magnetic': ...}.  check_norm=False skips the
    unit-norm gate (used by the finite-difference gradient check, which
    evaluates deliberately off-sphere points).
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if check_norm:
        _require_normalized(field)
    if form == "both":
        return {
            "angular": gp_energy(field, omega, eps, "angular", check_norm=False),
            "magnetic": gp_energy(field, omega, eps, "magnetic", check_norm=False),
        }
    if form not in ("angular", "magnetic"):
        raise ValueError(f"unknown energy form {form!r}")

    grid = field.grid
    v = field.values
    w = grid.weights[:, None]
    e_rad = _radial_kinetic(v, grid)
    dtheta_v = theta_derivative(v, grid.modes)
    interaction = _interaction_energy(v, grid, eps)

    if form == "angular":
        e_ang = float(np.sum(w * np.abs(dtheta_v / grid.r[:, None]) ** 2))
        l_exp = np.sum(w * np.conj(v) * (-1j) * dtheta_v)
        rotation = -omega * float(np.real(l_exp))
        kinetic = e_rad + e_ang
    else:
        # Covariant angular derivative (1/r) d_theta - i Omega r / 2.
        cov = dtheta_v / grid.r[:, None] - 1j * (omega * 0.5) * grid.r[:, None] * v
        kinetic = e_rad + float(np.sum(w * np.abs(cov) ** 2))
        density = np.abs(v) ** 2
        rotation = -(omega * omega / 4.0) * float(np.sum(w * grid.r[:, None] ** 2 * density))

    total = kinetic + rotation + interaction
    return EnergyBreakdown(kinetic, rotation, interaction, total, form)


def chemical_potential(field: Field, omega: float, eps: float) -> float:
    """Lagrange multiplier of the unit-norm constraint: E + ||psi||_4^4/eps^2."""
    bd = gp_energy(field, omega, eps, "angular")
    return bd.total + bd.interaction


def angular_momentum(field: Field, imag_tol: float = 1e-8) -> float:
    """<psi, L psi>; the imaginary part is a health diagnostic, not data."""
    _require_normalized(field)
    grid = field.grid
    l_psi = apply_angular_momentum(field.values, grid.modes)
    val = complex(np.sum(grid.weights[:, None] * np.conj(field.values) * l_psi))
    if abs(val.imag) > imag_tol:
        import warnings

        warnings.warn(f"<L> has imaginary part {val.imag:.3e}; operator should be hermitian")
    return val.real


def l1_density_distance(field: Field, reference: Callable[[np.ndarray], np.ndarray]) -> float:
    """Integral of | |psi|^2 - rho_ref(r) | over the disc."""
    grid = field.grid
    density = np.abs(field.values) ** 2
    ref = np.asarray(reference(grid.r), dtype=float)[:, None]
    return float(np.sum(grid.weights[:, None] * np.abs(density - ref)))


def anisotropy_index(field: Field) -> float:
    """L2 norm of |psi|^2 minus its angular average; 0 for any f(r)e^{in theta}."""
    grid = field.grid
    density = np.abs(field.values) ** 2
    dev = density - density.mean(axis=1, keepdims=True)
    return math.sqrt(float(np.sum(grid.weights[:, None] * dev * dev)))


def rescale_breakdown(breakdown: EnergyBreakdown, radius: float) -> EnergyBreakdown:
    """Energy breakdown of the same state mapped to a trap of the given radius.

    The unit-disc field psi maps to psi_R(x) = psi(x/R)/R at rotation
    Omega/R^2 and unchanged eps; every component scales by 1/R^2, so
    total(R) * R^2 recovers total(1) identically.
    """
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    s = 1.0 / (radius * radius)
    return EnergyBreakdown(
        breakdown.kinetic * s,
        breakdown.rotation * s,
        breakdown.interaction * s,
        breakdown.total * s,
        breakdown.form,
    )


# ------------------------------------------------------ vortex search


def detect_vortices(field: Field, threshold: float) -> list[tuple[tuple[float, float], int]]:
    """Phase-winding census of grid plaquettes.

    Sums the four wrapped phase differences around each plaquette; a net
    winding of 2 pi k marks a charge-k vortex at the plaquette center.
    Plaquettes whose minimum |psi| exceeds threshold are skipped (a vortex
    needs a nearby zero), as are plaquettes touching an exact zero (their
    winding is undefined).  The innermost ring is additionally tested as a
    loop around the origin.  Returns [(x, y), charge] pairs, origin first,
    then row-major plaquette order.
    """
    grid = field.grid
    v = field.values
    out: list[tuple[tuple[float, float], int]] = []

    def _loop_winding(ring: np.ndarray) -> int:
        rolled = np.roll(ring, -1)
        steps = np.angle(rolled * np.conj(ring))
        return int(round(float(np.sum(steps)) / (2.0 * math.pi)))

    inner = v[0]
    inner_abs = np.abs(inner)
    if inner_abs.min() > 0.0 and inner_abs.min() <= threshold:
        k = _loop_winding(inner)
        if k != 0:
            out.append(((0.0, 0.0), k))

    # Counterclockwise cell boundary: out along theta_k, outer arc to
    # theta_{k+1}, in along theta_{k+1}, inner arc back.
    a = v[:-1, :]
    b = np.roll(v[:-1, :], -1, axis=1)
    c = np.roll(v[1:, :], -1, axis=1)
    d = v[1:, :]
    wind = (
        np.angle(d * np.conj(a))
        + np.angle(c * np.conj(d))
        + np.angle(b * np.conj(c))
        + np.angle(a * np.conj(b))
    )
    charges = np.rint(wind / (2.0 * math.pi)).astype(int)
    min_abs = np.minimum(np.minimum(np.abs(a), np.abs(b)), np.minimum(np.abs(c), np.abs(d)))
    hits = np.argwhere((charges != 0) & (min_abs <= threshold) & (min_abs > 0.0))
    r_mid = 0.5 * (grid.r[:-1] + grid.r[1:])
    for j, k in hits:
        th = grid.theta[k] + 0.5 * grid.dtheta
        out.append(((r_mid[j] * math.cos(th), r_mid[j] * math.sin(th)), int(charges[j, k])))
    return out


# ------------------------------------------------------- random fields


def random_field(grid: Grid, seed: int, n_radial: int = 4, n_modes: int = 8) -> Field:
    """Smooth normalized random field (low angular modes, polynomial radial).

    Each angular mode m carries an r^min(|m|,6)-tapered random radial
    polynomial, so the sample is analytic at the origin and its energy
    stays moderate on any grid.  Deterministic in the seed.
    """
    rng = np.random.default_rng(seed)
    r = grid.r
    values = np.zeros((grid.n_r, grid.n_theta), dtype=np.complex128)
    for m in range(-n_modes, n_modes + 1):
        coeff = rng.standard_normal(n_radial) + 1j * rng.standard_normal(n_radial)
        coeff /= 1.0 + m * m
        radial = np.zeros_like(r, dtype=np.complex128)
        for p, cp in enumerate(coeff):
            radial += cp * r ** p
        radial *= r ** min(abs(m), 6)
        values += radial[:, None] * np.exp(1j * m * grid.theta)[None, :]
    return normalize(Field(grid, values))


# ------------------------------------------------------ serialization

_HEADER = struct.Struct("<IIB")


def save_field(field: Field, path) -> None:
    """Binary container: header (n_r, n_theta, bc) + row-major re/im doubles."""
    grid = field.grid
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(grid.n_r, grid.n_theta, _BC_CODES[grid.bc]))
        fh.write(payload)


def load_field(path) -> Field:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"truncated field file {path}")
        n_r, n_theta, bc_code = _HEADER.unpack(head)
        if bc_code not in _BC_NAMES:
            raise ValueError(f"unknown bc code {bc_code} in {path}")
        raw = fh.read()
    expected = n_r * n_theta * 16
    if len(raw) != expected:
        raise ValueError(f"field file {path} has {len(raw)} payload bytes, expected {expected}")
    values = np.frombuffer(raw, dtype="<c16").reshape(n_r, n_theta).astype(np.complex128)
    return Field(make_grid(n_r, n_theta, _BC_NAMES[bc_code]), values)


def export_csv(field: Field, path) -> None:
    """Debug dump, one node per row: r,theta,re,im."""
    grid = field.grid
    with open(path, "w", newline="") as fh:
        fh.write("r,theta,re,im\n")
        for j in range(grid.n_r):
            rj = float(grid.r[j])
            row = field.values[j]
            for k in range(grid.n_theta):
                fh.write(
                    f"{rj!r},{float(grid.theta[k])!r},"
                    f"{float(row[k].real)!r},{float(row[k].imag)!r}\n"
                )
