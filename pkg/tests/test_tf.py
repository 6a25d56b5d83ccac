"""Closed-form Thomas-Fermi profiles and the giant-vortex reduced energy.

Every numeric target below is either evaluated from the closed form inside
the test (so the test re-derives it independently of the library) or checked
against a brute-force quadrature oracle built here.
"""

import math

import numpy as np
import pytest

import gpdisc.tf as tf
from gpdisc import (
    BracketError,
    FastRegime,
    FixedRegime,
    InvalidParameterError,
    OMEGA0_HOLE_THRESHOLD,
    density_normalization,
    giant_vortex_energy,
    tf_energy_quadrature,
    tf_solve,
)

THRESHOLD = 4.0 / math.sqrt(math.pi)


# ---------------------------------------------------------------- closed forms


def test_threshold_constant():
    assert OMEGA0_HOLE_THRESHOLD == pytest.approx(THRESHOLD, abs=0.0)


def test_slow_branch_energy_closed_form():
    # Below the hole threshold the profile is 1/pi + (w^2/16)(2r^2 - 1) and
    # the energy is 1/pi - w^2/8 - pi w^4/768.
    for w in (0.5, 1.0, 2.0, THRESHOLD):
        sol = tf_solve(FixedRegime(w))
        expected = 1.0 / math.pi - w * w / 8.0 - math.pi * w ** 4 / 768.0
        assert sol.energy == pytest.approx(expected, rel=0.0, abs=1e-15)
        assert sol.hole_radius is None


def test_slow_branch_small_omega_is_flat_disc():
    # As the rotation vanishes the minimizer approaches the uniform density
    # with energy 1/pi.
    sol = tf_solve(FixedRegime(1e-6))
    assert sol.energy == pytest.approx(1.0 / math.pi, abs=1e-12)
    r = np.linspace(0.0, 1.0, 11)
    assert np.allclose(sol.density(r), 1.0 / math.pi, atol=1e-12)


def test_hole_branch_energy_and_radius():
    for w in (4.0, 8.0, 20.0):
        sol = tf_solve(FixedRegime(w))
        r0 = math.sqrt(1.0 - 4.0 / (math.sqrt(math.pi) * w))
        energy = (w / 4.0) * (8.0 / (3.0 * math.sqrt(math.pi)) - w)
        assert sol.hole_radius == pytest.approx(r0, rel=0.0, abs=1e-15)
        assert sol.energy == pytest.approx(energy, rel=0.0, abs=1e-12)
        # density vanishes on the hole and is continuous at its edge
        assert sol.density(0.5 * r0) == 0.0
        assert sol.density(r0) == pytest.approx(0.0, abs=1e-15)


def test_hole_radius_at_twice_threshold():
    # At omega0 = 8/sqrt(pi) the hole covers exactly half the disc area.
    sol = tf_solve(FixedRegime(8.0 / math.sqrt(math.pi)))
    assert abs(sol.hole_radius - 1.0 / math.sqrt(2.0)) < 1e-12


def test_branch_continuity_at_threshold():
    lo = tf_solve(FixedRegime(THRESHOLD * (1.0 - 1e-14)))
    hi = tf_solve(FixedRegime(THRESHOLD * (1.0 + 1e-14)))
    assert abs(lo.energy - hi.energy) < 1e-12
    # the density at the center touches zero exactly at the threshold
    at = tf_solve(FixedRegime(THRESHOLD))
    assert at.density(0.0) == pytest.approx(0.0, abs=1e-15)


def test_hole_radius_monotone_in_omega0():
    omegas = np.linspace(THRESHOLD * 1.01, 40.0, 50)
    radii = [tf_solve(FixedRegime(w)).hole_radius for w in omegas]
    assert all(b > a for a, b in zip(radii, radii[1:]))
    assert radii[-1] < 1.0


def test_fast_regime_closed_form():
    w1, alpha, eps = 1.0, 1.0, 0.05
    sol = tf_solve(FastRegime(w1, alpha, eps))
    r_eps = math.sqrt(1.0 - 4.0 * eps ** alpha / (math.sqrt(math.pi) * w1))
    energy = -(w1 * w1 / 4.0) * (1.0 - 8.0 * eps ** alpha / (3.0 * math.sqrt(math.pi) * w1))
    assert sol.boundary_radius == pytest.approx(r_eps, rel=0.0, abs=1e-15)
    assert sol.energy == pytest.approx(energy, rel=0.0, abs=1e-15)
    assert sol.hole_radius is None
    assert sol.density(0.5 * r_eps) == 0.0


def test_invalid_parameters_raise():
    with pytest.raises(InvalidParameterError):
        FixedRegime(0.0)
    with pytest.raises(InvalidParameterError):
        FixedRegime(-1.0)
    with pytest.raises(InvalidParameterError):
        FastRegime(1.0, 0.0, 0.05)
    with pytest.raises(InvalidParameterError):
        FastRegime(1.0, 1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        FastRegime(-1.0, 1.0, 0.05)
    # coupling too weak: the annulus would not fit inside the disc
    with pytest.raises(InvalidParameterError):
        tf_solve(FastRegime(1.0, 1.0, 0.9))


# ---------------------------------------------------------------- quadrature


@pytest.mark.parametrize("w", [1.0, THRESHOLD, 4.0, 8.0])
def test_quadrature_matches_closed_form_fixed(w):
    sol = tf_solve(FixedRegime(w))
    assert abs(tf_energy_quadrature(sol) - sol.energy) < 1e-9


def test_quadrature_matches_closed_form_fast():
    sol = tf_solve(FastRegime(1.0, 1.0, 0.05))
    assert abs(tf_energy_quadrature(sol) - sol.energy) < 1e-9


@pytest.mark.parametrize(
    "params",
    [FixedRegime(1.0), FixedRegime(4.0), FixedRegime(8.0), FastRegime(1.0, 1.0, 0.05)],
)
def test_density_normalization(params):
    assert abs(density_normalization(tf_solve(params)) - 1.0) < 1e-8


def test_brute_force_energy_oracle():
    # Independent oracle: trapezoid quadrature of the scaled energy density
    # on a very fine radial mesh must agree with both the closed form and
    # the Gauss-Legendre path.
    w = 8.0
    sol = tf_solve(FixedRegime(w))
    r = np.linspace(0.0, 1.0, 2_000_001)
    rho = sol.density(r)
    val = np.trapezoid((rho * rho - (w * w / 4.0) * r * r * rho) * 2.0 * math.pi * r, r)
    assert val == pytest.approx(sol.energy, abs=1e-8)


# ------------------------------------------------- delta concentration (fast)


def test_fast_density_concentrates_at_the_edge():
    # Against the probe F(r) = r^2 the fast-regime density acts like a unit
    # point mass at r = 1; the defect shrinks linearly with the layer width.
    errors = []
    for eps in (0.1, 0.01, 0.001):
        sol = tf_solve(FastRegime(1.0, 1.0, eps))
        r = np.linspace(sol.boundary_radius, 1.0, 400_001)
        rho = sol.density(r)
        integral = np.trapezoid(rho * r * r * 2.0 * math.pi * r, r)
        errors.append(abs(integral - 1.0))
        assert errors[-1] <= 0.8 * eps
    assert errors[0] > errors[1] > errors[2]


# ------------------------------------------------------ giant-vortex energy


def test_giant_vortex_energy_frozen_value():
    # Frozen oracle: golden-section refinement of the reduced functional at
    # (omega1, alpha, eps) = (1, 1, 0.05), cross-checked once against a
    # 20000-point scan of nu.
    energy, nu = giant_vortex_energy(1.0, 1.0, 0.05)
    assert energy == pytest.approx(-0.23101274861827847, abs=1e-10)
    assert nu == pytest.approx(0.481197914232088, abs=1e-6)


def test_giant_vortex_energy_above_tf_and_decreasing():
    energies = []
    for eps in (0.1, 0.05, 0.025):
        e, _ = giant_vortex_energy(1.0, 1.0, eps)
        etf = tf_solve(FastRegime(1.0, 1.0, eps)).energy
        assert e > etf  # optimizing a restricted ansatz can only cost energy
        energies.append(e)
    # decreasing toward the limiting value -omega1^2/4
    assert energies[0] > energies[1] > energies[2] > -0.25


def test_giant_vortex_optimal_winding_scale():
    # The optimal circulation rate nu sits near omega1/2 once the annulus is
    # thin; verify against a brute-force grid scan of the reduced energy.
    w1, alpha, eps = 2.0, 1.0, 0.05
    energy, nu = giant_vortex_energy(w1, alpha, eps)
    e2a = eps ** (2.0 * alpha)
    grid = np.linspace(0.0, 2.0 * w1, 20001)[1:-1]
    vals = [tf._reduced_energy(v, w1, e2a) for v in grid]
    k = int(np.argmin(vals))
    assert nu == pytest.approx(grid[k], abs=2e-3)
    assert energy <= vals[k] + 1e-12
    assert nu == pytest.approx(w1 / 2.0, rel=0.25)


def test_giant_vortex_bracket_error(monkeypatch):
    # Force the coarse scan to pin its minimum to the left edge.
    monkeypatch.setattr(tf, "_reduced_energy", lambda nu, w1, e2a: nu)
    with pytest.raises(BracketError):
        giant_vortex_energy(1.0, 1.0, 0.05)
