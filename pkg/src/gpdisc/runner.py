"""Parameter sweeps, scaling-law fits, and layer diagnostics.

`run_sweep` drives a list of coupling values eps through a fixed recipe:
closed-form TF reference, regime-matched trial field, optional constrained
minimization, then energy/vorticity/mass diagnostics.  Each run writes one
JSON record (schema-versioned, with timestamps); the sweep then assembles
one CSV table whose cells are repr-formatted so identical configs produce
byte-identical files.

Three rotation schedules are supported:

* fixed:    Omega = omega/eps            (vortex-lattice territory)
* fast:     Omega = omega/eps^(1+alpha)  (giant-vortex territory)
* constant: Omega = omega                (slow rotation; TF reference is
            the fixed-regime formula evaluated at omega0 = eps*omega,
            which is the same functional written per run)

`fit_remainder` extracts the constant K of a one-term remainder model
residual ~ K * model(eps) from sweep records, with a relative misfit that
acceptance checks against an order-of-magnitude threshold; the two-term
fast-regime remainder is fit by nonnegative least squares.
"""

from __future__ import annotations

import json
import math
import traceback
import warnings
from dataclasses import asdict, dataclass, field as dc_field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import yaml
from scipy.optimize import nnls

from ._version import __version__
from .field import (
    BC_DIRICHLET,
    BC_NEUMANN,
    Field,
    anisotropy_index,
    detect_vortices,
    gp_energy,
    make_grid,
)
from .minimize import MinimizeOptions, minimize
from .tf import FastRegime, FixedRegime, OMEGA0_HOLE_THRESHOLD, tf_solve
from .trial import (
    GiantTrialSpec,
    LatticeTrialSpec,
    build_giant_vortex_trial,
    build_lattice_trial,
)

__all__ = [
    "InvalidConfigError",
    "InsufficientDataError",
    "NoHoleError",
    "SweepConfig",
    "RunRecord",
    "HoleReport",
    "BoundaryMassReport",
    "CSV_COLUMNS",
    "EPS_FLOOR",
    "load_config",
    "run_sweep",
    "fit_remainder",
    "fit_two_term_remainder",
    "hole_report",
    "boundary_mass_report",
]

REGIME_FIXED = "fixed"
REGIME_FAST = "fast"
REGIME_CONSTANT = "constant"
_REGIMES = (REGIME_FIXED, REGIME_FAST, REGIME_CONSTANT)

MODE_TRIAL_ONLY = "trial-only"
MODE_MINIMIZE = "minimize"
MODE_BOTH = "both"
_MODES = (MODE_TRIAL_ONLY, MODE_MINIMIZE, MODE_BOTH)

# Below this coupling the default grids stop resolving the physical layers.
EPS_FLOOR = 0.02

CSV_COLUMNS = (
    "eps,omega_eff,E_trial,E_min,E_tf,residual_trial,residual_min,"
    "anisotropy,vortex_count,interior_mass,hole_max_density"
)

SCHEMA_VERSION = 1


class InvalidConfigError(ValueError):
    """Sweep configuration violates its invariants."""


class InsufficientDataError(ValueError):
    """Too few usable records for the requested fit."""


class NoHoleError(ValueError):
    """Hole diagnostics requested below the hole-formation threshold."""


# ------------------------------------------------------------- config


@dataclass(frozen=True)
class SweepConfig:
    regime: str
    omega: float
    eps_list: tuple
    n_r: int = 64
    n_theta: int = 128
    bc: str = BC_NEUMANN
    mode: str = MODE_BOTH
    output_dir: str = "runs"
    alpha: Optional[float] = None
    seed: int = 0
    max_iters: int = 2000
    tol: float = 1e-5
    allow_small_eps: bool = False

    def __post_init__(self):
        regime = str(self.regime).lower()
        mode = str(self.mode).lower().replace("_", "-")
        object.__setattr__(self, "regime", regime)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "bc", str(self.bc).lower())
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        if regime not in _REGIMES:
            raise InvalidConfigError(f"regime must be one of {_REGIMES}, got {self.regime!r}")
        if mode not in _MODES:
            raise InvalidConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if not self.eps_list:
            raise InvalidConfigError("eps_list must not be empty")
        if any(not (0.0 < e < 1.0) for e in self.eps_list):
            raise InvalidConfigError(f"all eps must lie in (0,1), got {self.eps_list}")
        if any(b <= a for a, b in zip(self.eps_list[1:], self.eps_list[:-1])):
            raise InvalidConfigError(f"eps_list must be strictly decreasing, got {self.eps_list}")
        if min(self.eps_list) < EPS_FLOOR:
            if not self.allow_small_eps:
                raise InvalidConfigError(
                    f"eps below the resolution floor {EPS_FLOOR}; "
                    "set allow_small_eps to override"
                )
            warnings.warn(
                f"eps below {EPS_FLOOR}: the default grids may not resolve "
                "the physical layers",
                UserWarning,
                stacklevel=2,
            )
        if regime == REGIME_FAST and self.alpha is None:
            raise InvalidConfigError("fast regime requires alpha")
        if not (self.omega > 0.0):
            raise InvalidConfigError(f"omega must be positive, got {self.omega}")
        if self.bc not in (BC_NEUMANN, BC_DIRICHLET):
            raise InvalidConfigError(f"unknown boundary condition {self.bc!r}")
        if self.max_iters < 1:
            raise InvalidConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.tol > 0.0):
            raise InvalidConfigError(f"tol must be positive, got {self.tol}")


_CONFIG_KEYS = {
    "regime": "regime",
    "omega": "omega",
    "alpha": "alpha",
    "eps_list": "eps_list",
    "nr": "n_r",
    "n_r": "n_r",
    "ntheta": "n_theta",
    "n_theta": "n_theta",
    "bc": "bc",
    "mode": "mode",
    "out_dir": "output_dir",
    "output_dir": "output_dir",
    "seed": "seed",
    "max_iters": "max_iters",
    "tol": "tol",
    "allow_small_eps": "allow_small_eps",
}


def load_config(path) -> SweepConfig:
    """Read a flat YAML mapping into a SweepConfig; unknown keys are errors."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise InvalidConfigError(f"config file {path} is not a flat mapping")
    kwargs = {}
    for key, value in raw.items():
        if key not in _CONFIG_KEYS:
            raise InvalidConfigError(f"unknown config key {key!r}")
        kwargs[_CONFIG_KEYS[key]] = value
    return SweepConfig(**kwargs)


# ------------------------------------------------------------- records


@dataclass
class RunRecord:
    """Everything measured for one eps value of a sweep."""

    eps: float
    omega_eff: float
    regime: str
    mode: str
    n_r: int
    n_theta: int
    bc: str
    seed: int
    e_tf: float = math.nan
    energy_scale: float = math.nan  # eps^2 or eps^(2+2 alpha): scale * E ~ E_tf
    e_trial: Optional[float] = None
    e_trial_magnetic: Optional[float] = None
    e_min: Optional[float] = None
    e_min_magnetic: Optional[float] = None
    form_agreement: Optional[float] = None
    residual_trial: Optional[float] = None
    residual_min: Optional[float] = None
    tf_lower_bound_ok: Optional[bool] = None
    c_sq: Optional[float] = None
    lattice_count: Optional[int] = None
    winding: Optional[int] = None
    anisotropy: Optional[float] = None
    vortex_count: Optional[int] = None
    interior_mass: Optional[float] = None
    hole_max_density: Optional[float] = None
    converged: Optional[bool] = None
    iterations: Optional[int] = None
    grad_residual: Optional[float] = None
    error: Optional[str] = None
    run_warnings: list = dc_field(default_factory=list)
    started: str = ""
    finished: str = ""
    schema_version: int = SCHEMA_VERSION
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv_row(rec: RunRecord) -> str:
    return ",".join(
        _cell(v)
        for v in (
            rec.eps,
            rec.omega_eff,
            rec.e_trial,
            rec.e_min,
            rec.e_tf,
            rec.residual_trial,
            rec.residual_min,
            rec.anisotropy,
            rec.vortex_count,
            rec.interior_mass,
            rec.hole_max_density,
        )
    )


# ------------------------------------------------------------- sweep


def _regime_pieces(config: SweepConfig, eps: float):
    """TF params, effective rotation speed and energy scale for one run."""
    if config.regime == REGIME_FIXED:
        return FixedRegime(config.omega), config.omega / eps, eps * eps
    if config.regime == REGIME_FAST:
        scale = eps ** (2.0 + 2.0 * config.alpha)
        return (
            FastRegime(config.omega, config.alpha, eps),
            config.omega / eps ** (1.0 + config.alpha),
            scale,
        )
    # Constant rotation: same functional as the fixed regime with the
    # per-run coefficient omega0 = eps * omega.
    return FixedRegime(config.omega * eps), config.omega, eps * eps


def _build_trial(config: SweepConfig, eps: float, grid):
    if config.regime == REGIME_FAST:
        trial = build_giant_vortex_trial(GiantTrialSpec(config.omega, eps, config.alpha), grid)
        return trial.field, trial.c_sq, None, trial.winding
    omega0 = config.omega if config.regime == REGIME_FIXED else config.omega * eps
    trial = build_lattice_trial(LatticeTrialSpec(omega0, eps), grid)
    return trial.field, trial.c_sq, trial.lattice.count, None


def _run_one(config: SweepConfig, eps: float, grid) -> RunRecord:
    params, omega_eff, scale = _regime_pieces(config, eps)
    rec = RunRecord(
        eps=eps,
        omega_eff=omega_eff,
        regime=config.regime,
        mode=config.mode,
        n_r=config.n_r,
        n_theta=config.n_theta,
        bc=config.bc,
        seed=config.seed,
        started=datetime.now(timezone.utc).isoformat(),
    )
    try:
        sol = tf_solve(params)
        rec.e_tf = sol.energy
        rec.energy_scale = scale

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            trial_field, c_sq, lattice_count, winding = _build_trial(config, eps, grid)
        rec.run_warnings = [str(w.message) for w in caught]
        rec.c_sq = c_sq
        rec.lattice_count = lattice_count
        rec.winding = winding

        both = gp_energy(trial_field, omega_eff, eps, form="both")
        agreements = [abs(both["angular"].total - both["magnetic"].total)]
        if config.mode in (MODE_TRIAL_ONLY, MODE_BOTH):
            rec.e_trial = both["angular"].total
            rec.e_trial_magnetic = both["magnetic"].total
            rec.residual_trial = scale * rec.e_trial - rec.e_tf

        chosen = trial_field
        if config.mode in (MODE_MINIMIZE, MODE_BOTH):
            options = MinimizeOptions(
                max_iters=config.max_iters, tol=config.tol, seed=config.seed
            )
            result = minimize(trial_field, omega_eff, eps, options)
            min_both = gp_energy(result.field, omega_eff, eps, form="both")
            rec.e_min = min_both["angular"].total
            rec.e_min_magnetic = min_both["magnetic"].total
            rec.residual_min = scale * rec.e_min - rec.e_tf
            rec.converged = result.converged
            rec.iterations = result.iterations
            rec.grad_residual = result.residual
            agreements.append(abs(min_both["angular"].total - min_both["magnetic"].total))
            chosen = result.field
        rec.form_agreement = max(agreements)

        recorded = [e for e in (rec.e_trial, rec.e_min) if e is not None]
        rec.tf_lower_bound_ok = all(
            scale * e - rec.e_tf >= -1e-9 * (1.0 + abs(rec.e_tf)) for e in recorded
        )

        rec.anisotropy = anisotropy_index(chosen)
        amp = float(np.max(np.abs(chosen.values)))
        rec.vortex_count = sum(
            abs(charge) for _, charge in detect_vortices(chosen, 0.5 * amp)
        )
        if config.regime == REGIME_FAST:
            rec.interior_mass = boundary_mass_report(
                chosen, eps, config.omega, config.alpha
            ).interior_mass
        elif config.regime == REGIME_FIXED and config.omega > OMEGA0_HOLE_THRESHOLD:
            rec.hole_max_density = hole_report(chosen, eps, config.omega).max_density
    except Exception:
        rec.error = traceback.format_exc(limit=10)
    rec.finished = datetime.now(timezone.utc).isoformat()
    return rec


def run_sweep(config: SweepConfig) -> list:
    """Run every eps in the config; write JSON records and one CSV table.

    Per-run failures are caught and recorded in the run's record (and as
    empty CSV cells); the sweep itself always completes.  Returns the list
    of records in eps_list order.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_grid(config.n_r, config.n_theta, config.bc)
    records = []
    for i, eps in enumerate(config.eps_list):
        rec = _run_one(config, eps, grid)
        records.append(rec)
        path = out / f"run_{i:03d}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(rec.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    csv_path = out / "sweep.csv"
    lines = [CSV_COLUMNS] + [_csv_row(rec) for rec in records]
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return records


# ------------------------------------------------------------- fits

MODEL_EPS_LOG_EPS = "eps_log_eps"
MODEL_EPS_POW = "eps_pow"
MODEL_EPS2_LOG_EPS = "eps2_log_eps"


def _model_fn(model: str, alpha: Optional[float]) -> Callable[[np.ndarray], np.ndarray]:
    if model == MODEL_EPS_LOG_EPS:
        return lambda e: e * np.abs(np.log(e))
    if model == MODEL_EPS_POW:
        if alpha is None:
            raise ValueError("eps_pow model requires alpha")
        return lambda e: e ** alpha
    if model == MODEL_EPS2_LOG_EPS:
        return lambda e: e * e * np.abs(np.log(e))
    raise ValueError(f"unknown remainder model {model!r}")


def _residuals_from(records: Sequence, source: str):
    eps, res = [], []
    for rec in records:
        value = getattr(rec, f"residual_{source}")
        if rec.error is None and value is not None:
            eps.append(rec.eps)
            res.append(value)
    return np.asarray(eps, dtype=float), np.asarray(res, dtype=float)


def fit_remainder(records: Sequence, model: str, alpha: Optional[float] = None,
                  source: str = "trial") -> tuple[float, float]:
    """Fit residual ~= K * model(eps) through the origin.

    Returns (K, goodness) where goodness is the relative misfit
    ||residual - K model|| / ||residual||; small means the scaling law
    explains the data.  Requires at least 3 usable records.
    """
    if source not in ("trial", "min"):
        raise ValueError(f"source must be 'trial' or 'min', got {source!r}")
    eps, res = _residuals_from(records, source)
    if len(res) < 3:
        raise InsufficientDataError(
            f"need at least 3 usable records, got {len(res)}"
        )
    m = _model_fn(model, alpha)(eps)
    k = float(np.dot(res, m) / np.dot(m, m))
    misfit = float(np.linalg.norm(res - k * m) / np.linalg.norm(res))
    return k, misfit


def fit_two_term_remainder(records: Sequence, alpha: float,
                           source: str = "trial") -> tuple[float, float, float]:
    """Nonnegative fit residual ~= K1 eps^(2 alpha) + K2 eps^2 |log eps|."""
    eps, res = _residuals_from(records, source)
    if len(res) < 2:
        raise InsufficientDataError(
            f"need at least 2 usable records, got {len(res)}"
        )
    basis = np.column_stack([eps ** (2.0 * alpha), eps * eps * np.abs(np.log(eps))])
    coeffs, _ = nnls(basis, res)
    misfit = float(np.linalg.norm(res - basis @ coeffs) / np.linalg.norm(res))
    return float(coeffs[0]), float(coeffs[1]), misfit


# ------------------------------------------------------------- layers


@dataclass(frozen=True)
class HoleReport:
    max_density: float  # sup of |psi|^2 over the core region T
    decay_slope: float  # slope of log rho vs dist(.,dT)^2/eps^(2/3); nan if no data
    core_radius: float  # radius of T: R0 - eps^(1/3)
    hole_radius: float  # TF hole radius R0
    hole_extent: float  # largest radius with angular-max density < 10% of peak


def hole_report(field: Field, eps: float, omega0: float) -> HoleReport:
    """Density diagnostics inside the central low-density region.

    The core region is T = {r <= R0 - eps^(1/3)}, strictly inside the TF
    hole.  The gaussian-decay fit regresses log of the angular-max density
    on dist(r, dT)^2 / eps^(2/3) over radii in T with positive density;
    a clearly negative slope is the expected signature.
    """
    if omega0 <= OMEGA0_HOLE_THRESHOLD:
        raise NoHoleError(
            f"omega0 = {omega0} is at or below the hole threshold "
            f"{OMEGA0_HOLE_THRESHOLD:.6g}"
        )
    sol = tf_solve(FixedRegime(omega0))
    r0 = sol.hole_radius
    core_r = r0 - eps ** (1.0 / 3.0)
    grid = field.grid
    density = np.abs(field.values) ** 2
    profile = density.max(axis=1)

    inside = grid.r <= core_r
    max_density = float(profile[inside].max()) if np.any(inside) else 0.0

    slope = math.nan
    usable = inside & (profile > 0.0)
    if int(np.count_nonzero(usable)) >= 2:
        x = (core_r - grid.r[usable]) ** 2 / eps ** (2.0 / 3.0)
        yv = np.log(profile[usable])
        slope = float(np.polyfit(x, yv, 1)[0])

    peak = float(profile.max())
    extent = 0.0
    if peak > 0.0:
        low = profile < 0.1 * peak
        k = int(np.argmin(low)) if not low.all() else len(low)
        if k > 0 and low[0]:
            extent = float(grid.r[k - 1])
    return HoleReport(
        max_density=max_density,
        decay_slope=slope,
        core_radius=core_r,
        hole_radius=r0,
        hole_extent=extent,
    )


@dataclass(frozen=True)
class BoundaryMassReport:
    interior_mass: float  # integral of |psi|^2 over r < cutoff_radius
    cutoff_radius: float
    bound_scale: float  # regime-appropriate remainder scale for the mass


def boundary_mass_report(field: Field, eps: float, omega1: float, alpha: float,
                         beta: float = 1.5) -> BoundaryMassReport:
    """L2 mass left outside the fast-regime boundary layer.

    For 0 < alpha < 2 the cutoff is the TF inner radius R_eps and the mass
    should scale like eps^alpha + eps^(2-alpha)|log eps|; for alpha >= 2
    the cutoff is sqrt(1 - eps^beta) with 1 <= beta < 2 and the scale is
    eps^(2-beta)|log eps|.
    """
    if alpha < 2.0:
        sol = tf_solve(FastRegime(omega1, alpha, eps))
        cutoff = sol.boundary_radius
        scale = eps ** alpha + eps ** (2.0 - alpha) * abs(math.log(eps))
    else:
        if not (1.0 <= beta < 2.0):
            raise ValueError(f"beta must lie in [1,2), got {beta}")
        cutoff = math.sqrt(1.0 - eps ** beta)
        scale = eps ** (2.0 - beta) * abs(math.log(eps))
    grid = field.grid
    density = np.abs(field.values) ** 2
    inside = grid.r < cutoff
    mass = float(np.sum(grid.weights[inside, None] * density[inside]))
    return BoundaryMassReport(interior_mass=mass, cutoff_radius=cutoff, bound_scale=scale)
