"""Rotating Bose-Einstein condensates in a flat unit-disc trap.

Closed-form Thomas-Fermi profiles, a polar-grid Gross-Pitaevskii energy
with two equivalent rotation forms, vortex-lattice and giant-vortex trial
states, a constrained projected-descent minimizer, restricted radial
branches, and a sweep harness that turns asymptotic scaling laws into
regression checks.
"""

from ._version import __version__
from .field import (
    BC_DIRICHLET,
    BC_NEUMANN,
    EnergyBreakdown,
    Field,
    Grid,
    GridParameterError,
    UnnormalizedFieldError,
    ZeroFieldError,
    angular_momentum,
    anisotropy_index,
    chemical_potential,
    detect_vortices,
    export_csv,
    gp_energy,
    l1_density_distance,
    load_field,
    make_field,
    make_grid,
    norm,
    normalize,
    random_field,
    rescale_breakdown,
    save_field,
)
from .minimize import (
    MinimizeOptions,
    MinimizeResult,
    StepUnderflowError,
    gp_gradient,
    minimize,
    residual_norm,
)
from .runner import (
    MODE_BOTH,
    MODE_MINIMIZE,
    MODE_TRIAL_ONLY,
    MODEL_EPS2_LOG_EPS,
    MODEL_EPS_LOG_EPS,
    MODEL_EPS_POW,
    REGIME_CONSTANT,
    REGIME_FAST,
    REGIME_FIXED,
    BoundaryMassReport,
    HoleReport,
    InsufficientDataError,
    InvalidConfigError,
    NoHoleError,
    RunRecord,
    SweepConfig,
    boundary_mass_report,
    fit_remainder,
    fit_two_term_remainder,
    hole_report,
    load_config,
    run_sweep,
)
from .symmetry import (
    RadialProfile,
    SymmetricBranch,
    branch_seed,
    instability_predicate,
    omega_gap,
    radial_minimize,
    symmetric_branch_energy,
)
from .tf import (
    OMEGA0_HOLE_THRESHOLD,
    BracketError,
    FastRegime,
    FixedRegime,
    InvalidParameterError,
    QuadratureError,
    TfSolution,
    density_normalization,
    giant_vortex_energy,
    tf_energy_quadrature,
    tf_solve,
)
from .trial import (
    DegenerateLatticeError,
    EmptyLatticeWarning,
    GiantTrial,
    GiantTrialSpec,
    InvalidSpecError,
    LatticeTrial,
    LatticeTrialSpec,
    ResolutionWarning,
    SingularPointError,
    VortexLattice,
    WindingAliasError,
    build_giant_vortex_trial,
    build_lattice,
    build_lattice_trial,
    lattice_count_residual,
    lattice_phase,
    phase_kinetic_probe,
    phase_winding_on_circle,
    ring_winding,
    trial_tf_energy_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
