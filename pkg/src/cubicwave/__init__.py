"""Desk-scale laboratory for 2D wave equations with cubic derivative forcing.

The package has three layers:

* algebra of the cubic form and its null-circle trace (``nonlinearity``),
* reduced flows along outgoing rays (``profile_ode``, ``char_ode``),
* the PDE itself: solvers, observers, decay fits (``wave``, ``asymptotics``),

glued together by config/artifact plumbing and a CLI.
"""

from .artifacts import RunArtifact, emit_series, load_array, save_array
from .asymptotics import (
    EnergyTrace,
    RaySample,
    asymptotic_freeness_diagnostic,
    extract_ray,
    fit_energy_decay,
    fit_phase_slope,
    fit_pointwise_decay,
    fit_profile_p0,
    fit_profile_p0_least_squares,
    fit_profile_p0_sensitivity,
    profile_grid_from_rays,
    ray_route_discrepancy,
    verify_profile_convergence,
)
from .char_ode import (
    CharOdeProblem,
    ExtractedProfile,
    OdeBounds,
    PowerLawForcing,
    TabulatedForcing,
    Trajectory,
    XiEtaTrajectory,
    ZeroForcing,
    extract_profile,
    power_forced_preset,
    solve_xi_eta,
    solve_z,
    trajectory_csv,
    verify_asymptotic_bound,
)
from .config import (
    SCHEMA_VERSION,
    ExperimentConfig,
    parse_config,
    preset_config,
    preset_names,
    render_config,
)
from .errors import (
    BlowupDetected,
    ConfigError,
    CubicwaveError,
    DomainError,
    FitError,
    RangeError,
    StepError,
    TailError,
    UnwrapError,
    WindowError,
)
from .fitting import DecayFit, linear_fit, loglog_fit
from .grids import CartesianGrid2D, RadialGrid
from .initial_data import InitialData, bump_data, poly_bump, smooth_bump
from .observers import (
    BoundaryWatchdog,
    CenterProbe,
    DerivativeSupTrace,
    EnergyRecorder,
    RaySampler,
    SnapshotSaver,
)
from .nonlinearity import (
    CubicNonlinearity,
    NonlinearityClass,
    NullVector,
    antidissipative_cubic,
    circle_trace,
    classify,
    dissipative_cubic,
    null_form_antisymmetric,
    null_form_conjugate,
    null_form_gradient,
    rotation_invariance_defect,
    rotational_cubic,
)
from .profile_ode import (
    ProfileFunction,
    ProfileParams,
    blow_up_time,
    explicit_profile,
    integrate_profile,
    integrate_profile_batch,
    integrate_profile_values,
    modulus_bound,
    phase_theta,
)
from .runner import analyze_artifact, build_nonlinearity, run_experiment, run_single
from .wave import PlanarWaveSolver, RadialWaveSolver

__version__ = "0.1.0"

__all__ = [
    "BlowupDetected",
    "BoundaryWatchdog",
    "CartesianGrid2D",
    "CenterProbe",
    "CharOdeProblem",
    "ConfigError",
    "CubicNonlinearity",
    "CubicwaveError",
    "DecayFit",
    "DerivativeSupTrace",
    "DomainError",
    "EnergyRecorder",
    "EnergyTrace",
    "ExperimentConfig",
    "ExtractedProfile",
    "FitError",
    "InitialData",
    "NonlinearityClass",
    "NullVector",
    "OdeBounds",
    "PlanarWaveSolver",
    "PowerLawForcing",
    "ProfileFunction",
    "ProfileParams",
    "RadialGrid",
    "RadialWaveSolver",
    "RangeError",
    "RaySample",
    "RaySampler",
    "RunArtifact",
    "SCHEMA_VERSION",
    "SnapshotSaver",
    "StepError",
    "TabulatedForcing",
    "TailError",
    "Trajectory",
    "UnwrapError",
    "WindowError",
    "XiEtaTrajectory",
    "ZeroForcing",
    "analyze_artifact",
    "antidissipative_cubic",
    "asymptotic_freeness_diagnostic",
    "blow_up_time",
    "build_nonlinearity",
    "circle_trace",
    "classify",
    "dissipative_cubic",
    "emit_series",
    "explicit_profile",
    "extract_profile",
    "extract_ray",
    "fit_energy_decay",
    "fit_phase_slope",
    "fit_pointwise_decay",
    "fit_profile_p0",
    "fit_profile_p0_least_squares",
    "fit_profile_p0_sensitivity",
    "integrate_profile",
    "integrate_profile_batch",
    "integrate_profile_values",
    "linear_fit",
    "load_array",
    "loglog_fit",
    "modulus_bound",
    "null_form_antisymmetric",
    "null_form_conjugate",
    "null_form_gradient",
    "parse_config",
    "phase_theta",
    "poly_bump",
    "power_forced_preset",
    "preset_config",
    "preset_names",
    "profile_grid_from_rays",
    "ray_route_discrepancy",
    "render_config",
    "rotation_invariance_defect",
    "rotational_cubic",
    "run_experiment",
    "run_single",
    "save_array",
    "smooth_bump",
    "solve_xi_eta",
    "solve_z",
    "trajectory_csv",
    "verify_asymptotic_bound",
    "verify_profile_convergence",
    "bump_data",
]
