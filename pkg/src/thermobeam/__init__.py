"""Structure-preserving finite-difference toolkit for a clamped,
inhomogeneous, frictionally damped thermoelastic beam.

The package simulates the coupled system

    u_tt + (p(x) u_xx)_xx + 2 q(x) u_t + kappa theta_xx = 0
    theta_t - eta theta_xx - kappa u_xxt = 0

on [0, L] with clamped mechanical ends and Dirichlet temperature, using
discrete operators built so that the energy dissipation identity holds
to rounding error, and provides the analysis tools (dissipativity
certificates, resolvent solves, spectra, convergence studies, decay-rate
fits) that certify the exponential energy decay numerically.
"""

from .analysis import (
    ConvergenceStudy,
    ResolventReport,
    SpectrumReport,
    dissipativity_certificate,
    manufactured_convergence,
    resolve_at_zero,
    spectral_abscissa,
)
from .config import (
    ScenarioConfig,
    build_initial_state,
    get_preset,
    load_config,
    preset_names,
    resolve_scenario,
)
from .diagnostics import (
    DecayFit,
    DiagnosticsRecord,
    default_epsilon,
    dissipation,
    energy,
    f1,
    fit_decay,
    lyapunov_g,
    mu_constant,
)
from .errors import (
    CapacityError,
    CoefficientPositivityError,
    ConfigError,
    ConfigValidationError,
    DegenerateFitError,
    DimensionMismatchError,
    InstabilityError,
    InsufficientDataError,
    InvalidArgumentError,
    SingularSystemError,
    StateCorruptionError,
    ThermobeamError,
)
from .grid import (
    CoefficientField,
    Grid,
    build_grid,
    coefficient_from_spec,
    sample_coefficients,
)
from .operators import (
    BeamState,
    BlockOperator,
    assemble_biharmonic,
    assemble_d2,
    assemble_generator,
    inner_product,
    norm_h,
    zero_state,
)
from .scenario import RunOutput, RunSummary, run_scenario, run_sweep
from .timestepper import SolverPlan, Trajectory, build_plan, run, step

__version__ = "0.1.0"
