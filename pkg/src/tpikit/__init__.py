"""Telescopic projective integration for stiff BGK-type relaxation equations."""

from .config import ConfigError, ExperimentConfig, collision_model, load_config
from .experiments import (
    ErrorReport,
    RunResult,
    build_problem,
    density_errors,
    exact_density,
    initial_density,
    plan_schedule,
    run_experiment,
)
from .integrators import (
    RK2_MIDPOINT,
    RK4_CLASSIC,
    BlowUpError,
    ButcherTableau,
    IntegrationResult,
    integrate,
    telescopic_step,
)
from .maxwellian import Moments, density, linearized_maxwellian, maxwellian, moments
from .quadrature import (
    VelocityGrid1D,
    VelocityGrid2D,
    gauss_hermite_1d,
    gauss_hermite_2d,
)
from .spatial import (
    SCHEMES,
    SpaceGrid1D,
    SpaceGrid2D,
    convective_derivative,
    fourier_symbol,
    transport_1d,
    transport_2d,
)
from .spectrum import (
    SpectrumReport,
    build_symbol,
    build_symbol_2d,
    cluster_real_parts,
    containment_check,
    dominant_expansion,
    eig_dense,
    fast_spectral_radius,
    full_spectrum,
    mode_frequencies,
    physical_space_matrix,
    spectrum_to_csv,
)
from .system import CollisionModel, equilibrium_state, make_rhs
from .tpi_params import (
    ZERO_ONE_MAX_M_TABLE,
    ClusteredPlanInfo,
    InfeasibleScheduleError,
    StabilityReport,
    TpiSchedule,
    amplification,
    pfe_multiplier,
    select_clustered,
    select_zero_one_stable,
    verify_stability,
    zero_one_max_m,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "ButcherTableau",
    "ClusteredPlanInfo",
    "CollisionModel",
    "ConfigError",
    "ErrorReport",
    "ExperimentConfig",
    "InfeasibleScheduleError",
    "IntegrationResult",
    "Moments",
    "RK2_MIDPOINT",
    "RK4_CLASSIC",
    "RunResult",
    "SCHEMES",
    "SpaceGrid1D",
    "SpaceGrid2D",
    "SpectrumReport",
    "StabilityReport",
    "TpiSchedule",
    "VelocityGrid1D",
    "VelocityGrid2D",
    "ZERO_ONE_MAX_M_TABLE",
    "amplification",
    "build_problem",
    "build_symbol",
    "build_symbol_2d",
    "cluster_real_parts",
    "collision_model",
    "containment_check",
    "convective_derivative",
    "density",
    "density_errors",
    "dominant_expansion",
    "eig_dense",
    "equilibrium_state",
    "exact_density",
    "fast_spectral_radius",
    "fourier_symbol",
    "full_spectrum",
    "gauss_hermite_1d",
    "gauss_hermite_2d",
    "initial_density",
    "integrate",
    "linearized_maxwellian",
    "load_config",
    "make_rhs",
    "maxwellian",
    "mode_frequencies",
    "moments",
    "pfe_multiplier",
    "physical_space_matrix",
    "plan_schedule",
    "run_experiment",
    "select_clustered",
    "select_zero_one_stable",
    "spectrum_to_csv",
    "telescopic_step",
    "transport_1d",
    "transport_2d",
    "verify_stability",
    "zero_one_max_m",
]
