"""Coupled Josephson-junction EPR entanglement and teleportation simulator."""

__version__ = "0.1.0"

from .discretization import (
    Grid1D,
    Grid2D,
    HamiltonianOperator,
    WaveFunction1D,
    WaveFunction2D,
    build_h_1d,
    build_h_2d_collective,
    build_h_2d_lab,
)
from .dynamics import RampResult, RampSchedule, evolve_ramp
from .epr import CovarianceReport, GridPolicy, covariance, ground_state_2d, zeta_sweep
from .errors import ConfigError, NumericalError, ValidationError
from .model import (
    CollectiveMasses,
    HarmonicReference,
    JunctionSystem,
    PhysicalUnits,
    collective_masses,
    from_collective,
    harmonic_reference,
    pendulum_asymptotic_energy,
    potential_2d,
    potential_lab,
    potential_washboard_1d,
    si_conversion,
    to_collective,
)
from .spectra import (
    BOAnalyticLevels,
    BOSurface,
    SpectrumResult,
    bo_ground_state,
    bo_levels_analytic,
    eigensolve,
    fast_mode_surface,
    washboard_spectrum,
)
from .teleport import (
    DensityMatrix1D,
    GaussianEPRResource,
    IdealEPRResource,
    InputState,
    NoiseBudget,
    apply_channel,
    build_input_state,
    displace,
    ensemble_shots,
    fidelity,
    noise_budget_from_epr,
    single_shot,
    trace_distance,
)
from .wigner import WignerGrid, gaussian_blur, wigner_of_density, wigner_of_state, wigner_overlap_fidelity

__all__ = [name for name in dir() if not name.startswith("_")]
