"""Light shift of a two-level atom near a metal-coated dielectric waveguide.

The package computes the complex AC Stark shift induced by the 1D
continuum of guided modes, by direct numerical integration and by the
analytic contour form, and the resulting stationary scattered light
field.  See the README for the configuration format and the CLI.
"""

__version__ = "0.1.0"

from .config import (
    LAMBDA_P,
    AtomParams,
    Config,
    Geometry,
    PumpParams,
    SolverSettings,
    config_with,
    default_gamma,
    derive_coupling,
    load_config,
)
from .errors import (
    ConfigError,
    DegenerateModeError,
    InsufficientSignalError,
    NoGuidedModeError,
    QuadratureError,
    SingularConfigurationError,
    StarkShiftError,
    UndersampledLineError,
)
from .field import (
    FieldAnalysis,
    FieldLine,
    StationaryField,
    fit_decay_length,
    fringe_visibility,
    intensity_line,
    spectral_component,
)
from .lightshift import (
    ComplexShift,
    DipoleState,
    PoleParams,
    drive_and_dipole,
    lightshift_analytic,
    lightshift_numeric,
    pole_params,
    threshold_asymptote,
    total_lightshift,
)
from .modesolver import (
    EVEN,
    ODD,
    DispersionCurve,
    GuidedBranch,
    dispersion,
    dy_for_threshold,
    enumerate_branches,
    exact_threshold,
    guidance_parameter,
    mode_count,
    solve_kx,
    transverse_profile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
