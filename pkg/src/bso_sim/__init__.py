"""Exact and first-order dynamics of a strongly driven two-level system beyond the RWA."""

__version__ = "0.1.0"

from .core import (
    DriveEnvelope,
    FieldParams,
    Frame,
    IntegrationError,
    QubitState,
    ValidationError,
    average_rabi,
    eta,
    g0,
    pulse_area,
    to_lab,
    to_rotating,
)
from .dynamics import IntegratorConfig, TimeSeries, evolve_to, integrate
from .floquet import (
    ClosedFormSolution,
    FloquetState,
    adiabatic_coefficients,
    closed_form_state,
    integrate_modes,
    mode_rhs,
    pi_half_population,
    solve_pi_half_time,
)
from .analysis import (
    dominant_frequency,
    extract_bso,
    phase_sweep,
    rotation_error,
)
