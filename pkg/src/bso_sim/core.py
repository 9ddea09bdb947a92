"""Shared value types for the driven two-level system.

Conventions: hbar = 1, all frequencies angular, basis order (|0>, |1>).
The drive is ``B = B0 cos(omega t + phi)`` with a slowly switched Rabi
amplitude ``g0(t) = g0_max [1 - exp(-t / tau_sw)]``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

#: Perturbative solvers are refused for ``eta0 >= ETA_LIMIT``.
ETA_LIMIT = 0.25
#: Adiabatic switching requires ``tau_sw >= ADIABATIC_FACTOR * max(1/omega, 1/g0_max)``.
ADIABATIC_FACTOR = 10.0

# Below this x = t / tau_sw the closed-form lag function loses digits to
# cancellation and the Taylor series is used instead.
_SERIES_CUTOFF = 1e-2


class ValidationError(ValueError):
    """Raised when parameters violate a documented precondition."""


class IntegrationError(RuntimeError):
    """Raised when the ODE integrator fails (e.g. step-size underflow)."""


class DriveEnvelope(str, enum.Enum):
    """Time dependence of the Rabi amplitude."""

    ADIABATIC_SWITCH = "adiabatic_switch"
    CONSTANT = "constant"


class Frame(str, enum.Enum):
    LAB = "lab"
    ROTATING = "rotating"


@dataclass(frozen=True)
class FieldParams:
    """Drive and atom parameters.

    Parameters
    ----------
    g0_max : float
        Peak Rabi frequency (rad/time).
    omega : float
        Drive frequency (rad/time).
    phi : float
        Absolute field phase at t = 0 (rad).
    tau_sw : float
        Switching time constant of the adiabatic envelope.
    epsilon : float, optional
        Transition frequency; defaults to ``omega`` (resonance).
    """

    g0_max: float
    omega: float
    phi: float = 0.0
    tau_sw: float = 50.0
    epsilon: float | None = None

    def __post_init__(self):
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", self.omega)
        for name in ("g0_max", "omega", "phi", "tau_sw", "epsilon"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.g0_max < 0:
            raise ValidationError(f"g0_max must be >= 0, got {self.g0_max}")
        for name in ("omega", "tau_sw", "epsilon"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def eta0(self) -> float:
        """Asymptotic perturbation parameter ``g0_max / (4 omega)``."""
        return self.g0_max / (4.0 * self.omega)

    @property
    def detuning(self) -> float:
        """``epsilon - omega``; zero on resonance."""
        return self.epsilon - self.omega

    @property
    def is_resonant(self) -> bool:
        return self.epsilon == self.omega

    def with_phase(self, phi: float) -> FieldParams:
        return replace(self, phi=phi)

    def require_resonant(self) -> None:
        if not self.is_resonant:
            raise ValidationError(
                f"analytical solvers need epsilon == omega, got epsilon={self.epsilon}, "
                f"omega={self.omega}"
            )

    def require_perturbative(self) -> None:
        if self.eta0 >= ETA_LIMIT:
            raise ValidationError(
                f"eta0 = g0_max/(4 omega) = {self.eta0:.6g} must be < {ETA_LIMIT}"
            )

    def adiabaticity_violation(self) -> str | None:
        """Return a message if ``tau_sw`` is too short for adiabatic following."""
        scales = [1.0 / self.omega]
        if self.g0_max > 0:
            scales.append(1.0 / self.g0_max)
        required = ADIABATIC_FACTOR * max(scales)
        if self.tau_sw < required:
            return (
                f"tau_sw = {self.tau_sw:.6g} is below {ADIABATIC_FACTOR:g} * "
                f"max(1/omega, 1/g0_max) = {required:.6g}"
            )
        return None


def _as_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValidationError("time must be >= 0")
    return t


def _lag(x):
    """``1 - (1 - exp(-x)) / x`` with its x -> 0 limit, vectorised."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _SERIES_CUTOFF
    xs = x[small]
    out[small] = xs / 2 - xs**2 / 6 + xs**3 / 24 - xs**4 / 120 + xs**5 / 720
    xl = x[~small]
    out[~small] = 1.0 + np.expm1(-xl) / xl
    return out


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def g0(params: FieldParams, t, envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH):
    """Instantaneous Rabi amplitude ``g0(t)``."""
    tt = _as_time(t)
    if envelope is DriveEnvelope.CONSTANT:
        out = np.full_like(tt, params.g0_max)
    else:
        out = -params.g0_max * np.expm1(-tt / params.tau_sw)
    return _scalar_or_array(out, t)


def eta(params: FieldParams, t, envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH):
    """Instantaneous perturbation parameter ``g0(t) / (4 omega)``."""
    return g0(params, t, envelope) / (4.0 * params.omega)


def pulse_area(params: FieldParams, t, envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH):
    """Accumulated area ``int_0^t g0(t') dt'``."""
    tt = _as_time(t)
    if envelope is DriveEnvelope.CONSTANT:
        out = params.g0_max * tt
    else:
        x = tt / params.tau_sw
        out = params.g0_max * tt * _lag(np.atleast_1d(x)).reshape(np.shape(x))
    return _scalar_or_array(out, t)


def average_rabi(params: FieldParams, t, envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH):
    """Running time-average ``(1/t) int_0^t g0``, continuously extended to t = 0.

    For the switched envelope this is
    ``g0_max [1 - (tau_sw / t)(1 - exp(-t / tau_sw))]``.
    """
    tt = _as_time(t)
    if envelope is DriveEnvelope.CONSTANT:
        out = np.full_like(tt, params.g0_max)
    else:
        x = tt / params.tau_sw
        out = params.g0_max * _lag(np.atleast_1d(x)).reshape(np.shape(x))
    return _scalar_or_array(out, t)


@dataclass(frozen=True)
class QubitState:
    """Amplitudes ``(c0, c1)`` at ``time`` in the given frame.

    Normalisation is not enforced here because first-order perturbative
    states are only normalised to O(eta^2); see :attr:`norm_defect`.
    """

    c0: complex
    c1: complex
    frame: Frame = Frame.ROTATING
    time: float = 0.0

    @property
    def p0(self) -> float:
        return abs(self.c0) ** 2

    @property
    def p1(self) -> float:
        return abs(self.c1) ** 2

    @property
    def norm_defect(self) -> float:
        return abs(self.p0 + self.p1 - 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)


def _frame_phase(params: FieldParams, t: float) -> complex:
    return cmath.exp(1j * (params.omega * t + params.phi))


def to_rotating(state: QubitState, params: FieldParams) -> QubitState:
    """Apply ``Q = diag(1, exp(i(omega t + phi)))``."""
    if state.frame is not Frame.LAB:
        raise ValidationError("to_rotating expects a Lab-frame state")
    return QubitState(state.c0, state.c1 * _frame_phase(params, state.time), Frame.ROTATING, state.time)


def to_lab(state: QubitState, params: FieldParams) -> QubitState:
    """Apply the inverse of :func:`to_rotating`."""
    if state.frame is not Frame.ROTATING:
        raise ValidationError("to_lab expects a Rotating-frame state")
    return QubitState(
        state.c0, state.c1 * _frame_phase(params, state.time).conjugate(), Frame.LAB, state.time
    )
