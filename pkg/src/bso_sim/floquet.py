"""Harmonic (Floquet) expansion of the rotating-frame state.

The state is expanded as ``sum_n (a_n, b_n) z^n`` with
``z = exp(-2i(omega t + phi))``. The coefficients obey

    da_n/dt = 2i n omega a_n + i g0 (b_n + b_{n-1}) / 2
    db_n/dt = 2i n omega b_n + i g0 (a_n + a_{n+1}) / 2

truncated to ``|n| <= N``. To first order in ``eta = g0/(4 omega)`` the
sidebands follow the central pair adiabatically, which gives the closed
form used by :class:`ClosedFormSolution`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    DriveEnvelope,
    FieldParams,
    Frame,
    QubitState,
    ValidationError,
    average_rabi,
    eta,
    g0,
    pulse_area,
)
from .dynamics import IntegratorConfig, _solve, sample_times

MAX_ORDER = 8
#: Allowed |g0'(tau) tau - pi/2| for a pulse to count as a pi/2 pulse.
PULSE_AREA_TOL = 1e-6


def _check_order(order: int) -> None:
    if not 1 <= order <= MAX_ORDER:
        raise ValidationError(f"truncation order must lie in [1, {MAX_ORDER}], got {order!r}")


@dataclass(frozen=True, eq=False)
class FloquetState:
    """Harmonic coefficients ``a_n, b_n`` for ``n = -order .. order``."""

    order: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        _check_order(self.order)
        size = 2 * self.order + 1
        if np.shape(self.a) != (size,) or np.shape(self.b) != (size,):
            raise ValidationError(f"coefficient arrays must have length {size}")

    @classmethod
    def ground(cls, order: int = 1) -> FloquetState:
        a = np.zeros(2 * order + 1, dtype=complex)
        a[order] = 1.0
        return cls(order, a, np.zeros_like(a))

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def coefficient(self, n: int) -> tuple[complex, complex]:
        if abs(n) > self.order:
            return 0j, 0j
        return complex(self.a[n + self.order]), complex(self.b[n + self.order])

    def reconstruct(self, params: FieldParams, t: float) -> QubitState:
        z = np.exp(-2j * (params.omega * t + params.phi)) ** self.harmonics
        return QubitState(complex(self.a @ z), complex(self.b @ z), Frame.ROTATING, float(t))


def _mode_derivative(a, b, n, g, omega, detuning):
    b_lower = np.concatenate(([0j], b[:-1]))
    a_upper = np.concatenate((a[1:], [0j]))
    rot = 2j * n * omega
    da = rot * a + 0.5j * g * (b + b_lower)
    db = rot * b + 0.5j * g * (a + a_upper) - 1j * detuning * b
    return da, db


def mode_rhs(
    state: FloquetState,
    t: float,
    params: FieldParams,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
) -> FloquetState:
    """Time derivatives of every coefficient; harmonics beyond ``order`` count as zero."""
    da, db = _mode_derivative(
        np.asarray(state.a, dtype=complex),
        np.asarray(state.b, dtype=complex),
        state.harmonics,
        g0(params, t, envelope),
        params.omega,
        params.detuning,
    )
    return FloquetState(state.order, da, db)


@dataclass(frozen=True, eq=False)
class FloquetTrajectory:
    """Sampled coefficients; ``a[i, k]`` is ``a_n`` with ``n = k - order`` at ``times[i]``."""

    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    order: int
    params: FieldParams
    envelope: DriveEnvelope

    def sideband(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if abs(n) > self.order:
            zeros = np.zeros(len(self.times), dtype=complex)
            return zeros, zeros.copy()
        k = n + self.order
        return self.a[:, k], self.b[:, k]

    def state(self, i: int) -> FloquetState:
        return FloquetState(self.order, self.a[i].copy(), self.b[i].copy())

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        """Rotating-frame amplitudes ``(C0, C1)`` at every sample."""
        n = np.arange(-self.order, self.order + 1)
        z = np.exp(-2j * (self.params.omega * self.times + self.params.phi))
        powers = z[:, None] ** n[None, :]
        return (self.a * powers).sum(axis=1), (self.b * powers).sum(axis=1)

    @property
    def p1(self) -> np.ndarray:
        return np.abs(self.reconstruct()[1]) ** 2

    @property
    def norm_defect(self) -> np.ndarray:
        c0, c1 = self.reconstruct()
        return np.abs(np.abs(c0) ** 2 + np.abs(c1) ** 2 - 1.0)


def integrate_modes(
    params: FieldParams,
    t_end: float,
    *,
    order: int = 1,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
    cfg: IntegratorConfig | None = None,
) -> FloquetTrajectory:
    """Integrate the truncated ``2(2N+1)``-dimensional mode system from ``a_0 = 1``."""
    _check_order(order)
    if not t_end > 0:
        raise ValidationError(f"t_end must be > 0, got {t_end!r}")
    # the fastest mode rotates at 2 N omega, so the step cap shrinks with N
    cfg = (cfg or IntegratorConfig()).resolve(params.omega)
    step = min(cfg.max_step, 2 * math.pi / (2 * order * params.omega) / 20)
    cfg = IntegratorConfig(cfg.rel_tol, cfg.abs_tol, step, cfg.sample_dt, cfg.method)

    size = 2 * order + 1
    n = np.arange(-order, order + 1)
    gmax, tsw, w, det = params.g0_max, params.tau_sw, params.omega, params.detuning
    constant = envelope is DriveEnvelope.CONSTANT

    def f(t, y):
        g = gmax if constant else -gmax * math.expm1(-t / tsw)
        da, db = _mode_derivative(y[:size], y[size:], n, g, w, det)
        return np.concatenate((da, db))

    y0 = np.zeros(2 * size, dtype=complex)
    y0[order] = 1.0
    times = sample_times(t_end, cfg.sample_dt)
    sol = _solve(f, y0, 0.0, t_end, cfg, t_eval=times)
    return FloquetTrajectory(times, sol.y[:size].T, sol.y[size:].T, order, params, envelope)


def adiabatic_coefficients(
    a0: complex,
    b0: complex,
    params: FieldParams,
    t: float,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
) -> tuple[complex, complex, complex, complex]:
    """Sidebands slaved to the central pair: ``(a_-1, b_-1, a_1, b_1) = (0, eta a0, -eta b0, 0)``.

    Raises
    ------
    ValidationError
        If ``eta(t) >= 0.25`` or ``tau_sw`` is too short for adiabatic following.
    """
    if np.any(np.asarray(eta(params, t, envelope)) >= 0.25):
        raise ValidationError("adiabatic following needs eta(t) < 0.25")
    problem = params.adiabaticity_violation()
    if problem:
        raise ValidationError(f"adiabatic following invalid: {problem}")
    e = eta(params, t, envelope)
    return 0j, e * a0, -e * b0, 0j


@dataclass(frozen=True)
class ClosedFormSolution:
    """First-order lab-frame solution.

    ``C0 = cos(A/2) - i eta z sin(A/2)`` and
    ``C1 = i exp(-i(omega t + phi)) [sin(A/2) - i eta conj(z) cos(A/2)]``
    with ``A = g0'(t) t`` the pulse area and ``z = exp(-2i(omega t + phi))``.
    The norm is ``1 + eta^2``.
    """

    params: FieldParams
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH

    def __post_init__(self):
        self.params.require_resonant()
        self.params.require_perturbative()

    def _parts(self, t):
        p = self.params
        t = np.asarray(t, dtype=float)
        half_area = 0.5 * np.asarray(average_rabi(p, t, self.envelope)) * t
        e = np.asarray(eta(p, t, self.envelope))
        theta = p.omega * t + p.phi
        return np.cos(half_area), np.sin(half_area), e, theta

    def c0(self, t):
        c, s, e, theta = self._parts(t)
        return c - 1j * e * np.exp(-2j * theta) * s

    def c1(self, t):
        c, s, e, theta = self._parts(t)
        return 1j * np.exp(-1j * theta) * (s - 1j * e * np.exp(2j * theta) * c)

    def p1(self, t):
        return np.abs(self.c1(t)) ** 2

    def norm_defect(self, t):
        return np.abs(np.abs(self.c0(t)) ** 2 + np.abs(self.c1(t)) ** 2 - 1.0)

    def state(self, t: float) -> QubitState:
        return QubitState(complex(self.c0(t)), complex(self.c1(t)), Frame.LAB, float(t))


def closed_form_state(
    params: FieldParams,
    t: float,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
) -> QubitState:
    """Lab-frame first-order state at ``t``; see :class:`ClosedFormSolution`."""
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t!r}")
    return ClosedFormSolution(params, envelope).state(t)


def solve_pulse_time(
    params: FieldParams,
    area: float,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
) -> float:
    """Smallest ``tau > 0`` with ``int_0^tau g0 = area``."""
    if not params.g0_max > 0:
        raise ValidationError("a pulse area can only be reached with g0_max > 0")
    if not area > 0:
        raise ValidationError(f"area must be > 0, got {area!r}")
    if envelope is DriveEnvelope.CONSTANT:
        return area / params.g0_max
    # area(tau) >= g0_max (tau - tau_sw); the extra tau_sw keeps f(upper) clear of rounding
    upper = area / params.g0_max + 2 * params.tau_sw
    return brentq(
        lambda tau: pulse_area(params, tau, envelope) - area,
        0.0,
        upper,
        xtol=1e-14,
        rtol=4 * np.finfo(float).eps,
        maxiter=200,
    )


def solve_pi_half_time(params: FieldParams, envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH) -> float:
    """Duration of a pi/2 pulse, ``g0'(tau) tau = pi/2``."""
    return solve_pulse_time(params, math.pi / 2, envelope)


def check_pi_half(params: FieldParams, tau: float, envelope: DriveEnvelope) -> None:
    achieved = pulse_area(params, tau, envelope)
    if abs(achieved - math.pi / 2) > PULSE_AREA_TOL:
        raise ValidationError(
            f"tau = {tau!r} is not a pi/2 pulse: area g0'(tau) tau = {achieved:.12g}, "
            f"expected pi/2 = {math.pi / 2:.12g}"
        )


def pi_half_population(
    params: FieldParams,
    tau: float,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
) -> float:
    """Excited population after a pi/2 pulse: ``[1 + 2 eta(tau) sin(2 omega tau + 2 phi)] / 2``."""
    params.require_resonant()
    params.require_perturbative()
    check_pi_half(params, tau, envelope)
    e = eta(params, tau, envelope)
    return 0.5 * (1.0 + 2.0 * e * math.sin(2.0 * (params.omega * tau + params.phi)))
