"""Bloch-Siegert oscillation (BSO) extraction, sweeps and error budget.

The BSO is what remains of the exact excited population after subtracting
the RWA Rabi curve ``sin^2(A/2)``. To first order it is
``eta(t) sin(A) sin(2(omega t + phi))``: a carrier at twice the drive
frequency under an envelope that vanishes whenever ``A = k pi``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import argrelextrema
from scipy.stats import linregress

from .core import DriveEnvelope, FieldParams, ValidationError, eta, pulse_area
from .dynamics import IntegratorConfig, RotatingHamiltonian, TimeSeries, _solve, evolve_to, rabi_reference
from .floquet import check_pi_half, solve_pi_half_time

MIN_CYCLES = 16
MIN_PHASE_POINTS = 8


@dataclass(frozen=True, eq=False)
class BsoResidual:
    times: np.ndarray
    p1: np.ndarray
    rabi_reference: np.ndarray
    residual: np.ndarray
    predicted: np.ndarray
    eta: np.ndarray
    params: FieldParams
    envelope: DriveEnvelope

    def relative_rms_error(self) -> float:
        """``RMS(residual - predicted) / RMS(predicted)``."""
        scale = np.sqrt(np.mean(self.predicted**2))
        if scale == 0:
            return 0.0 if not np.any(self.residual) else math.inf
        return float(np.sqrt(np.mean((self.residual - self.predicted) ** 2)) / scale)

    def sign_agreement(self) -> float:
        """Fraction of extrema of ``predicted`` where ``residual`` has the same sign."""
        idx = np.concatenate(
            (argrelextrema(self.predicted, np.greater)[0], argrelextrema(self.predicted, np.less)[0])
        )
        if idx.size == 0:
            return 1.0
        return float(np.mean(np.sign(self.residual[idx]) == np.sign(self.predicted[idx])))


def extract_bso(
    series: TimeSeries,
    params: FieldParams | None = None,
    envelope: DriveEnvelope | None = None,
) -> BsoResidual:
    """Subtract the RWA Rabi curve from ``series`` and attach the first-order prediction."""
    if params is not None and params != series.params:
        raise ValidationError("params do not match the ones the series was integrated with")
    if envelope is not None and envelope is not series.envelope:
        raise ValidationError("envelope does not match the one the series was integrated with")
    p, env, t = series.params, series.envelope, series.times
    reference = rabi_reference(p, t, env)
    e = np.asarray(eta(p, t, env))
    predicted = e * np.sin(np.asarray(pulse_area(p, t, env))) * np.sin(2.0 * (p.omega * t + p.phi))
    p1 = series.p1
    return BsoResidual(t, p1, reference, p1 - reference, predicted, e, p, env)


def spectral_peak(times, signal) -> tuple[float, float]:
    """Angular frequency of the strongest non-DC peak and the bin width.

    The mean is removed, a Hann window applied, and the peak refined by
    quadratic interpolation of the log magnitude over three bins.
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if times.size < 8 or times.size != signal.size:
        raise ValidationError("need at least 8 samples with matching times")
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0):
        raise ValidationError("spectral analysis needs uniform sampling")
    n = times.size
    spectrum = np.abs(np.fft.rfft((signal - signal.mean()) * np.hanning(n)))
    k = int(np.argmax(spectrum[1:-1])) + 1
    left, mid, right = np.log(np.maximum(spectrum[k - 1 : k + 2], np.finfo(float).tiny))
    denom = left - 2 * mid + right
    offset = 0.5 * (left - right) / denom if denom != 0 else 0.0
    bin_width = 2 * math.pi / (n * dt)
    return (k + offset) * bin_width, bin_width


def _uniform_prefix(times: np.ndarray) -> int:
    dt = times[1] - times[0]
    if times.size > 2 and not math.isclose(times[-1] - times[-2], dt, rel_tol=1e-9):
        return times.size - 1
    return times.size


def dominant_frequency(residual: BsoResidual, min_cycles: int = MIN_CYCLES) -> float:
    """Angular frequency of the dominant spectral peak of the BSO residual.

    The record must span at least ``min_cycles`` periods of ``2 omega``. A
    trailing sample that breaks uniform spacing is dropped.

    Only records in which ``sin(A)`` keeps one sign (a single Rabi half
    cycle) peak at ``2 omega``; longer records show the amplitude-modulation
    sidebands ``2 omega +/- g0``.
    """
    m = _uniform_prefix(residual.times)
    times, values = residual.times[:m], residual.residual[:m]
    span = times[-1] - times[0] + (times[1] - times[0])
    cycles = residual.params.omega * span / math.pi
    if cycles < min_cycles:
        raise ValidationError(
            f"record holds {cycles:.3g} cycles of 2 omega; at least {min_cycles} are required"
        )
    return spectral_peak(times, values)[0]


class SweepParameter(str, enum.Enum):
    PHASE = "phase"
    TIME = "time"
    ETA = "eta"


@dataclass(frozen=True)
class SinusoidFit:
    """``mean + amplitude * sin(2 omega tau + 2 phi + phase_offset)``.

    ``frequency`` is the best-fit angular frequency in ``phi`` when it is
    left free; the other fields come from the fit at frequency 2.
    """

    amplitude: float
    frequency: float
    phase_offset: float
    mean: float
    rms_residual: float


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True, eq=False)
class SweepResult:
    parameter: SweepParameter
    values: np.ndarray
    observable: np.ndarray
    fit: SinusoidFit | LinearFit | None = None
    reference: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.values) <= 0):
            raise ValidationError("sweep values must be strictly increasing")


def _wrap(angle: float) -> float:
    return math.remainder(angle, 2 * math.pi)


def _harmonic_lstsq(x, y, k):
    design = np.column_stack((np.ones_like(x), np.sin(k * x), np.cos(k * x)))
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coef, y - design @ coef


def fit_phase_law(phis, values, omega: float = 0.0, tau: float = 0.0) -> SinusoidFit:
    """Fit ``values(phi)`` to ``mean + A sin(2 omega tau + 2 phi + delta)``.

    Amplitude, mean and offset use linear least squares at the fixed
    frequency 2. The frequency is then also estimated by minimising the
    residual of the same linear fit over a free frequency ``k``.
    """
    x = np.asarray(phis, dtype=float)
    y = np.asarray(values, dtype=float)
    (mean, s, c), resid = _harmonic_lstsq(x, y, 2.0)
    amplitude = math.hypot(s, c)
    offset = _wrap(math.atan2(c, s) - 2.0 * omega * tau)

    def rss(k):
        return float(np.sum(_harmonic_lstsq(x, y, k)[1] ** 2))

    grid = np.linspace(1.0, 3.0, 201)
    k0 = grid[int(np.argmin([rss(k) for k in grid]))]
    best = minimize_scalar(rss, bounds=(k0 - 0.01, k0 + 0.01), method="bounded", options={"xatol": 1e-10})
    return SinusoidFit(amplitude, float(best.x), offset, float(mean), float(np.sqrt(np.mean(resid**2))))


def _final_p1(job) -> float:
    params, tau, envelope, cfg = job
    return evolve_to(params, tau, envelope=envelope, cfg=cfg).p1


def _ordered_map(fn, jobs, workers: int | None):
    if workers is None or workers <= 1:
        return [fn(job) for job in jobs]
    # Executor.map yields in submission order regardless of completion order
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def phase_sweep(
    params: FieldParams,
    tau: float | None = None,
    *,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
    n_points: int = 32,
    cfg: IntegratorConfig | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Exact ``p1`` after a pi/2 pulse for ``n_points`` phases uniform on ``[0, pi)``.

    ``tau`` defaults to the solved pi/2 time and must satisfy the pulse-area
    condition otherwise.
    """
    if n_points < MIN_PHASE_POINTS:
        raise ValidationError(f"n_points must be >= {MIN_PHASE_POINTS}, got {n_points}")
    if tau is None:
        tau = solve_pi_half_time(params, envelope)
    check_pi_half(params, tau, envelope)
    phis = math.pi * np.arange(n_points) / n_points
    jobs = [(params.with_phase(float(phi)), tau, envelope, cfg) for phi in phis]
    p1 = np.array(_ordered_map(_final_p1, jobs, workers))
    fit = fit_phase_law(phis, p1, params.omega, tau)
    return SweepResult(
        SweepParameter.PHASE,
        phis,
        p1,
        fit,
        meta={"tau": tau, "eta_tau": eta(params, tau, envelope)},
    )


def time_sweep(
    params: FieldParams,
    times,
    *,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
    cfg: IntegratorConfig | None = None,
) -> SweepResult:
    """Exact ``p1`` at arbitrary interaction times from a single integration."""
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] <= 0:
        raise ValidationError("interaction times must be > 0")
    cfg = (cfg or IntegratorConfig()).resolve(params.omega)
    sol = _solve(RotatingHamiltonian(params, envelope).rhs(), [1.0, 0.0], 0.0, times[-1], cfg, t_eval=times)
    return SweepResult(SweepParameter.TIME, times, np.abs(sol.y[1]) ** 2)


@dataclass(frozen=True, eq=False)
class RotationError:
    """Deviation of the pi/2-pulse population from 1/2 over the field phase."""

    worst_case: float
    phase_averaged_rms: float
    tau: float
    eta_tau: float
    sweep: SweepResult


def rotation_error(
    params: FieldParams,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
    *,
    n_points: int = 32,
    cfg: IntegratorConfig | None = None,
    workers: int | None = None,
) -> RotationError:
    sweep = phase_sweep(params, envelope=envelope, n_points=n_points, cfg=cfg, workers=workers)
    deviation = sweep.observable - 0.5
    return RotationError(
        worst_case=float(np.max(np.abs(deviation))),
        phase_averaged_rms=float(np.sqrt(np.mean(deviation**2))),
        tau=sweep.meta["tau"],
        eta_tau=sweep.meta["eta_tau"],
        sweep=sweep,
    )


def eta_sweep(
    params: FieldParams,
    eta0_values,
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH,
    *,
    n_points: int = 32,
    cfg: IntegratorConfig | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Worst-case rotation error against ``eta0`` (``g0_max = 4 omega eta0``).

    ``reference`` holds ``eta(tau)`` at each pi/2 time and the linear fit is
    worst case against that reference, i.e. in units of eta.
    """
    eta0_values = np.asarray(eta0_values, dtype=float)
    errors = [
        rotation_error(
            FieldParams(4 * params.omega * e0, params.omega, params.phi, params.tau_sw, params.epsilon),
            envelope,
            n_points=n_points,
            cfg=cfg,
            workers=workers,
        )
        for e0 in eta0_values
    ]
    worst = np.array([r.worst_case for r in errors])
    ref = np.array([r.eta_tau for r in errors])
    reg = linregress(ref, worst)
    return SweepResult(
        SweepParameter.ETA,
        eta0_values,
        worst,
        LinearFit(float(reg.slope), float(reg.intercept), float(reg.rvalue**2)),
        reference=ref,
        meta={"phase_averaged_rms": [r.phase_averaged_rms for r in errors]},
    )
