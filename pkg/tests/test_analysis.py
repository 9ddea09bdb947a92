import math

import numpy as np
import pytest

from bso_sim import (
    FieldParams,
    ValidationError,
    dominant_frequency,
    extract_bso,
    integrate,
    phase_sweep,
    rotation_error,
)
from bso_sim.analysis import (
    SweepParameter,
    SweepResult,
    eta_sweep,
    fit_phase_law,
    spectral_peak,
    time_sweep,
)
from bso_sim.core import pulse_area
from bso_sim.floquet import solve_pi_half_time
from conftest import CONSTANT, params_for_eta, two_rabi_periods


class TestExtractBso:
    def test_rwa_series_has_no_residual(self):
        p = FieldParams(0.4, 1.0)
        res = extract_bso(integrate(p, 30.0, envelope=CONSTANT, rwa=True))
        assert np.abs(res.residual).max() <= 1e-8

    def test_zero_field(self):
        res = extract_bso(integrate(FieldParams(0.0, 1.0), 30.0))
        assert not res.residual.any()
        assert res.relative_rms_error() == 0.0

    def test_rejects_mismatched_inputs(self, eta_tenth):
        series = integrate(eta_tenth, 10.0)
        with pytest.raises(ValidationError):
            extract_bso(series, params=eta_tenth.with_phase(1.0))
        with pytest.raises(ValidationError):
            extract_bso(series, envelope=CONSTANT)

    def test_residual_is_small_near_full_rotations(self, eta_tenth):
        res = extract_bso(integrate(eta_tenth, two_rabi_periods(eta_tenth)))
        # sin(A) = 0 at A = k pi: the first-order BSO vanishes there
        area = pulse_area(eta_tenth, res.times)
        near = np.abs(np.sin(area)) < 0.05
        assert near.any()
        assert np.abs(res.residual[near]).max() <= 10 * res.eta[near].max() ** 2

    def test_signs_follow_prediction(self, eta_tenth):
        res = extract_bso(integrate(eta_tenth, two_rabi_periods(eta_tenth)))
        assert res.sign_agreement() >= 0.9


class TestSpectralPeak:
    def test_synthetic_sine(self):
        t = np.arange(0, 200, 0.05)
        freq, width = spectral_peak(t, np.sin(2.0 * t))
        assert abs(freq - 2.0) <= width

    def test_rejects_bad_input(self):
        with pytest.raises(ValidationError):
            spectral_peak(np.arange(4.0), np.zeros(4))
        with pytest.raises(ValidationError):
            spectral_peak(np.array([0, 1, 2, 4, 5, 6, 7, 8.0]), np.zeros(8))

    def test_short_record_rejected(self, eta_tenth):
        res = extract_bso(integrate(eta_tenth, 20.0))
        with pytest.raises(ValidationError, match="cycles"):
            dominant_frequency(res)

    def test_long_record_shows_modulation_sidebands(self):
        # several Rabi half cycles flip the sign of sin(A), splitting the
        # carrier into 2 omega +/- g0
        p = FieldParams(0.4, 1.0, tau_sw=20.0)
        res = extract_bso(integrate(p, 80.0))
        freq = dominant_frequency(res)
        _, width = spectral_peak(res.times[:-1], res.residual[:-1])
        assert abs(freq - 2.0) > width


class TestPhaseLaw:
    def test_fit_recovers_synthetic_law(self):
        phis = math.pi * np.arange(32) / 32
        omega, tau = 1.0, 3.0
        values = 0.5 + 0.03 * np.sin(2 * omega * tau + 2 * phis + 0.4)
        fit = fit_phase_law(phis, values, omega, tau)
        assert fit.amplitude == pytest.approx(0.03, rel=1e-10)
        assert fit.mean == pytest.approx(0.5, abs=1e-12)
        assert fit.phase_offset == pytest.approx(0.4, abs=1e-10)
        assert fit.frequency == pytest.approx(2.0, abs=1e-6)
        assert fit.rms_residual <= 1e-12

    def test_rwa_limit(self):
        p = FieldParams(3e-3, 1.0, tau_sw=50.0)
        sweep = phase_sweep(p, n_points=16)
        assert sweep.fit.amplitude <= 1e-3
        assert abs(sweep.fit.mean - 0.5) <= 1e-3

    def test_rejects_wrong_tau_and_few_points(self):
        p = params_for_eta(0.05)
        with pytest.raises(ValidationError, match="area"):
            phase_sweep(p, tau=1.0)
        with pytest.raises(ValidationError):
            phase_sweep(p, n_points=4)

    def test_parallel_matches_serial(self):
        p = params_for_eta(0.1, tau_sw=20.0)
        serial = phase_sweep(p, n_points=8)
        parallel = phase_sweep(p, n_points=8, workers=2)
        np.testing.assert_array_equal(serial.observable, parallel.observable)


class TestSweeps:
    def test_values_must_increase(self):
        with pytest.raises(ValidationError):
            SweepResult(SweepParameter.TIME, np.array([1.0, 1.0]), np.zeros(2))

    def test_time_sweep_agrees_with_integrate(self, eta_tenth):
        times = np.array([5.0, 10.0, 17.5])
        sweep = time_sweep(eta_tenth, times)
        series = integrate(eta_tenth, 17.5)
        assert sweep.observable[-1] == pytest.approx(series.p1[-1], abs=1e-9)
        with pytest.raises(ValidationError):
            time_sweep(eta_tenth, [0.0, 1.0])

    def test_rotation_error_follows_eta(self):
        p = params_for_eta(0.05)
        err = rotation_error(p, n_points=16)
        assert err.tau == pytest.approx(solve_pi_half_time(p))
        assert err.worst_case == pytest.approx(err.eta_tau, rel=0.2)
        # a sampled sinusoid: rms is amplitude / sqrt(2)
        assert err.phase_averaged_rms == pytest.approx(err.worst_case / math.sqrt(2), rel=0.1)

    def test_eta_sweep_two_points(self):
        sweep = eta_sweep(FieldParams(0.1, 1.0, tau_sw=50.0), [0.02, 0.05], n_points=16)
        assert sweep.parameter is SweepParameter.ETA
        assert sweep.reference.shape == (2,)
        assert sweep.fit.slope == pytest.approx(1.0, abs=0.3)
