import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bso_sim import (
    ClosedFormSolution,
    FieldParams,
    FloquetState,
    Frame,
    ValidationError,
    adiabatic_coefficients,
    closed_form_state,
    eta,
    integrate,
    integrate_modes,
    mode_rhs,
    pi_half_population,
    solve_pi_half_time,
)
from bso_sim.core import pulse_area
from bso_sim.floquet import solve_pulse_time
from conftest import CONSTANT, params_for_eta, two_rabi_periods


class TestFloquetState:
    def test_ground(self):
        s = FloquetState.ground(2)
        assert s.coefficient(0) == (1, 0)
        assert s.coefficient(5) == (0, 0)
        np.testing.assert_array_equal(s.harmonics, [-2, -1, 0, 1, 2])

    def test_shape_and_order_checked(self):
        with pytest.raises(ValidationError):
            FloquetState(1, np.zeros(5), np.zeros(3))
        with pytest.raises(ValidationError):
            FloquetState.ground(0)

    def test_reconstruct_sums_harmonics(self):
        p = FieldParams(0.4, 1.0, phi=0.2)
        s = FloquetState(1, np.array([0, 1, 0.5]), np.array([0.1, 0, 0]))
        t = 0.7
        z = np.exp(-2j * (t + 0.2))
        r = s.reconstruct(p, t)
        assert r.frame is Frame.ROTATING
        assert r.c0 == pytest.approx(1 + 0.5 * z)
        assert r.c1 == pytest.approx(0.1 / z)


class TestModeRhs:
    def test_zero_state(self):
        zero = FloquetState(1, np.zeros(3, complex), np.zeros(3, complex))
        d = mode_rhs(zero, 3.0, FieldParams(0.4, 1.0))
        assert not d.a.any() and not d.b.any()

    def test_hand_evaluated(self):
        d = mode_rhs(FloquetState.ground(1), 1.0, FieldParams(0.4, 1.0), CONSTANT)
        assert d.coefficient(0)[1] == pytest.approx(0.2j)
        assert d.coefficient(-1)[1] == pytest.approx(0.2j)
        assert d.coefficient(1) == (0, 0)
        assert d.coefficient(0)[0] == 0

    def test_rotation_terms(self):
        s = FloquetState(1, np.array([0, 0, 1], complex), np.zeros(3, complex))
        d = mode_rhs(s, 0.0, FieldParams(0.0, 1.5))
        assert d.coefficient(1)[0] == pytest.approx(3j)


class TestIntegrateModes:
    def test_zero_field(self):
        traj = integrate_modes(FieldParams(0.0, 1.0), 20.0)
        a0, b0 = traj.sideband(0)
        assert np.all(a0 == 1)
        assert not b0.any()
        assert not traj.sideband(-1)[1].any()

    def test_matches_oracle(self, eta_tenth):
        t_end = two_rabi_periods(eta_tenth)
        traj = integrate_modes(eta_tenth, t_end)
        exact = integrate(eta_tenth, t_end)
        assert np.max(np.abs(traj.p1 - exact.p1)) <= 5 * 0.1**2

    @pytest.mark.parametrize("eta0", [0.05, 0.1])
    def test_second_order_changes_little(self, eta0):
        p = params_for_eta(eta0)
        t_end = two_rabi_periods(p)
        n1 = integrate_modes(p, t_end, order=1)
        n2 = integrate_modes(p, t_end, order=2)
        # O(eta^3), measured at most 1.6 eta0^3 in this range
        assert np.max(np.abs(n1.p1 - n2.p1)) <= 5 * eta0**3

    def test_sideband_hierarchy(self, eta_tenth):
        t_end = 3 * eta_tenth.tau_sw + two_rabi_periods(eta_tenth)
        traj = integrate_modes(eta_tenth, t_end, order=2)
        for n in (-2, 2):
            a, b = traj.sideband(n)
            assert np.abs(a).max() <= 0.1**2 and np.abs(b).max() <= 0.1**2
        # first sidebands are O(eta): b_-1 follows eta a_0 once the drive is on
        assert np.abs(traj.sideband(-1)[1]).max() == pytest.approx(0.1, rel=0.2)

    @pytest.mark.parametrize("order,bound", [(1, 5 * 0.1**3), (3, 1e-6), (4, 1e-6)])
    def test_reconstruction_norm(self, eta_tenth, order, bound):
        traj = integrate_modes(eta_tenth, two_rabi_periods(eta_tenth), order=order)
        assert traj.norm_defect.max() <= bound

    def test_rejects_bad_order(self, eta_tenth):
        with pytest.raises(ValidationError):
            integrate_modes(eta_tenth, 10.0, order=0)


class TestAdiabaticCoefficients:
    params = FieldParams(0.4, 1.0, tau_sw=50.0)

    def test_examples(self):
        assert adiabatic_coefficients(1, 0, self.params, 1.0, CONSTANT) == pytest.approx((0, 0.1, 0, 0))
        assert adiabatic_coefficients(0, 1, self.params, 1.0, CONSTANT) == pytest.approx((0, 0, -0.1, 0))

    def test_uses_instantaneous_eta(self):
        _, b, _, _ = adiabatic_coefficients(1, 0, self.params, 50.0)
        assert b == pytest.approx(0.1 * (1 - math.exp(-1)))

    def test_rejects_strong_drive(self):
        with pytest.raises(ValidationError, match="eta"):
            adiabatic_coefficients(1, 0, FieldParams(1.0, 1.0, tau_sw=50.0), 1.0, CONSTANT)

    def test_rejects_fast_switch(self):
        with pytest.raises(ValidationError, match="adiabatic"):
            adiabatic_coefficients(1, 0, FieldParams(0.4, 1.0, tau_sw=5.0), 10.0)

    def test_agrees_with_mode_integration(self):
        p = self.params
        t_end = 3 * p.tau_sw + two_rabi_periods(p)
        traj = integrate_modes(p, t_end)
        late = traj.times >= 3 * p.tau_sw
        a0, b0 = (x[late] for x in traj.sideband(0))
        am, bm = (x[late] for x in traj.sideband(-1))
        ap, bp = (x[late] for x in traj.sideband(1))
        est = adiabatic_coefficients(a0, b0, p, traj.times[late])
        for got, want in zip((am, bm, ap, bp), est):
            assert np.abs(got - want).max() <= 5 * 0.1**2


class TestClosedForm:
    def test_initial_state(self, eta_tenth):
        s = closed_form_state(eta_tenth, 0.0)
        assert (s.c0, s.c1, s.frame) == (1, 0, Frame.LAB)

    def test_rwa_limit(self):
        p = FieldParams(0.0, 1.0, phi=0.3)
        sol = ClosedFormSolution(p)
        t = np.linspace(0, 40, 9)
        np.testing.assert_allclose(sol.c1(t), 0, atol=0)
        # the correction to pure Rabi is bounded by eta itself
        p = FieldParams(1e-3, 1.0, phi=0.3)
        t = np.linspace(0, 4000, 41)
        rabi = 1j * np.exp(-1j * (t + 0.3)) * np.sin(0.5 * pulse_area(p, t))
        assert np.all(np.abs(ClosedFormSolution(p).c1(t) - rabi) <= eta(p, t) + 1e-15)

    def test_constant_pi_half(self):
        p = FieldParams(0.4, 1.0)
        tau = math.pi / 0.8
        assert abs(closed_form_state(p, tau, CONSTANT).p1 - 0.5 * (1 + 0.2 * math.sin(2 * tau))) <= 0.1**2

    @given(st.floats(0.0, 0.2), st.floats(0, 2 * math.pi), st.floats(0, 500))
    def test_norm_defect_bound(self, eta0, phi, t):
        p = params_for_eta(eta0, phi=phi)
        assert ClosedFormSolution(p).norm_defect(t) <= 4 * eta(p, t) ** 2 + 1e-15

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            closed_form_state(FieldParams(0.4, 1.0, epsilon=1.1), 1.0)
        with pytest.raises(ValidationError):
            closed_form_state(FieldParams(1.2, 1.0), 1.0)
        with pytest.raises(ValidationError):
            closed_form_state(FieldParams(0.4, 1.0), -1.0)

    def test_phase_average_is_half(self):
        phis = np.arange(64) * math.pi / 64
        pops = []
        for phi in phis:
            p = params_for_eta(0.05, phi=phi)
            pops.append(closed_form_state(p, solve_pi_half_time(p)).p1)
        assert abs(np.mean(pops) - 0.5) <= 1e-3


class TestPiHalf:
    def test_constant_time(self):
        assert solve_pi_half_time(FieldParams(0.4, 1.0), CONSTANT) == pytest.approx(math.pi / 0.8, rel=1e-15)

    def test_switched_times(self):
        p = FieldParams(0.4, 1.0, tau_sw=20.0)
        tau = solve_pi_half_time(p)
        # frozen from an independent bisection on the quadrature area
        assert tau == pytest.approx(13.99063128527257, rel=1e-10)
        assert 0.4 * (tau - 20 * (1 - math.exp(-tau / 20))) == pytest.approx(math.pi / 2, rel=1e-10)
        assert solve_pulse_time(p, math.pi) == pytest.approx(20.776619059446098, rel=1e-10)

    @given(st.floats(0.01, 0.9), st.floats(1.0, 200.0))
    def test_monotone_in_amplitude(self, gmax, tau_sw):
        weak = FieldParams(gmax, 1.0, tau_sw=tau_sw)
        strong = FieldParams(2 * gmax, 1.0, tau_sw=tau_sw)
        assert solve_pi_half_time(strong) < solve_pi_half_time(weak)

    def test_zero_field_rejected(self):
        with pytest.raises(ValidationError):
            solve_pi_half_time(FieldParams(0.0, 1.0))

    def test_rwa_value(self):
        p = FieldParams(1e-300, 1.0)
        assert pi_half_population(p, solve_pi_half_time(p, CONSTANT), CONSTANT) == 0.5

    @pytest.mark.parametrize("target,expected", [(math.pi / 2, 0.55), (3 * math.pi / 2, 0.45)])
    def test_extremes(self, target, expected):
        p = FieldParams(0.2, 1.0)
        tau = solve_pi_half_time(p, CONSTANT)
        phi = (target - 2 * tau) / 2
        assert pi_half_population(p.with_phase(phi), tau, CONSTANT) == pytest.approx(expected, abs=1e-14)

    @given(st.floats(-10, 10))
    def test_period_pi_in_phase(self, phi):
        p = params_for_eta(0.05, phi=phi)
        tau = solve_pi_half_time(p)
        a = pi_half_population(p, tau)
        b = pi_half_population(p.with_phase(phi + math.pi), tau)
        assert a == pytest.approx(b, abs=1e-12)

    def test_wrong_area_names_achieved_area(self):
        with pytest.raises(ValidationError, match="area"):
            pi_half_population(FieldParams(0.4, 1.0), 1.0, CONSTANT)
