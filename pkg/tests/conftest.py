import math

import pytest

from bso_sim import DriveEnvelope, FieldParams

SWITCH = DriveEnvelope.ADIABATIC_SWITCH
CONSTANT = DriveEnvelope.CONSTANT

# (criterion, passed, detail) rows filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def params_for_eta(eta0, omega=1.0, phi=0.0, tau_sw=50.0):
    return FieldParams(g0_max=4 * omega * eta0, omega=omega, phi=phi, tau_sw=tau_sw)


@pytest.fixture
def eta_tenth():
    """eta0 = 0.1 on resonance with the slow switch used throughout the tests."""
    return params_for_eta(0.1)


def two_rabi_periods(params):
    return 4 * math.pi / params.g0_max


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
