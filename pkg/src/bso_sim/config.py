"""Run configuration: a flat JSON schema, validation and named presets.

Schema (all angles in radians, frequencies angular, hbar = 1)::

    experiment     trajectory | bso_residual | phase_sweep | rotation_error
                   | floquet_compare | envelope
    g0_max, omega, phi, tau_sw, epsilon (null -> omega)
    envelope       adiabatic_switch | constant
    rel_tol, abs_tol, max_step (null -> auto), sample_dt (null -> auto)
    t_end          null -> two Rabi periods, 4 pi / g0_max
    tau            null -> solved pi/2 time (phase_sweep, rotation_error)
    n_points       phase samples on [0, pi)
    order          Floquet truncation order (floquet_compare)
    rwa            drop the counter-rotating term (trajectory)
    output_path, output_format (csv | json)
    seed           used by the randomized ``check`` command only
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .core import ETA_LIMIT, DriveEnvelope, FieldParams, ValidationError, pulse_area
from .dynamics import STEPS_PER_PERIOD, IntegratorConfig
from .floquet import MAX_ORDER, PULSE_AREA_TOL

#: Output sampling must give at least this many samples per drive period.
MIN_SAMPLES_PER_PERIOD = 8


class Experiment(str, enum.Enum):
    TRAJECTORY = "trajectory"
    BSO_RESIDUAL = "bso_residual"
    PHASE_SWEEP = "phase_sweep"
    ROTATION_ERROR = "rotation_error"
    FLOQUET_COMPARE = "floquet_compare"
    ENVELOPE = "envelope"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


# experiments whose outputs are compared against resonant analytical formulas
_RESONANT = {
    Experiment.BSO_RESIDUAL,
    Experiment.PHASE_SWEEP,
    Experiment.ROTATION_ERROR,
    Experiment.FLOQUET_COMPARE,
}
_PULSED = {Experiment.PHASE_SWEEP, Experiment.ROTATION_ERROR}


class ConfigError(ValidationError):
    """Malformed configuration file (unknown key, wrong type, bad JSON)."""


@dataclass(frozen=True)
class Violation:
    path: str
    reason: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.reason}"


@dataclass(frozen=True)
class RunConfig:
    experiment: Experiment = Experiment.TRAJECTORY
    g0_max: float = 0.4
    omega: float = 1.0
    phi: float = 0.0
    tau_sw: float = 50.0
    epsilon: float | None = None
    envelope: DriveEnvelope = DriveEnvelope.ADIABATIC_SWITCH
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None
    sample_dt: float | None = None
    t_end: float | None = None
    tau: float | None = None
    n_points: int = 32
    order: int = 1
    rwa: bool = False
    output_path: str = "output.csv"
    output_format: OutputFormat = OutputFormat.CSV
    seed: int = 0

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, enum.Enum):
                out[key] = value.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        kwargs = {}
        for key, value in data.items():
            kwargs[key] = _coerce(key, value)
        return cls(**kwargs)

    def field_params(self) -> FieldParams:
        return FieldParams(self.g0_max, self.omega, self.phi, self.tau_sw, self.epsilon)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.rel_tol, self.abs_tol, self.max_step, self.sample_dt)

    def resolved_t_end(self) -> float:
        if self.t_end is not None:
            return self.t_end
        if self.g0_max > 0:
            return 4 * math.pi / self.g0_max
        return 100.0 / self.omega


_ENUMS = {"experiment": Experiment, "envelope": DriveEnvelope, "output_format": OutputFormat}
_FLOATS = {"g0_max", "omega", "phi", "tau_sw", "rel_tol", "abs_tol"}
_OPTIONAL_FLOATS = {"epsilon", "max_step", "sample_dt", "t_end", "tau"}
_INTS = {"n_points", "order", "seed"}


def _coerce(key, value):
    if key in _ENUMS:
        try:
            return _ENUMS[key](value)
        except ValueError:
            choices = ", ".join(m.value for m in _ENUMS[key])
            raise ConfigError(f"{key}: {value!r} is not one of {choices}") from None
    if key in _OPTIONAL_FLOATS and value is None:
        return None
    if key in _FLOATS | _OPTIONAL_FLOATS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if key in _INTS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if key == "rwa":
        if not isinstance(value, bool):
            raise ConfigError(f"rwa: expected true/false, got {value!r}")
        return value
    if key == "output_path":
        if not isinstance(value, str) or not value:
            raise ConfigError(f"output_path: expected a non-empty string, got {value!r}")
        return value
    raise ConfigError(f"unhandled key {key!r}")  # pragma: no cover


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return RunConfig.from_dict(data)


def dump_config(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"


def save_config(config: RunConfig, path) -> None:
    Path(path).write_text(dump_config(config))


def _positive(value) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value) and value > 0


def validate(config: RunConfig) -> list[Violation]:
    """Every invariant the run would rely on; empty iff the config is clean.

    Violations with severity ``"warning"`` (adiabaticity) do not block a run.
    """
    out: list[Violation] = []

    def bad(path, reason, severity="error"):
        out.append(Violation(path, reason, severity))

    if not (math.isfinite(config.g0_max) and config.g0_max >= 0):
        bad("g0_max", f"must be finite and >= 0, got {config.g0_max!r}")
    for name in ("omega", "tau_sw"):
        if not _positive(getattr(config, name)):
            bad(name, f"must be > 0, got {getattr(config, name)!r}")
    if config.epsilon is not None and not _positive(config.epsilon):
        bad("epsilon", f"must be > 0, got {config.epsilon!r}")
    if not math.isfinite(config.phi):
        bad("phi", f"must be finite, got {config.phi!r}")
    if out:
        return out  # the remaining checks need sane field values
    params = config.field_params()

    if params.eta0 >= ETA_LIMIT:
        bad("g0_max", f"eta0 = g0_max/(4 omega) = {params.eta0:.6g} must be < {ETA_LIMIT}")
    if config.experiment in _RESONANT and not params.is_resonant:
        bad("epsilon", f"{config.experiment.value} needs resonance (epsilon == omega)")
    if config.envelope is DriveEnvelope.ADIABATIC_SWITCH:
        problem = params.adiabaticity_violation()
        if problem:
            bad("tau_sw", f"adiabatic switching not satisfied: {problem}", "warning")

    period = 2 * math.pi / config.omega
    for name in ("rel_tol", "abs_tol"):
        value = getattr(config, name)
        if not (math.isfinite(value) and 0 < value <= 1e-6):
            bad(name, f"must lie in (0, 1e-6], got {value!r}")
    if config.max_step is not None and not (0 < config.max_step <= period / STEPS_PER_PERIOD):
        bad("max_step", f"must lie in (0, (2 pi/omega)/{STEPS_PER_PERIOD} = {period / STEPS_PER_PERIOD:.6g}]")
    if config.sample_dt is not None and not (0 < config.sample_dt <= period / MIN_SAMPLES_PER_PERIOD):
        bad(
            "sample_dt",
            f"must lie in (0, (2 pi/omega)/{MIN_SAMPLES_PER_PERIOD} = "
            f"{period / MIN_SAMPLES_PER_PERIOD:.6g}] to resolve the 2 omega oscillation",
        )
    if config.t_end is not None and not _positive(config.t_end):
        bad("t_end", f"must be > 0, got {config.t_end!r}")

    if config.experiment in _PULSED:
        if config.g0_max <= 0:
            bad("g0_max", "a pi/2 pulse needs g0_max > 0")
        elif config.tau is not None:
            if not _positive(config.tau):
                bad("tau", f"must be > 0, got {config.tau!r}")
            else:
                area = pulse_area(params, config.tau, config.envelope)
                if abs(area - math.pi / 2) > PULSE_AREA_TOL:
                    bad("tau", f"not a pi/2 pulse: area = {area:.12g}, expected {math.pi / 2:.12g}")
        if config.n_points < 8:
            bad("n_points", f"must be >= 8, got {config.n_points}")
    if not 1 <= config.order <= MAX_ORDER:
        bad("order", f"must lie in [1, {MAX_ORDER}], got {config.order}")
    if config.rwa and config.experiment is not Experiment.TRAJECTORY:
        bad("rwa", "only the trajectory experiment supports rwa=true")
    return out


def errors(violations: list[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity == "error"]


_FIG1 = RunConfig(g0_max=0.4, omega=1.0, phi=0.0, tau_sw=20.0, t_end=80.0)
_ETA_TENTH = RunConfig(g0_max=0.4, omega=1.0, phi=0.0, tau_sw=50.0)

PRESETS: dict[str, tuple[RunConfig, ...]] = {
    "default": (replace(_ETA_TENTH, output_path="trajectory.csv"),),
    "fig1-right": (
        replace(_FIG1, experiment=Experiment.TRAJECTORY, output_path="trajectory.csv"),
        replace(_FIG1, experiment=Experiment.BSO_RESIDUAL, output_path="residual.csv"),
        replace(_FIG1, experiment=Experiment.ENVELOPE, output_path="envelope.csv"),
        replace(_FIG1, experiment=Experiment.PHASE_SWEEP, output_path="phase_sweep.csv"),
    ),
    "bso-residual": (replace(_ETA_TENTH, experiment=Experiment.BSO_RESIDUAL, output_path="residual.csv"),),
    "phase-sweep": (
        replace(
            _ETA_TENTH,
            g0_max=0.2,
            experiment=Experiment.PHASE_SWEEP,
            output_path="phase_sweep.json",
            output_format=OutputFormat.JSON,
        ),
    ),
    "rotation-error": (
        replace(
            _ETA_TENTH,
            experiment=Experiment.ROTATION_ERROR,
            output_path="rotation_error.json",
            output_format=OutputFormat.JSON,
        ),
    ),
    "floquet-compare": (
        replace(
            _ETA_TENTH,
            experiment=Experiment.FLOQUET_COMPARE,
            t_end=3 * 50.0 + 4 * math.pi / 0.4,
            output_path="floquet_compare.csv",
        ),
    ),
}
