"""Flat key-value configuration with dotted sections.

Files contain `key = value` lines, `#` comments and blank lines.  Every key
must appear in the schema; energies are entered in GHz and times in ns
(conversion to angular units happens in the scenario builders).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .schedule import SCHEDULE_FORMS


class ConfigError(Exception):
    exit_code = 2


class ConfigFileError(ConfigError):
    """Missing or unreadable config file."""
    exit_code = 2


class ConfigSchemaError(ConfigError):
    """Unknown key, bad syntax, or untypable value."""
    exit_code = 4


class ConfigPhysicsError(ConfigError):
    """Syntactically valid but physically inadmissible value."""
    exit_code = 5


@dataclass(frozen=True)
class _Key:
    default: object
    help: str
    type: type = float


SCHEMA = {
    "output.directory": _Key("", "output directory; empty = $FLUXSIM_OUT or ./out", str),

    "numerics.dt": _Key(0.05, "time step for time-dependent propagation (ns)"),
    "numerics.snapshot_stride": _Key(40, "keep one snapshot every N steps", int),
    "numerics.dense_threshold": _Key(5000, "max dimension for the dense spectral path", int),

    "ramsey.t_max": _Key(100.0, "simulated window for the Ramsey scenario (ns)"),
    "ramsey.sample_dt": _Key(0.05, "output sampling step for Ramsey traces (ns)"),
    "single.e_qubit_1": _Key(6.6, "energy of the clockwise loop-current state (GHz)"),
    "single.e_qubit_2": _Key(0.0, "energy of the anticlockwise loop-current state (GHz)"),
    "single.e_warp_1": _Key(6.6, "energy of the clockwise warp-region state (GHz)"),
    "single.e_warp_2": _Key(0.0, "energy of the anticlockwise warp-region state (GHz)"),
    "single.v_loc_1": _Key(0.5, "loop-warp hybridization, clockwise sector (GHz)"),
    "single.v_loc_2": _Key(0.5, "loop-warp hybridization, anticlockwise sector (GHz)"),
    "single.omega_photon": _Key(6.6, "photon energy (GHz)"),
    "single.v_dipole": _Key(0.15, "dipole element between the two loop currents (GHz)"),
    "single.band.n_modes": _Key(200, "modes per continuum band", int),
    "single.band.center": _Key(0.0, "band center relative to its warp state (GHz)"),
    "single.band.halfwidth": _Key(0.8, "band halfwidth (GHz); calibrated, see docs"),
    "single.band.lifetime": _Key(16.0, "target embedded-state lifetime fixing W (ns)"),

    "anneal.t_f": _Key(2000.0, "annealing time; transverse fields reach 0 here (ns)"),
    "anneal.h0": _Key(1.0, "starting transverse-field amplitude, all qubits (GHz)"),
    "anneal.form": _Key("linear", "schedule form: linear or cosine", str),
    "anneal.j_ring": _Key(0.2, "ring couplings J12=J23=J34=J41 (GHz); calibrated"),
    "anneal.j_chord": _Key(0.38, "chord coupling J13 (GHz); calibrated"),
    "anneal.n_lowest": _Key(8, "eigenstates tracked in population traces", int),
    "anneal.spectrum_samples": _Key(201, "time-grid points for the spectrum trace", int),

    "phonon.omega": _Key(0.6, "phonon frequency (GHz); calibrated"),
    "phonon.coupling": _Key(0.6, "qubit-phonon coupling (GHz); calibrated"),
    "phonon.switch_on": _Key(400.0, "center of the phonon switch-on window (ns)"),
    "phonon.ramp": _Key(50.0, "width of the smooth switch-on ramp (ns)"),
    "phonon.n_max": _Key(1, "phonon Fock-space truncation", int),
    "phonon.qubit": _Key(3, "qubit the phonon couples to", int),

    "gravonon.n_modes": _Key(200, "modes in the annealer continuum band", int),
    "gravonon.center": _Key(26.0, "band center (GHz); far-detuned, calibrated"),
    "gravonon.halfwidth": _Key(1.0, "band halfwidth (GHz)"),
    "gravonon.coupling": _Key(0.4266145801540309,
                              "per-mode coupling W (GHz, 0 allowed); calibrated"),
    "gravonon.coupled_qubit": _Key(3, "qubit the band couples to", int),
    "gravonon.direction": _Key(1, "current direction gating the scattering", int),
}


@dataclass
class ScenarioConfig:
    """Validated configuration: schema defaults overlaid with file values."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str):
        return self.values[key]

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        merged = dict(self.values)
        for key, raw in overrides.items():
            merged[key] = _coerce(key, raw)
        cfg = ScenarioConfig(values=merged)
        validate_physics(cfg)
        return cfg


def _coerce(key: str, raw):
    if key not in SCHEMA:
        raise ConfigSchemaError(f"unknown config key {key!r}")
    spec = SCHEMA[key]
    if isinstance(raw, str):
        raw = raw.strip()
        try:
            if spec.type is int:
                return int(raw)
            if spec.type is float:
                return float(raw)
        except ValueError as exc:
            raise ConfigSchemaError(f"{key}: cannot parse {raw!r} as {spec.type.__name__}") from exc
        return raw
    if spec.type in (int, float):
        return spec.type(raw)
    return raw


def default_config() -> ScenarioConfig:
    return ScenarioConfig(values={k: s.default for k, s in SCHEMA.items()})


def validate_physics(cfg: ScenarioConfig):
    v = cfg.values
    checks = [
        (v["numerics.dt"] > 0, "numerics.dt must be positive"),
        (v["numerics.snapshot_stride"] >= 1, "numerics.snapshot_stride must be >= 1"),
        (v["ramsey.t_max"] > 0, "ramsey.t_max must be positive"),
        (v["ramsey.sample_dt"] > 0, "ramsey.sample_dt must be positive"),
        (v["single.band.n_modes"] >= 1, "single.band.n_modes must be positive"),
        (v["single.band.halfwidth"] > 0, "single.band.halfwidth must be positive"),
        (v["single.band.lifetime"] > 0, "single.band.lifetime must be positive"),
        (v["anneal.t_f"] > 0, "anneal.t_f must be positive"),
        (v["anneal.h0"] >= 0, "anneal.h0 must be non-negative"),
        (v["anneal.form"] in SCHEDULE_FORMS, f"anneal.form must be one of {SCHEDULE_FORMS}"),
        (v["anneal.n_lowest"] >= 1, "anneal.n_lowest must be >= 1"),
        (v["anneal.spectrum_samples"] >= 3, "anneal.spectrum_samples must be >= 3"),
        (v["phonon.ramp"] >= 0, "phonon.ramp must be non-negative"),
        (v["phonon.n_max"] >= 1, "phonon.n_max must be >= 1"),
        (1 <= v["phonon.qubit"] <= 4, "phonon.qubit must be in 1..4"),
        (v["gravonon.n_modes"] >= 1, "gravonon.n_modes must be positive"),
        (v["gravonon.halfwidth"] > 0, "gravonon.halfwidth must be positive"),
        (v["gravonon.coupling"] >= 0, "gravonon.coupling must be non-negative"),
        (1 <= v["gravonon.coupled_qubit"] <= 4, "gravonon.coupled_qubit must be in 1..4"),
        (v["gravonon.direction"] in (1, -1), "gravonon.direction must be +1 or -1"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigPhysicsError(message)


def parse_config(path) -> ScenarioConfig:
    """Parse and validate a config file; missing keys take their defaults."""
    path = Path(path)
    if not path.is_file():
        raise ConfigFileError(f"config file not found: {path}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigFileError(f"cannot read {path}: {exc}") from exc

    values = {k: s.default for k, s in SCHEMA.items()}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigSchemaError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        try:
            values[key] = _coerce(key, raw)
        except ConfigSchemaError as exc:
            raise ConfigSchemaError(f"{path}:{lineno}: {exc}") from exc

    cfg = ScenarioConfig(values=values)
    validate_physics(cfg)
    return cfg


def dump_default_config() -> str:
    """Annotated default config, parseable back to the defaults."""
    lines = ["# fluxsim default configuration",
             "# energies in GHz, times in ns", ""]
    for key, spec in SCHEMA.items():
        lines.append(f"# {spec.help}")
        lines.append(f"{key} = {spec.default}")
        lines.append("")
    return "\n".join(lines)
