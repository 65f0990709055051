"""Physical constants, experiment definitions, and run settings.

All values are stored internally in SI units with temperatures in Kelvin.
Configuration files use Celsius for temperatures and millimetres for the
geometry lengths; everything else is plain SI.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from decimal import Decimal, InvalidOperation

KELVIN_OFFSET = 273.15
T_BOIL = 373.15  # water boiling point, K

# Exact additive C<->K conversion (Sterbenz) holds in this window.
_T_MIN_K = 173.15
_T_MAX_K = 543.15


class ConfigError(ValueError):
    """Invalid configuration file or record; carries the offending field."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class UnknownCaseError(ConfigError):
    pass


@dataclass(frozen=True)
class MaterialParams:
    """Tissue constants for ex-vivo porcine liver.

    Optical coefficients are given for native and coagulated tissue; the
    damage model blends between them.
    """

    mu_a_native: float = 50.0       # absorption coefficient, 1/m
    mu_s_native: float = 8000.0     # scattering coefficient, 1/m
    g_native: float = 0.97          # anisotropy factor
    mu_a_coag: float = 60.0
    mu_s_coag: float = 30000.0
    g_coag: float = 0.95
    kappa: float = 0.518            # thermal conductivity, W/(m K)
    c_p: float = 3640.0             # specific heat capacity, J/(kg K)
    rho: float = 1137.0             # tissue density, kg/m^3
    alpha_cool: float = 250.0       # heat transfer at applicator, W/(m^2 K)
    alpha_amb: float = 44.0         # heat transfer at ambient surface, W/(m^2 K)
    A_freq: float = 3.1e98          # Arrhenius frequency factor, 1/s
    E_a: float = 6.3e5              # activation energy, J/mol
    R_gas: float = 8.31             # universal gas constant, J/(mol K)
    lambda_latent: float = 2.257e6  # latent heat of water, J/kg
    xi_b: float = 0.0               # perfusion rate, W/(m^3 K); zero ex vivo
    T_b: float = 310.15             # blood temperature, K; inert while xi_b = 0

    def __post_init__(self):
        for name in ("mu_a_native", "mu_s_native", "mu_a_coag", "mu_s_coag",
                     "kappa", "c_p", "rho", "A_freq", "E_a", "R_gas",
                     "lambda_latent"):
            if not getattr(self, name) > 0.0:
                raise ConfigError("must be strictly positive", field=name)
        for name in ("alpha_cool", "alpha_amb", "xi_b"):
            if getattr(self, name) < 0.0:
                raise ConfigError("must be nonnegative", field=name)
        for name in ("g_native", "g_coag"):
            if not -1.0 <= getattr(self, name) <= 1.0:
                raise ConfigError("anisotropy must lie in [-1, 1]", field=name)
        if not _T_MIN_K < self.T_b < _T_MAX_K:
            raise ConfigError("temperature outside supported range", field="T_b")


@dataclass(frozen=True)
class CaseSpec:
    """One experiment configuration: laser schedule and probe placement."""

    label: str
    q_hat: float       # configured laser power, W
    flow_rate: float   # coolant flow, ml/min (metadata only, never used)
    t_on: float        # laser-on time, s
    t_off: float       # laser-off time, s
    t_end: float       # end of simulation, s
    d_r: float         # probe radial offset from applicator axis, m
    d_z: float         # probe axial offset from applicator tip, m

    def __post_init__(self):
        if not 0.0 <= self.t_on < self.t_off <= self.t_end:
            raise ConfigError("need 0 <= t_on < t_off <= t_end",
                              field=f"{self.label}.schedule")
        if not self.d_r > 0.0:
            raise ConfigError("probe must sit off the axis", field="d_r")
        if self.q_hat < 0.0:
            raise ConfigError("laser power must be nonnegative", field="q_hat")


VAPOR_MODELS = ("none", "esh", "enthalpy")


@dataclass(frozen=True)
class RunSettings:
    """Numerical and environmental settings for one run."""

    model: str = "none"             # one of VAPOR_MODELS
    beta_q: float = 0.1             # coolant absorption fraction
    T_init: float = 293.15          # K
    T_amb: float = 293.15           # K
    T_cool: float = 293.15          # K
    T_cond_low: float = 333.15      # condensation window lower bound, K
    T_cond_high: float = 353.15     # condensation window upper bound, K
    dt: float = 1.0                 # time step, s
    mesh_h: float = 0.002           # target mesh edge length, m
    domain_radius: float = 0.06     # m
    domain_height: float = 0.12     # m
    applicator_radius: float = 0.0015  # m
    diffuser_length: float = 0.03   # radiating span on the applicator wall, m
    applicator_depth: float = 0.05  # insertion depth, m
    cg_rtol: float = 1e-10
    output_dir: str = "runs"
    snapshot_every: int = 60        # steps between field snapshots
    radiation_every: int = 1        # steps between radiative re-solves

    def __post_init__(self):
        if self.model not in VAPOR_MODELS:
            raise ConfigError(f"unknown model {self.model!r}, expected one of "
                              f"{', '.join(VAPOR_MODELS)}", field="model")
        if not self.dt > 0.0:
            raise ConfigError("time step must be positive", field="dt")
        if not 0.0 <= self.beta_q < 1.0:
            raise ConfigError("coolant fraction must lie in [0, 1)", field="beta_q")
        if not self.cg_rtol > 0.0:
            raise ConfigError("solver tolerance must be positive", field="cg_rtol")
        if not self.T_cond_low < self.T_cond_high < T_BOIL:
            raise ConfigError("need T_cond_low < T_cond_high < 100 C",
                              field="T_cond_low")
        for name in ("T_init", "T_amb", "T_cool", "T_cond_low", "T_cond_high"):
            if not _T_MIN_K < getattr(self, name) < _T_MAX_K:
                raise ConfigError("temperature outside supported range", field=name)
        for name in ("mesh_h", "domain_radius", "domain_height",
                     "applicator_radius", "diffuser_length", "applicator_depth"):
            if not getattr(self, name) > 0.0:
                raise ConfigError("length must be positive", field=name)
        for name in ("snapshot_every", "radiation_every"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ConfigError("must be an integer >= 1", field=name)


# Table of the nine built-in cases. Lengths are converted mm -> m here.
_CASE_ROWS = [
    # label,   q_hat, flow,  t_on, t_off, t_end, d_r_mm, d_z_mm
    ("P22F47", 22.1, 47.2,  24.0, 1266.0, 1284.0, 10.1, 12.6),
    ("P22F70", 22.1, 69.9,  30.0, 1236.0, 1248.0, 11.4, 25.7),
    ("P22F92", 22.1, 91.7,  36.0,  684.0,  702.0,  9.2, 20.9),
    ("P28F47", 28.0, 47.5,  18.0,  942.0,  954.0, 13.5, 21.0),
    ("P28F70", 28.0, 70.3,  30.0, 1722.0, 1734.0, 13.7,  7.5),
    ("P28F92", 28.0, 91.8,  60.0, 1098.0, 1116.0, 11.1, 10.1),
    ("P34F47", 33.8, 47.2,  18.0, 1206.0, 1218.0, 11.2, 23.8),
    ("P34F70", 33.8, 70.4,  24.0,  948.0,  972.0,  9.9, 26.3),
    ("P34F92", 33.8, 92.2,  48.0, 1182.0, 1206.0,  9.6, 35.3),
]


def builtin_cases():
    """All nine built-in experiment cases, in canonical order."""
    return [CaseSpec(label, q, f, on, off, end, dr / 1000.0, dz / 1000.0)
            for label, q, f, on, off, end, dr, dz in _CASE_ROWS]


def get_case(label):
    """Look up a built-in case by label; raises UnknownCaseError otherwise."""
    for case in builtin_cases():
        if case.label == label:
            return case
    valid = ", ".join(row[0] for row in _CASE_ROWS)
    raise UnknownCaseError(f"unknown case {label!r}; valid labels: {valid}",
                           field="case")


# --------------------------------------------------------------------------
# Configuration file format
#
# INI-style sections; keys are dataclass field names (optical sections drop
# the _native/_coag suffix). Temperatures are Celsius, geometry lengths mm.
# --------------------------------------------------------------------------

_FLOAT, _TEMP, _MM, _STR, _INT = "float", "temp", "mm", "str", "int"

_MATERIAL_SCHEMA = {
    ("thermal", "kappa"): ("kappa", _FLOAT),
    ("thermal", "c_p"): ("c_p", _FLOAT),
    ("thermal", "rho"): ("rho", _FLOAT),
    ("thermal", "alpha_cool"): ("alpha_cool", _FLOAT),
    ("thermal", "alpha_amb"): ("alpha_amb", _FLOAT),
    ("thermal", "xi_b"): ("xi_b", _FLOAT),
    ("thermal", "T_b"): ("T_b", _TEMP),
    ("optical.native", "mu_a"): ("mu_a_native", _FLOAT),
    ("optical.native", "mu_s"): ("mu_s_native", _FLOAT),
    ("optical.native", "g"): ("g_native", _FLOAT),
    ("optical.coagulated", "mu_a"): ("mu_a_coag", _FLOAT),
    ("optical.coagulated", "mu_s"): ("mu_s_coag", _FLOAT),
    ("optical.coagulated", "g"): ("g_coag", _FLOAT),
    ("damage", "A_freq"): ("A_freq", _FLOAT),
    ("damage", "E_a"): ("E_a", _FLOAT),
    ("damage", "R_gas"): ("R_gas", _FLOAT),
    ("vaporization", "lambda_latent"): ("lambda_latent", _FLOAT),
}

_SETTINGS_SCHEMA = {
    ("run", "model"): ("model", _STR),
    ("run", "beta_q"): ("beta_q", _FLOAT),
    ("run", "T_init"): ("T_init", _TEMP),
    ("run", "T_amb"): ("T_amb", _TEMP),
    ("run", "T_cool"): ("T_cool", _TEMP),
    ("run", "T_cond_low"): ("T_cond_low", _TEMP),
    ("run", "T_cond_high"): ("T_cond_high", _TEMP),
    ("run", "dt"): ("dt", _FLOAT),
    ("run", "cg_rtol"): ("cg_rtol", _FLOAT),
    ("run", "output_dir"): ("output_dir", _STR),
    ("run", "snapshot_every"): ("snapshot_every", _INT),
    ("run", "radiation_every"): ("radiation_every", _INT),
    ("geometry", "mesh_h"): ("mesh_h", _MM),
    ("geometry", "domain_radius"): ("domain_radius", _MM),
    ("geometry", "domain_height"): ("domain_height", _MM),
    ("geometry", "applicator_radius"): ("applicator_radius", _MM),
    ("geometry", "diffuser_length"): ("diffuser_length", _MM),
    ("geometry", "applicator_depth"): ("applicator_depth", _MM),
}

_SECTIONS = sorted({sec for sec, _ in _MATERIAL_SCHEMA} |
                   {sec for sec, _ in _SETTINGS_SCHEMA})


def _parse_lines(text):
    """Parse INI-like text into {(section, key): (value, line_no)}."""
    out = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value' or '[section]'",
                              line=lineno)
        if section is None:
            raise ConfigError("key before any [section] header", line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError("empty key or value", line=lineno)
        if (section, key) in out:
            raise ConfigError("duplicate key", field=f"{section}.{key}",
                              line=lineno)
        out[(section, key)] = (value, lineno)
    return out


def _convert(value, kind, where, lineno):
    if kind == _STR:
        return value
    if kind == _INT:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"could not parse {value!r} as integer",
                              field=where, line=lineno) from None
    try:
        number = float(value)
    except ValueError:
        raise ConfigError(f"could not parse {value!r} as number",
                          field=where, line=lineno) from None
    if kind == _TEMP:
        return number + KELVIN_OFFSET
    if kind == _MM:
        # Exact decimal shift, so dumping mm and re-loading is bit-identical.
        try:
            return float(Decimal(value) / 1000)
        except InvalidOperation:
            raise ConfigError(f"could not parse {value!r} as number",
                              field=where, line=lineno) from None
    return number


def load_config(path):
    """Load a configuration file; absent keys keep their defaults.

    Returns (MaterialParams, RunSettings). Parse failures report the line
    number; invariant violations report the offending field.
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_config(text)


def parse_config(text):
    entries = _parse_lines(text)
    material_kwargs = {}
    settings_kwargs = {}
    for (section, key), (value, lineno) in entries.items():
        where = f"{section}.{key}"
        if (section, key) in _MATERIAL_SCHEMA:
            field, kind = _MATERIAL_SCHEMA[(section, key)]
            material_kwargs[field] = _convert(value, kind, where, lineno)
        elif (section, key) in _SETTINGS_SCHEMA:
            field, kind = _SETTINGS_SCHEMA[(section, key)]
            settings_kwargs[field] = _convert(value, kind, where, lineno)
        else:
            raise ConfigError("unknown key", field=where, line=lineno)
    return MaterialParams(**material_kwargs), RunSettings(**settings_kwargs)


def _mm_string(metres):
    """Exact m -> mm decimal conversion via the shortest repr string."""
    return format((Decimal(repr(metres)) * 1000).normalize(), "f")


def _format(value, kind):
    if kind == _STR:
        return str(value)
    if kind == _INT:
        return str(int(value))
    if kind == _TEMP:
        return repr(value - KELVIN_OFFSET)
    if kind == _MM:
        return _mm_string(value)
    return repr(value)


def dump_config(params, settings):
    """Serialize records to the configuration text format (lossless)."""
    per_section = {}
    for (section, key), (field, kind) in _MATERIAL_SCHEMA.items():
        per_section.setdefault(section, []).append(
            (key, _format(getattr(params, field), kind)))
    for (section, key), (field, kind) in _SETTINGS_SCHEMA.items():
        per_section.setdefault(section, []).append(
            (key, _format(getattr(settings, field), kind)))
    lines = []
    for section in _SECTIONS:
        lines.append(f"[{section}]")
        for key, value in per_section[section]:
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def with_window(settings, low_k, high_k):
    """Settings copy with a different condensation window (Kelvin bounds)."""
    return replace(settings, T_cond_low=low_k, T_cond_high=high_k)


def describe_case(case):
    """One-line human-readable summary of a case (lengths back in mm)."""
    return (f"{case.label}  q_hat={case.q_hat:g} W  flow={case.flow_rate:g} ml/min  "
            f"t_on={case.t_on:g} s  t_off={case.t_off:g} s  t_end={case.t_end:g} s  "
            f"d_r={case.d_r * 1000:g} mm  d_z={case.d_z * 1000:g} mm")


def field_names(record):
    return [f.name for f in fields(record)]
