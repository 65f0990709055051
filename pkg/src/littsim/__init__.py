"""Axisymmetric finite-element simulator of laser-induced thermotherapy.

Couples radiative diffusion, bio-heat conduction, Arrhenius tissue damage,
and two water-vaporization models (effective specific heat and enthalpy)
with a simple condensation source.
"""

__version__ = "0.1.0"

from .config import (CaseSpec, ConfigError, MaterialParams, RunSettings,
                     builtin_cases, dump_config, get_case, load_config)
from .driver import RunResult, run_case, run_sensitivity
from .mesh import AxiMesh, build_mesh, integrate, interpolate_at

__all__ = [
    "AxiMesh", "CaseSpec", "ConfigError", "MaterialParams", "RunResult",
    "RunSettings", "build_mesh", "builtin_cases", "dump_config", "get_case",
    "integrate", "interpolate_at", "load_config", "run_case",
    "run_sensitivity", "__version__",
]
