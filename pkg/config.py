"""
Configuration settings for the Casimir correction-factor toolkit.

This module contains run-time settings read from the environment (and a local
.env file), the metal presets and the defaults of the command-line front end.
Physical constants are pinned in constants.py and never configured here.
"""

import os
import sys
import logging
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from exceptions import DomainError
from quadrature import QuadratureSpec

# Load environment variables from .env file (for local runs)
load_dotenv()

logger = logging.getLogger(__name__)

# Get absolute path of the application root
if getattr(sys, 'frozen', False):
    # Running as bundled executable
    BASE_DIR = os.path.dirname(sys.executable)
else:
    # Running from source
    BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Plasma wavelengths of the supported metals (metres)
METAL_PRESETS = {
    "Al": 107e-9,
    "Cu": 136e-9,
    "Au": 136e-9,
}

METAL_DISPLAY_NAMES = {
    "Al": "Aluminium",
    "Cu": "Copper",
    "Au": "Gold",
}

# Plasma wavelengths of the deviation figures (metres)
FIGURE_PLASMA_WAVELENGTHS = [107e-9, 136e-9, 300e-9, 500e-9]
FIGURE_L_MIN = 0.1e-6
FIGURE_L_MAX = 10e-6
FIGURE_POINTS = 40

OUTPUT_FORMATS = ("csv", "json")
SCHEMA_VERSION = "1.0"


def _clean(raw: Optional[str]) -> Optional[str]:
    """Strip whitespace and surrounding quotes from an environment value."""
    if raw is None:
        return None
    value = raw.strip().strip('"').strip("'")
    return value or None


def get_env_str(env_var_name: str, default: Optional[str] = None) -> Optional[str]:
    """Read a string setting from the environment."""
    value = _clean(os.getenv(env_var_name))
    if value is None:
        return default
    logger.debug(f"Loaded {env_var_name} from environment variables.")
    return value


def get_env_float(env_var_name: str, default: float) -> float:
    """Read a float setting, falling back to the default on missing or bad values."""
    value = get_env_str(env_var_name)
    if value is None:
        return default
    try:
        return float(value)
    except ValueError:
        logger.warning(f"Ignoring {env_var_name}={value!r}: not a number, using {default}")
        return default


def get_env_int(env_var_name: str, default: int) -> int:
    """Read an integer setting, falling back to the default on missing or bad values."""
    value = get_env_str(env_var_name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        logger.warning(f"Ignoring {env_var_name}={value!r}: not an integer, using {default}")
        return default


LOG_LEVEL = (get_env_str("CASIMIR_LOG_LEVEL", "INFO") or "INFO").upper()
LOG_DIR = get_env_str("CASIMIR_LOG_DIR")
OUTPUT_DIR = get_env_str("CASIMIR_OUTPUT_DIR", os.path.join(BASE_DIR, "figures"))
DEFAULT_TEMPERATURE_K = get_env_float("CASIMIR_TEMPERATURE_K", 300.0)
DEFAULT_AREA_M2 = get_env_float("CASIMIR_MIRROR_AREA_M2", 1e-4)
DEFAULT_WORKERS = max(1, get_env_int("CASIMIR_WORKERS", 1))


def get_available_metals() -> Dict[str, str]:
    """Get the metal presets with their display names"""
    return {code: METAL_DISPLAY_NAMES[code] for code in METAL_PRESETS}


def describe_metals() -> str:
    """Presets as 'Al (Aluminium), Cu (Copper), ...' for help and error messages"""
    return ', '.join(f"{code} ({name})" for code, name in get_available_metals().items())


def resolve_metal(name: str) -> float:
    """Plasma wavelength in metres of a named metal preset (case-insensitive).

    Args:
        name: Metal symbol, e.g. 'Al' or 'cu'

    Returns:
        float: lambda_P in metres
    """
    lookup = {code.lower(): value for code, value in METAL_PRESETS.items()}
    key = name.strip().lower()
    if key not in lookup:
        raise DomainError(
            f"Unknown metal {name!r}; available presets are {describe_metals()} "
            "(pass an explicit plasma wavelength for other metals)"
        )
    return lookup[key]


def get_quadrature_spec(**overrides: Any) -> QuadratureSpec:
    """Build the QuadratureSpec from defaults, then CASIMIR_* environment values, then explicit overrides.

    Overrides whose value is None are ignored, so CLI flags can be passed through unchanged.
    """
    defaults = QuadratureSpec()
    settings = {
        "abs_tol": get_env_float("CASIMIR_ABS_TOL", defaults.abs_tol),
        "rel_tol": get_env_float("CASIMIR_REL_TOL", defaults.rel_tol),
        "max_subdivisions": get_env_int("CASIMIR_MAX_SUBDIVISIONS", defaults.max_subdivisions),
        "series_rel_tol": get_env_float("CASIMIR_SERIES_REL_TOL", defaults.series_rel_tol),
        "series_max_terms": get_env_int("CASIMIR_SERIES_MAX_TERMS", defaults.series_max_terms),
    }
    for key, value in overrides.items():
        if key not in settings:
            raise DomainError(f"Unknown quadrature setting {key!r}")
        if value is not None:
            settings[key] = value
    return QuadratureSpec(**settings)


def get_figure_plasma_wavelengths() -> List[float]:
    """Plasma wavelengths used for the deviation figures"""
    return list(FIGURE_PLASMA_WAVELENGTHS)
