"""Input parsing helpers for lengths, temperatures and distance grids."""

import re
import math
import logging
from typing import Union

import numpy as np

from exceptions import DomainError

logger = logging.getLogger(__name__)

# Length suffixes accepted on the command line, in metres
LENGTH_UNITS = {
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "μm": 1e-6,
    "nm": 1e-9,
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\d\s]*)\s*$")


def parse_length(text: Union[str, float]) -> float:
    """Parse a length such as '0.5um', '107nm' or '3e-6' (bare numbers are metres).

    Args:
        text: Length with optional unit suffix

    Returns:
        float: Length in metres
    """
    if isinstance(text, (int, float)):
        return float(text)
    match = _QUANTITY.match(text)
    if not match:
        raise DomainError(f"Cannot parse length {text!r}; use e.g. 0.5um, 107nm or 3e-6")
    number, unit = match.groups()
    unit = unit or "m"
    if unit not in LENGTH_UNITS:
        raise DomainError(f"Unknown length unit {unit!r} in {text!r}; use one of {', '.join(LENGTH_UNITS)}")
    value = float(number) * LENGTH_UNITS[unit]
    if value < 0:
        raise DomainError(f"Length must not be negative, got {text!r}")
    return value


def parse_temperature(text: Union[str, float]) -> float:
    """Parse a temperature in kelvin ('300', '300K'); 0 is the exact zero-temperature limit."""
    if isinstance(text, (int, float)):
        value = float(text)
    else:
        match = _QUANTITY.match(text)
        if not match or match.group(2) not in ("", "K"):
            raise DomainError(f"Cannot parse temperature {text!r}; give kelvin, e.g. 300 or 300K")
        value = float(match.group(1))
    if value < 0 or not math.isfinite(value):
        raise DomainError(f"Temperature must be non-negative and finite, got {text!r}")
    return value


def distance_grid(L_min: float, L_max: float, points: int, scale: str = "log") -> np.ndarray:
    """Sorted grid of mirror distances between L_min and L_max (inclusive).

    Args:
        L_min: Smallest distance in metres
        L_max: Largest distance in metres
        points: Number of grid points
        scale: 'log' or 'linear'

    Returns:
        np.ndarray: Distances in metres
    """
    if not (L_min > 0 and L_max >= L_min):
        raise DomainError(f"Need 0 < L_min <= L_max, got L_min={L_min!r}, L_max={L_max!r}")
    if points < 1:
        raise DomainError(f"Need at least one grid point, got {points!r}")
    if points == 1:
        return np.array([L_min])
    if scale == "log":
        grid = np.geomspace(L_min, L_max, points)
    elif scale == "linear":
        grid = np.linspace(L_min, L_max, points)
    else:
        raise DomainError(f"Unknown grid scale {scale!r}; use 'log' or 'linear'")
    logger.debug(f"Distance grid: {points} {scale} points in [{L_min:.3g}, {L_max:.3g}] m")
    return grid
