"""Physical constants and cavity description for the Casimir toolkit.

This module handles:
- Pinned CODATA 2018 constants (never read from the environment)
- Thermal environment, plasma mirror and cavity value types
- Characteristic lengths and the ideal Casimir force and energy

All public values are SI; the correction factors downstream only ever see the
two ratios lp = lambda_P/L and lt = lambda_T/L carried by CavityState.
"""

import math
import logging
from dataclasses import dataclass, field

from exceptions import DomainError

# Setup logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used by every computation.

    Attributes:
        hbar: Reduced Planck constant in J*s
        c: Speed of light in m/s
        k_B: Boltzmann constant in J/K
        version: Label written into output metadata
    """

    hbar: float
    c: float
    k_B: float
    version: str = "CODATA 2018"

    def __post_init__(self):
        for name in ("hbar", "c", "k_B"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"Physical constant {name} must be positive and finite, got {value!r}")


CODATA_2018 = PhysicalConstants(
    hbar=1.054571817e-34,
    c=299792458.0,
    k_B=1.380649e-23,
)


def thermal_wavelength(T: float, constants: PhysicalConstants = CODATA_2018) -> float:
    """Thermal wavelength lambda_T = hbar*c/(k_B*T) in metres.

    Args:
        T: Temperature in kelvin, strictly positive

    Returns:
        float: lambda_T in metres
    """
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"Temperature must be positive and finite, got {T!r}")
    return constants.hbar * constants.c / (constants.k_B * T)


def _check_geometry(L: float, A: float) -> None:
    if not (L > 0 and math.isfinite(L)):
        raise DomainError(f"Mirror separation L must be positive and finite, got {L!r}")
    if not (A > 0 and math.isfinite(A)):
        raise DomainError(f"Mirror area A must be positive and finite, got {A!r}")


def ideal_force(L: float, A: float, constants: PhysicalConstants = CODATA_2018) -> float:
    """Ideal Casimir force hbar*c*A*pi^2/(240 L^4) between perfect mirrors at T = 0."""
    _check_geometry(L, A)
    return constants.hbar * constants.c * A * math.pi ** 2 / (240.0 * L ** 4)


def ideal_energy(L: float, A: float, constants: PhysicalConstants = CODATA_2018) -> float:
    """Ideal Casimir energy hbar*c*A*pi^2/(720 L^3), the integral of ideal_force from L to infinity."""
    _check_geometry(L, A)
    return constants.hbar * constants.c * A * math.pi ** 2 / (720.0 * L ** 3)


@dataclass(frozen=True)
class ThermalEnvironment:
    """Temperature of the cavity with its derived length and frequency.

    T = 0 is accepted as the exact zero-temperature limit: lambda_T is then
    infinite and omega_T zero.
    """

    T: float
    constants: PhysicalConstants = CODATA_2018
    lambda_T: float = field(init=False)
    omega_T: float = field(init=False)

    def __post_init__(self):
        if self.T == 0:
            lambda_T = math.inf
            omega_T = 0.0
        else:
            lambda_T = thermal_wavelength(self.T, self.constants)
            omega_T = 2.0 * math.pi * self.constants.c / lambda_T
        object.__setattr__(self, "lambda_T", lambda_T)
        object.__setattr__(self, "omega_T", omega_T)

    @property
    def is_cold(self) -> bool:
        return self.T == 0


@dataclass(frozen=True)
class PlasmaMirror:
    """Metal mirror described by its plasma wavelength.

    lambda_P = 0 is accepted as the exact perfect-reflector limit
    (omega_P infinite).
    """

    lambda_P: float
    constants: PhysicalConstants = CODATA_2018
    omega_P: float = field(init=False)

    def __post_init__(self):
        if not (self.lambda_P >= 0 and math.isfinite(self.lambda_P)):
            raise DomainError(f"Plasma wavelength must be non-negative and finite, got {self.lambda_P!r}")
        omega_P = math.inf if self.lambda_P == 0 else 2.0 * math.pi * self.constants.c / self.lambda_P
        object.__setattr__(self, "omega_P", omega_P)

    @property
    def is_perfect(self) -> bool:
        return self.lambda_P == 0


@dataclass(frozen=True)
class CavityState:
    """Two identical plane mirrors at distance L in a thermal environment.

    Attributes:
        L: Mirror separation in metres
        A: Mirror area in square metres
        mirror: Mirror material shared by both plates
        env: Thermal environment
        lp: lambda_P / L (derived)
        lt: lambda_T / L (derived, infinite at T = 0)
    """

    L: float
    A: float
    mirror: PlasmaMirror
    env: ThermalEnvironment
    lp: float = field(init=False)
    lt: float = field(init=False)

    def __post_init__(self):
        _check_geometry(self.L, self.A)
        object.__setattr__(self, "lp", self.mirror.lambda_P / self.L)
        object.__setattr__(self, "lt", self.env.lambda_T / self.L)

    @classmethod
    def from_si(
        cls,
        L: float,
        T: float,
        lambda_P: float,
        A: float = 1e-4,
        constants: PhysicalConstants = CODATA_2018,
    ) -> "CavityState":
        """Build a cavity from plain SI numbers (T = 0 and lambda_P = 0 are exact limits)."""
        if T < 0 or not math.isfinite(T):
            raise DomainError(f"Temperature must be non-negative and finite, got {T!r}")
        return cls(L=L, A=A, mirror=PlasmaMirror(lambda_P, constants), env=ThermalEnvironment(T, constants))

    @property
    def constants(self) -> PhysicalConstants:
        return self.env.constants

    @property
    def ideal_force(self) -> float:
        return ideal_force(self.L, self.A, self.constants)

    @property
    def ideal_energy(self) -> float:
        return ideal_energy(self.L, self.A, self.constants)
