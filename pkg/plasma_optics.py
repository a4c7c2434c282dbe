"""Plasma-model optics of a thick metallic mirror at imaginary frequency.

This module handles:
- The plasma dielectric function 1 + (omega_P/omega)^2
- The reduced reflection variable rho(kappa) in cancellation-free form
- TE/TM reflection amplitudes in the (rho, y) parametrization

Amplitudes are never built from the raw Fresnel expression: the (rho, y)
form is finite at omega = 0 and loses no digits at small y.
"""

import math
import logging
from dataclasses import dataclass, field

import numpy as np

from constants import CODATA_2018, PhysicalConstants, PlasmaMirror
from exceptions import DomainError

# Setup logging
logger = logging.getLogger(__name__)

# Above this value of c*kappa/omega_P, rho is taken from its 1/(4 s^2) expansion
SERIES_THRESHOLD = 1e8


@dataclass(frozen=True)
class SpectralPoint:
    """Imaginary-axis frequency omega and longitudinal wavevector kappa.

    Attributes:
        omega: Frequency magnitude in rad/s
        kappa: Wavevector in 1/m, at least omega/c
        y: omega/(c*kappa), in [0, 1] (derived)
    """

    omega: float
    kappa: float
    constants: PhysicalConstants = CODATA_2018
    y: float = field(init=False)

    def __post_init__(self):
        if not (self.omega >= 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be non-negative and finite, got {self.omega!r}")
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise DomainError(f"kappa must be non-negative and finite, got {self.kappa!r}")
        if self.kappa == 0:
            if self.omega != 0:
                raise DomainError("kappa = 0 requires omega = 0")
            y = 0.0
        else:
            y = self.omega / (self.constants.c * self.kappa)
        if y > 1.0 + 1e-12:
            raise DomainError(f"kappa must be at least omega/c (got y = {y!r})")
        object.__setattr__(self, "y", min(y, 1.0))

    @classmethod
    def from_reduced(cls, kappa: float, y: float, constants: PhysicalConstants = CODATA_2018) -> "SpectralPoint":
        if not 0.0 <= y <= 1.0:
            raise DomainError(f"y must lie in [0, 1], got {y!r}")
        return cls(omega=y * constants.c * kappa, kappa=kappa, constants=constants)


@dataclass(frozen=True)
class ReflectionPair:
    """TE (perpendicular) and TM (parallel) reflection amplitudes."""

    r_perp: float
    r_par: float


def epsilon_plasma(omega: float, mirror: PlasmaMirror) -> float:
    """Plasma-model permittivity 1 + (omega_P/omega)^2 at imaginary frequency omega."""
    if not omega > 0:
        raise DomainError(f"epsilon_plasma needs omega > 0, got {omega!r}")
    if mirror.is_perfect:
        return math.inf
    return 1.0 + (mirror.omega_P / omega) ** 2


def reduced_ratio(u, lp: float):
    """c*kappa/omega_P for the reduced wavevector u = kappa*L and lp = lambda_P/L."""
    return np.asarray(u, dtype=float) * lp / (2.0 * math.pi)


def rho_of_ratio(s):
    """rho = (sqrt(1+s^2) - s)/(sqrt(1+s^2) + s) for s = c*kappa/omega_P (vectorized)."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        exact = 1.0 / (np.sqrt(1.0 + s * s) + s) ** 2
        series = 0.25 / (s * s)
    out = np.where(s > SERIES_THRESHOLD, series, exact)
    return out if out.ndim else float(out)


def one_minus_rho_of_ratio(s):
    """1 - rho = 2s/(sqrt(1+s^2) + s), free of cancellation near rho = 1."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        exact = 2.0 * s / (np.sqrt(1.0 + s * s) + s)
        series = 1.0 - 0.25 / (s * s)
    out = np.where(s > SERIES_THRESHOLD, series, exact)
    return out if out.ndim else float(out)


def rho(kappa: float, mirror: PlasmaMirror) -> float:
    """Reduced reflection variable rho(kappa) in (0, 1]; 1 for a perfect mirror."""
    if not (kappa >= 0 and math.isfinite(kappa)):
        raise DomainError(f"kappa must be non-negative and finite, got {kappa!r}")
    return rho_of_ratio(kappa * mirror.lambda_P / (2.0 * math.pi))


def parallel_reflection(rho_value, y):
    """TM amplitude rho*(z - 2)/(z + 2*rho) with z = y^2*(1 - rho) (vectorized).

    At y = 0 this is exactly -1, the zero-frequency limit.
    """
    rho_value = np.asarray(rho_value, dtype=float)
    z = np.asarray(y, dtype=float) ** 2 * (1.0 - rho_value)
    return rho_value * (z - 2.0) / (z + 2.0 * rho_value)


def one_minus_parallel_squared(rho_value, y, one_minus_rho=None):
    """1 - r_par^2 = z(1+rho)(z(1-rho) + 4 rho)/(z + 2 rho)^2, without cancellation."""
    rho_value = np.asarray(rho_value, dtype=float)
    if one_minus_rho is None:
        one_minus_rho = 1.0 - rho_value
    z = np.asarray(y, dtype=float) ** 2 * one_minus_rho
    return z * (1.0 + rho_value) * (z * one_minus_rho + 4.0 * rho_value) / (z + 2.0 * rho_value) ** 2


def reflection_pair(p: SpectralPoint, mirror: PlasmaMirror) -> ReflectionPair:
    """Reflection amplitudes (r_perp, r_par) of the plasma mirror at a spectral point.

    Args:
        p: Imaginary frequency and wavevector
        mirror: Plasma mirror (lambda_P = 0 gives a perfect reflector)

    Returns:
        ReflectionPair: r_perp = -rho and the TM amplitude; (-rho, -1) at omega = 0
    """
    rho_value = rho(p.kappa, mirror)
    r_par = -1.0 if p.omega == 0 else float(parallel_reflection(rho_value, p.y))
    return ReflectionPair(r_perp=-float(rho_value), r_par=r_par)


@dataclass(frozen=True)
class RoundTrip:
    """Per-polarization round-trip quantities on a reduced (u, y) grid.

    Attributes:
        gain: r^2 e^(-2u)
        loss: 1 - r^2 (non-negative, computed without cancellation)
        denominator: 1 - r^2 e^(-2u)
    """

    gain: np.ndarray
    loss: np.ndarray
    denominator: np.ndarray


def round_trips(u, y, lp: float):
    """TE and TM round-trip quantities at reduced wavevector u = kappa*L and y = omega/(c*kappa).

    Returns:
        tuple: (RoundTrip for TE, RoundTrip for TM), broadcast over u and y
    """
    u = np.asarray(u, dtype=float)
    s = reduced_ratio(u, lp)
    rho_value = np.asarray(rho_of_ratio(s))
    omr = np.asarray(one_minus_rho_of_ratio(s))
    x2 = np.exp(-2.0 * u)
    one_minus_x2 = -np.expm1(-2.0 * u)

    r2_perp = rho_value ** 2
    loss_perp = omr * (1.0 + rho_value)
    r_par = parallel_reflection(rho_value, y)
    r2_par = r_par ** 2
    loss_par = one_minus_parallel_squared(rho_value, y, omr)

    pairs = []
    for r2, loss in ((r2_perp, loss_perp), (r2_par, loss_par)):
        r2, loss = np.broadcast_arrays(r2, loss)
        gain = r2 * x2
        pairs.append(RoundTrip(gain=gain, loss=loss, denominator=loss + r2 * one_minus_x2))
    return pairs[0], pairs[1]


def polarization_terms(u, y, lp: float, deficit: bool = False):
    """(TE, TM) terms of the force kernel f, or of the deficit f - f_perfect.

    f per polarization is r^2 e^(-2u)/(1 - r^2 e^(-2u)); its deficit is
    -(1 - r^2) e^(-2u)/((1 - r^2 e^(-2u))(1 - e^(-2u))), free of the
    cancellation of the direct difference.
    """
    u = np.asarray(u, dtype=float)
    trips = round_trips(u, y, lp)
    if not deficit:
        return tuple(trip.gain / trip.denominator for trip in trips)
    x2 = np.exp(-2.0 * u)
    one_minus_x2 = -np.expm1(-2.0 * u)
    return tuple(-trip.loss * x2 / (trip.denominator * one_minus_x2) for trip in trips)


def mode_sum(u, y, lp: float):
    """f = sum over polarizations of r^2 e^(-2u)/(1 - r^2 e^(-2u)), the force kernel."""
    te, tm = polarization_terms(u, y, lp)
    return te + tm


def mode_sum_deficit(u, y, lp: float):
    """f - f_perfect = -1/(1 - e^(-2u)) * sum (1 - r^2) e^(-2u)/(1 - r^2 e^(-2u))."""
    te, tm = polarization_terms(u, y, lp, deficit=True)
    return te + tm


def log_mode_sum(u, y, lp: float):
    """-sum over polarizations of log(1 - r^2 e^(-2u)), the free-energy kernel."""
    total = 0.0
    for trip in round_trips(u, y, lp):
        small = trip.gain < 0.5
        with np.errstate(divide="ignore"):
            total = total + np.where(small, -np.log1p(-np.minimum(trip.gain, 0.5)), -np.log(trip.denominator))
    return total
