"""Quadrature and series engine for the Casimir toolkit.

This module handles:
- Adaptive Gauss-Kronrod (7/15) integration on finite intervals and on [0, 1]
- Semi-infinite integration through an exponential variable substitution
- Cosine-weighted oscillatory integration (half-period panels + Euler averaging)
- Truncation-controlled summation of decaying series, with optional power-law tails

Integrands and series terms are always called with 1-D numpy arrays of abscissae
and must return arrays of the same shape. Nothing here raises on non-convergence:
the returned ConvergenceReport carries converged=False and the best estimate.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import zeta

from exceptions import ConvergenceError, DomainError, IntegrandEvaluationError

# Setup logging
logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod 15-point nodes (positive half, centre last) and weights; Gauss 7-point weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
# Gauss nodes sit at the odd positions of the 15-point array
_GAUSS_WEIGHTS = np.zeros(15)
_GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]

_EPS = np.finfo(float).eps

# Euler averaging window for the oscillatory partial sums
_EULER_WINDOW = 40
_MIN_OSC_PANELS = 4


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits shared by every numerical evaluation.

    Attributes:
        abs_tol: Absolute tolerance
        rel_tol: Relative tolerance
        max_subdivisions: Maximum number of panels of one adaptive integral
        series_rel_tol: Relative size below which series terms count as negligible
        series_max_terms: Hard cap on summed terms
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000
    series_rel_tol: float = 1e-12
    series_max_terms: int = 1_000_000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "series_rel_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"QuadratureSpec.{name} must be positive, got {value!r}")
        for name in ("max_subdivisions", "series_max_terms"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"QuadratureSpec.{name} must be a positive integer, got {value!r}")

    def tolerance(self, value: float) -> float:
        """Error allowed for an estimate of the given size."""
        return max(self.abs_tol, self.rel_tol * abs(value))

    def tightened(self, factor: float) -> "QuadratureSpec":
        """Copy with integration tolerances divided by factor."""
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)

    def to_dict(self) -> Dict[str, float]:
        return {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_subdivisions": self.max_subdivisions,
            "series_rel_tol": self.series_rel_tol,
            "series_max_terms": self.series_max_terms,
        }


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of one numerical evaluation."""

    value: float
    est_error: float
    evaluations: int
    converged: bool

    def require(self, context: str = "") -> float:
        """Return the value, raising ConvergenceError when not converged."""
        if not self.converged:
            raise ConvergenceError(self, context)
        return self.value

    def scaled(self, factor: float, offset: float = 0.0) -> "ConvergenceReport":
        return ConvergenceReport(
            value=factor * self.value + offset,
            est_error=abs(factor) * self.est_error,
            evaluations=self.evaluations,
            converged=self.converged,
        )


def _checked(values, x: np.ndarray) -> np.ndarray:
    """Broadcast integrand output to the abscissa shape and reject non-finite samples."""
    values = np.broadcast_to(np.asarray(values, dtype=float), x.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        index = np.flatnonzero(bad.ravel())[0]
        raise IntegrandEvaluationError(float(x.ravel()[index]), float(values.ravel()[index]))
    return values


def _gk15(f: Integrand, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Kronrod 7/15 estimates and QUADPACK error estimates for a batch of panels."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = _checked(f(x.ravel()), x.ravel()).reshape(x.shape)

    resk = fx @ _KRONROD_WEIGHTS
    resg = fx @ _GAUSS_WEIGHTS
    resabs = np.abs(fx) @ _KRONROD_WEIGHTS
    mean = 0.5 * resk
    resasc = np.abs(fx - mean[:, None]) @ _KRONROD_WEIGHTS

    scale = np.abs(half)
    result = resk * half
    err = np.abs((resk - resg) * half)
    resasc = resasc * scale
    resabs = resabs * scale

    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return result, err


def integrate_interval(f: Integrand, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].

    Every panel whose error exceeds its width-proportional share of the
    tolerance is bisected; all panels of one pass are evaluated in a single
    vectorized call.

    Args:
        f: Vectorized integrand
        a: Lower limit
        b: Upper limit
        spec: Tolerances and subdivision cap

    Returns:
        ConvergenceReport: Estimate of the integral
    """
    if a == b:
        return ConvergenceReport(0.0, 0.0, 0, True)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"integrate_interval needs finite limits, got [{a}, {b}]")

    width = b - a
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    res, err = _gk15(f, lo, hi)
    evaluations = 15

    while True:
        total = math.fsum(res)
        total_err = math.fsum(err)
        tol = spec.tolerance(total)
        if total_err <= tol:
            return ConvergenceReport(total, total_err, evaluations, True)

        split = err > tol * np.abs(hi - lo) / abs(width)
        if not split.any():
            split[np.argmax(err)] = True
        mid = 0.5 * (lo + hi)
        # panels that can no longer be bisected in floating point stay as they are
        split &= (mid != lo) & (mid != hi)
        if not split.any():
            logger.debug(f"integrate_interval: panels exhausted on [{a}, {b}], err={total_err:.3e}")
            return ConvergenceReport(total, total_err, evaluations, False)

        room = spec.max_subdivisions - len(lo)
        if room <= 0:
            logger.debug(f"integrate_interval: subdivision cap hit on [{a}, {b}], err={total_err:.3e}")
            return ConvergenceReport(total, total_err, evaluations, False)
        candidates = np.flatnonzero(split)
        if len(candidates) > room:
            candidates = candidates[np.argsort(err[candidates])[::-1][:room]]
            split = np.zeros_like(split)
            split[candidates] = True

        keep = ~split
        left_lo, left_hi = lo[split], mid[split]
        right_lo, right_hi = mid[split], hi[split]
        new_lo = np.concatenate([left_lo, right_lo])
        new_hi = np.concatenate([left_hi, right_hi])
        new_res, new_err = _gk15(f, new_lo, new_hi)
        evaluations += 15 * len(new_lo)

        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        res = np.concatenate([res[keep], new_res])
        err = np.concatenate([err[keep], new_err])


def integrate_unit(f: Integrand, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """Adaptive integral of f over [0, 1]."""
    return integrate_interval(f, 0.0, 1.0, spec)


def integrate_semi_infinite(
    f: Integrand,
    decay_scale: float = 1.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    lower: float = 0.0,
) -> ConvergenceReport:
    """Integral of f over [lower, inf) via u = lower - decay_scale*log(1 - t), t in [0, 1).

    The substitution is exact for e^(-(u-lower)/decay_scale) and keeps the
    e^(-2u) Casimir integrands smooth on the unit interval.
    """
    if not (decay_scale > 0 and math.isfinite(decay_scale)):
        raise DomainError(f"decay_scale must be positive and finite, got {decay_scale!r}")

    def mapped(t: np.ndarray) -> np.ndarray:
        one_minus_t = 1.0 - t
        inside = one_minus_t > 0
        out = np.zeros_like(t)
        if inside.any():
            u = lower - decay_scale * np.log1p(-t[inside])
            values = _checked(f(u), u)
            out[inside] = values * decay_scale / one_minus_t[inside]
        return out

    return integrate_unit(mapped, spec)


def _euler_average(partials: Sequence[float]) -> float:
    """Repeated averaging of the trailing partial sums of an alternating series."""
    window = np.array(partials[-_EULER_WINDOW:], dtype=float)
    while len(window) > 1:
        window = 0.5 * (window[1:] + window[:-1])
    return float(window[0])


def integrate_oscillatory(
    f: Integrand,
    osc_period: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    decay_scale: float = 1.0,
    first_zero: Optional[float] = None,
) -> ConvergenceReport:
    """Integral over [0, inf) of an oscillating, decaying integrand.

    The half-line is cut at the zeros of the oscillation (cosine zeros by
    default: P/4, 3P/4, ...; pass first_zero=P/2 for a sine factor), each
    panel is integrated adaptively, and the alternating panel sums are
    accelerated by Euler averaging of the trailing partial sums.

    Converges once two consecutive accelerated estimates agree to tolerance
    and the panel magnitudes have shrunk for three panels in a row; an
    integrand whose panels never shrink (cos x) is reported as not converged.

    Args:
        f: Vectorized integrand including the oscillating factor
        osc_period: Period of the oscillation; inf means no oscillation
        spec: Tolerances; the panel count is capped by max_subdivisions
        decay_scale: Envelope scale used when osc_period is infinite
        first_zero: First cut point (defaults to osc_period/4)

    Returns:
        ConvergenceReport: Estimate of the integral
    """
    if math.isinf(osc_period):
        return integrate_semi_infinite(f, decay_scale, spec)
    if not osc_period > 0:
        raise DomainError(f"osc_period must be positive, got {osc_period!r}")

    half = 0.5 * osc_period
    edge = 0.25 * osc_period if first_zero is None else first_zero
    panel_spec = replace(spec, abs_tol=spec.abs_tol / 50.0, rel_tol=spec.rel_tol / 50.0)

    panels: List[float] = []
    partials: List[float] = []
    estimates: List[float] = []
    panel_err_sq = 0.0
    evaluations = 0
    panels_ok = True
    a = 0.0
    b = edge

    for _ in range(spec.max_subdivisions):
        report = integrate_interval(f, a, b, panel_spec)
        evaluations += report.evaluations
        panels_ok &= report.converged
        panel_err_sq += report.est_error ** 2
        panels.append(report.value)
        partials.append(math.fsum(panels))
        estimates.append(_euler_average(partials))
        a, b = b, b + half

        if len(panels) < _MIN_OSC_PANELS + 2:
            continue
        diffs = (abs(estimates[-1] - estimates[-2]), abs(estimates[-2] - estimates[-3]))
        est_error = max(diffs) + math.sqrt(panel_err_sq)
        tol = spec.tolerance(estimates[-1])
        mags = [abs(p) for p in panels[-4:]]
        shrinking = all(mags[i + 1] <= (1.0 - 1e-8) * mags[i] for i in range(3))
        if est_error <= tol and shrinking:
            return ConvergenceReport(estimates[-1], est_error, evaluations, panels_ok)

    est_error = abs(estimates[-1] - estimates[-2]) + math.sqrt(panel_err_sq) if len(estimates) > 1 else math.inf
    logger.debug(f"integrate_oscillatory: no convergence after {len(panels)} panels (period {osc_period:.4g})")
    return ConvergenceReport(estimates[-1], est_error, evaluations, False)


@dataclass(frozen=True)
class PowerLawTail:
    """Asymptotic model term(m) ~ sum_p c_p m^(-p) of a slowly converging series.

    Attributes:
        coefficients: Mapping power p (> 1) to coefficient c_p
    """

    coefficients: Dict[float, float]

    def __post_init__(self):
        for power in self.coefficients:
            if not power > 1:
                raise DomainError(f"PowerLawTail powers must exceed 1, got {power!r}")

    def __call__(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        total = np.zeros_like(m)
        for power, coefficient in self.coefficients.items():
            total = total + coefficient * m ** (-float(power))
        return total

    def tail(self, last: int) -> float:
        """Exact sum of the model over m > last (Hurwitz zeta)."""
        return math.fsum(c * float(zeta(float(p), last + 1.0)) for p, c in self.coefficients.items())


def _extrapolated_tail(m_last: float, t_last: float, m_prev: float, t_prev: float) -> Optional[float]:
    """Estimate the sum of the terms after m_last from the last two terms."""
    if t_last == 0.0:
        return 0.0
    ratio = t_last / t_prev if t_prev != 0.0 else 0.0
    if ratio < 0.5:
        return t_last * ratio / (1.0 - ratio)
    if ratio >= 1.0:
        return None
    power = math.log(t_prev / t_last) / math.log(m_last / m_prev)
    if power <= 1.0:
        return None
    return t_last * (m_last / (power - 1.0) - 0.5 + power / (12.0 * m_last))


def sum_series(
    term: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_SPEC,
    tail_model: Optional[PowerLawTail] = None,
) -> ConvergenceReport:
    """Sum term(m) over m >= 1.

    Terms are evaluated in vectorized blocks (8, 16, ... up to 4096). The sum
    is truncated once three consecutive terms are below series_rel_tol times
    the partial sum, or at series_max_terms. Without a tail model the
    remaining tail is extrapolated from the last terms and added; with a
    PowerLawTail the criterion applies to term - model and the model tail is
    added exactly.

    Args:
        term: Vectorized term, called with float arrays of m
        spec: Truncation policy
        tail_model: Optional asymptotic model of the terms

    Returns:
        ConvergenceReport: Sum with the tail uncertainty as est_error
    """
    chunks: List[float] = []
    running = 0.0
    run = 0
    start = 1
    block = 8
    history: List[Tuple[float, float]] = []
    stop_at: Optional[int] = None

    while start <= spec.series_max_terms:
        count = min(block, spec.series_max_terms - start + 1)
        m = np.arange(start, start + count, dtype=float)
        values = _checked(term(m), m)
        residual = values - tail_model(m) if tail_model is not None else values
        partial = running + np.cumsum(values)
        small = np.abs(residual) <= spec.series_rel_tol * np.abs(partial)

        # length of the run of small terms ending at each position, continuing the previous block
        runs = np.zeros(count, dtype=int)
        current = run
        for i, flag in enumerate(small):
            current = current + 1 if flag else 0
            runs[i] = current
        hits = np.flatnonzero(runs >= 3)
        if hits.size:
            cut = int(hits[0]) + 1
            values = values[:cut]
            residual = residual[:cut]
            m = m[:cut]
            stop_at = int(m[-1])
        run = int(runs[len(values) - 1])

        chunks.append(math.fsum(values))
        running = math.fsum(chunks)
        tail_values = residual if tail_model is not None else values
        history = (history + list(zip(m[-3:].tolist(), tail_values[-3:].tolist())))[-3:]
        if stop_at is not None:
            break
        start += count
        block = min(2 * block, 4096)

    last = stop_at if stop_at is not None else spec.series_max_terms
    evaluations = last
    if tail_model is not None:
        total = running + tail_model.tail(last)
        est_error = math.fsum(abs(t) for _, t in history) + _EPS * abs(total)
    else:
        tail = est_error = None
        if len(history) >= 3:
            (m2, t2), (m1, t1), (m0, t0) = history[-3], history[-2], history[-1]
            tail = _extrapolated_tail(m0, t0, m1, t1)
            earlier = _extrapolated_tail(m1, t1, m2, t2)
            if tail is not None and earlier is not None:
                est_error = abs(earlier - t0 - tail)
        if tail is None:
            tail = 0.0
            est_error = math.inf if stop_at is None else abs(history[-1][1]) if history else 0.0
        total = running + tail
        est_error += _EPS * abs(total)

    converged = stop_at is not None and est_error <= spec.tolerance(total)
    if not converged:
        logger.debug(f"sum_series: stopped at m={last} with est_error={est_error:.3e}")
    return ConvergenceReport(total, est_error, evaluations, converged)


def sum_power_tail(
    term: Callable[[int], float],
    spec: QuadratureSpec = DEFAULT_SPEC,
    powers: Sequence[float] = (3, 4, 5),
    min_terms: int = 8,
    max_terms: int = 400,
) -> ConvergenceReport:
    """Sum expensive, algebraically decaying terms with a fitted power-law tail.

    Terms are evaluated one at a time. From min_terms on, the model
    sum_p c_p m^(-p) is fitted through the terms at M/2, 3M/4 and M and its
    Hurwitz-zeta tail added; the sum converges when three successive
    extrapolated totals agree to tolerance.

    Args:
        term: Scalar term m -> value for m >= 1
        spec: Tolerances (integration tolerances apply to the total)
        powers: Exponents of the tail model (one per fitted coefficient)
        min_terms: Terms evaluated before the first extrapolation
        max_terms: Hard cap on evaluated terms

    Returns:
        ConvergenceReport: Extrapolated total
    """
    powers = [float(p) for p in powers]
    min_terms = max(int(min_terms), 2 * len(powers))
    values: List[float] = []
    totals: List[float] = []

    for m in range(1, max_terms + 1):
        value = float(term(m))
        if not math.isfinite(value):
            raise IntegrandEvaluationError(float(m), value, f"Non-finite series term {value!r} at m={m}")
        values.append(value)
        if m < min_terms:
            continue

        picks = sorted({m // 2, (3 * m) // 4, m})
        if len(picks) < len(powers):
            picks = list(range(m - len(powers) + 1, m + 1))
        picks = picks[-len(powers):]
        basis = np.array([[k ** (-p) for p in powers] for k in picks])
        rhs = np.array([values[k - 1] for k in picks])
        coefficients = np.linalg.solve(basis, rhs)
        tail = PowerLawTail(dict(zip(powers, coefficients.tolist()))).tail(m)
        totals.append(math.fsum(values) + tail)

        if len(totals) >= 3:
            diffs = (abs(totals[-1] - totals[-2]), abs(totals[-2] - totals[-3]))
            est_error = max(diffs) + _EPS * abs(totals[-1]) * m
            if est_error <= spec.tolerance(totals[-1]):
                return ConvergenceReport(totals[-1], est_error, m, True)

    est_error = abs(totals[-1] - totals[-2]) if len(totals) > 1 else math.inf
    logger.debug(f"sum_power_tail: no agreement after {max_terms} terms (est_error={est_error:.3e})")
    return ConvergenceReport(totals[-1] if totals else math.fsum(values), est_error, max_terms, False)


def integrate_energy_factor(
    force_factor: Callable[[float], float],
    spec: QuadratureSpec = DEFAULT_SPEC,
    upper_ratio: float = 1e4,
    audit: bool = False,
) -> ConvergenceReport:
    """Energy factor 3 * int_{1/upper_ratio}^1 tau^2 eta_F(tau) dtau, with tau = L/x.

    force_factor(tau) must return the force correction factor at distance
    L/tau. With audit=True the integral over the 100x extension
    [tau_min/100, tau_min] is computed too, and the result is reported as
    not converged if it moves the value by 1e-7 relative or more.
    """
    if not upper_ratio > 1:
        raise DomainError(f"upper_ratio must exceed 1, got {upper_ratio!r}")

    cache: Dict[float, float] = {}

    def integrand(tau: np.ndarray) -> np.ndarray:
        out = np.empty_like(tau)
        for i, t in enumerate(tau.tolist()):
            if t not in cache:
                cache[t] = float(force_factor(t))
            out[i] = 3.0 * t * t * cache[t]
        return out

    tau_min = 1.0 / upper_ratio
    report = integrate_interval(integrand, tau_min, 1.0, spec)
    if not audit:
        return report

    extension = integrate_interval(integrand, tau_min / 100.0, tau_min, spec)
    shift = abs(extension.value) / abs(report.value) if report.value else math.inf
    logger.info(f"Energy truncation audit: 100x extension shifts the value by {shift:.3e} (relative)")
    return ConvergenceReport(
        value=report.value,
        est_error=report.est_error,
        evaluations=report.evaluations + extension.evaluations,
        converged=report.converged and extension.converged and shift < 1e-7,
    )
