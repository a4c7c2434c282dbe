"""Figure datasets for the Casimir toolkit.

This module handles:
- One sweep over (plasma wavelength x distance grid) at a fixed temperature
- Splitting it into the four plotting datasets (fig1..fig4)
- The summary metrics read off those datasets (deviation peaks, scaling spread)
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from combined_factors import SweepResult, sweep
from config import (
    FIGURE_L_MAX,
    FIGURE_L_MIN,
    FIGURE_POINTS,
    METAL_PRESETS,
    get_figure_plasma_wavelengths,
)
from constants import CODATA_2018, CavityState, PhysicalConstants
from exceptions import DomainError
from quadrature import DEFAULT_SPEC, QuadratureSpec
from thermal_factors import Delta_E_analytic, Delta_F_analytic
from utils import distance_grid

# Setup logging
logger = logging.getLogger(__name__)

FACTOR_FIGURE_COLUMNS = ['L_m', 'eta_F', 'eta_F_P', 'eta_F_T', 'eta_E', 'eta_E_P', 'eta_E_T', 'ok']
DEVIATION_FIGURE_COLUMNS = ['lambda_P_m', 'L_m', 'delta_F', 'delta_E', 'ok']
SCALING_FIGURE_COLUMNS = [
    'lambda_P_m', 'L_m', 'Delta_F', 'Delta_E', 'Delta_F_analytic', 'Delta_E_analytic', 'ok',
]

# Metals of the factor-vs-distance figures
FACTOR_FIGURES = {
    'fig1': METAL_PRESETS['Al'],
    'fig2': METAL_PRESETS['Cu'],
}


def default_grid() -> np.ndarray:
    """Log-spaced distance grid used when the caller gives none"""
    return distance_grid(FIGURE_L_MIN, FIGURE_L_MAX, FIGURE_POINTS, 'log')


def _row(result: SweepResult) -> Dict[str, float]:
    row = {'lambda_P_m': result.cavity.mirror.lambda_P, 'L_m': result.cavity.L, 'ok': result.ok}
    if result.ok:
        row.update(result.bundle.to_record())
    return row


def _frame(rows: Iterable[Dict[str, float]], columns: List[str]) -> pd.DataFrame:
    df = pd.DataFrame(list(rows)).reindex(columns=columns)
    sort_keys = [key for key in ('lambda_P_m', 'L_m') if key in columns]
    return df.sort_values(sort_keys, kind='mergesort').reset_index(drop=True)


def build_figure_datasets(
    L_grid: Optional[Sequence[float]] = None,
    T: float = 300.0,
    lambda_P_values: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
    mode: str = 'fast',
    workers: int = 1,
    A: float = 1e-4,
    constants: PhysicalConstants = CODATA_2018,
) -> Dict[str, pd.DataFrame]:
    """Compute the four plotting datasets from one sweep.

    Args:
        L_grid: Mirror distances in metres (default: the figure grid)
        T: Temperature in kelvin
        lambda_P_values: Plasma wavelengths of the deviation figures
        spec: Quadrature tolerances
        mode: 'fast' or 'validation'
        workers: Worker processes for the sweep
        A: Mirror area in square metres
        constants: Physical constants

    Returns:
        Dict[str, pd.DataFrame]: fig1 and fig2 (factors for Al and Cu-Au),
        fig3 (delta per plasma wavelength), fig4 (rescaled Delta with analytic overlays)
    """
    grid = default_grid() if L_grid is None else np.asarray(L_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("Figure datasets need a non-empty distance grid")
    wavelengths = get_figure_plasma_wavelengths() if lambda_P_values is None else list(lambda_P_values)
    all_wavelengths = sorted(set(wavelengths) | set(FACTOR_FIGURES.values()))

    cavities = [
        CavityState.from_si(float(L), T, lambda_P, A, constants)
        for lambda_P in all_wavelengths
        for L in grid
    ]
    logger.info(f"Building figure datasets: {len(all_wavelengths)} plasma wavelengths x {grid.size} distances")
    results = sweep(cavities, spec, mode, workers)
    rows = [_row(result) for result in results]

    datasets: Dict[str, pd.DataFrame] = {}
    for name, lambda_P in FACTOR_FIGURES.items():
        datasets[name] = _frame((row for row in rows if row['lambda_P_m'] == lambda_P), FACTOR_FIGURE_COLUMNS)

    selected = [row for row in rows if row['lambda_P_m'] in wavelengths]
    datasets['fig3'] = _frame(selected, DEVIATION_FIGURE_COLUMNS)

    lambda_T = results[0].cavity.env.lambda_T
    overlays = {
        float(L): (Delta_F_analytic(float(L), lambda_T, spec), Delta_E_analytic(float(L), lambda_T, spec))
        for L in grid
    }
    for row in selected:
        row['Delta_F_analytic'], row['Delta_E_analytic'] = overlays[row['L_m']]
    datasets['fig4'] = _frame(selected, SCALING_FIGURE_COLUMNS)
    return datasets


def _curve(df: pd.DataFrame, lambda_P: float, column: str) -> pd.DataFrame:
    curve = df[(df['lambda_P_m'] == lambda_P) & df['ok'].astype(bool)]
    if curve.empty:
        raise DomainError(f"No successful rows for lambda_P = {lambda_P!r} m")
    return curve[['L_m', column]]


def peak_deviation(fig3: pd.DataFrame, lambda_P: float, column: str = 'delta_F') -> float:
    """Largest value of a deviation column along one plasma-wavelength curve"""
    return float(_curve(fig3, lambda_P, column)[column].max())


def scaling_spread(
    fig4: pd.DataFrame,
    lp_a: float,
    lp_b: float,
    L_min: float,
    L_max: float,
    column: str = 'Delta_F',
) -> float:
    """Largest relative gap between two rescaled Delta curves on [L_min, L_max].

    The gap is measured against the curve scale, the largest magnitude either
    curve reaches in the window, so crossings of zero do not inflate it.
    """
    a = _curve(fig4, lp_a, column).set_index('L_m')[column]
    b = _curve(fig4, lp_b, column).set_index('L_m')[column]
    joined = pd.concat([a.rename('a'), b.rename('b')], axis=1, join='inner')
    joined = joined[(joined.index >= L_min) & (joined.index <= L_max)]
    if joined.empty:
        raise DomainError(f"No common distances in [{L_min!r}, {L_max!r}] m")
    scale = max(joined['a'].abs().max(), joined['b'].abs().max())
    if not scale > 0:
        raise DomainError(f"Delta curves vanish on [{L_min!r}, {L_max!r}] m")
    return float((joined['a'] - joined['b']).abs().max() / scale)


def overlay_gap_at_peak(fig4: pd.DataFrame, lambda_P: float, numeric: str = 'Delta_F') -> float:
    """Relative gap between a numeric Delta curve and its analytic overlay where the numeric curve peaks"""
    curve = fig4[(fig4['lambda_P_m'] == lambda_P) & fig4['ok'].astype(bool)]
    if curve.empty:
        raise DomainError(f"No successful rows for lambda_P = {lambda_P!r} m")
    peak = curve.loc[curve[numeric].idxmax()]
    analytic = peak[f"{numeric}_analytic"]
    return float(abs(peak[numeric] - analytic) / abs(peak[numeric]))
