"""Data storage module for the Casimir toolkit.

This module handles output of computed datasets:
- Tabulating sweep results with a fixed column order
- CSV output (17 significant digits, LF line endings)
- JSON output with a metadata block and versioned records
"""

import os
import json
import math
import logging
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd

from combined_factors import SweepResult
from config import OUTPUT_FORMATS, SCHEMA_VERSION
from constants import CODATA_2018, PhysicalConstants
from exceptions import DomainError
from quadrature import QuadratureSpec

# Setup logging
logger = logging.getLogger(__name__)

# Define standard column order as a constant
SWEEP_CSV_COLUMNS = [
    'L_m', 'eta_F', 'eta_F_P', 'eta_F_T', 'delta_F', 'Delta_F',
    'eta_E', 'eta_E_P', 'eta_E_T', 'delta_E', 'Delta_E', 'ok',
]

FACTOR_COLUMNS = SWEEP_CSV_COLUMNS[:-1] + ['force', 'energy', 'lambda_P_m', 'T_K', 'mode', 'warnings']

CSV_FLOAT_FORMAT = '%.17g'


def build_metadata(
    spec: QuadratureSpec,
    mode: str,
    command: str,
    constants: PhysicalConstants = CODATA_2018,
) -> Dict[str, Any]:
    """Metadata block written alongside every dataset"""
    return {
        'constants_version': constants.version,
        'spec': spec.to_dict(),
        'schema_version': SCHEMA_VERSION,
        'mode': mode,
        'command': command,
    }


def sweep_frame(results: Iterable[SweepResult]) -> pd.DataFrame:
    """Tabulate sweep results, one row per distance, sorted by L.

    Failed points keep their L_m, carry NaN factors and ok = False.
    """
    rows: List[Dict[str, Any]] = []
    for result in results:
        if result.ok:
            record = result.bundle.to_record()
            row = {column: record[column] for column in SWEEP_CSV_COLUMNS[:-1]}
        else:
            row = {column: math.nan for column in SWEEP_CSV_COLUMNS[:-1]}
            row['L_m'] = result.cavity.L
        row['ok'] = result.ok
        rows.append(row)
    df = pd.DataFrame(rows, columns=SWEEP_CSV_COLUMNS)
    return df.sort_values('L_m', kind='mergesort').reset_index(drop=True)


def _json_ready(value: Any) -> Any:
    """Convert numpy scalars and NaN to plain JSON values"""
    if hasattr(value, 'item'):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_csv_text(df: pd.DataFrame) -> str:
    """Render a dataset as CSV text"""
    return df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def to_json_text(df: pd.DataFrame, metadata: Dict[str, Any]) -> str:
    """Render a dataset as a JSON document {metadata, records}"""
    records = []
    for row in df.to_dict(orient='records'):
        record = {key: _json_ready(value) for key, value in row.items()}
        record['schema_version'] = SCHEMA_VERSION
        records.append(record)
    document = {'metadata': metadata, 'records': records}
    return json.dumps(document, indent=2, allow_nan=False) + '\n'


def render_dataset(df: pd.DataFrame, output_format: str, metadata: Dict[str, Any]) -> str:
    """Render a dataset in the requested format"""
    if output_format == 'csv':
        return to_csv_text(df)
    if output_format == 'json':
        return to_json_text(df, metadata)
    raise DomainError(f"Unknown output format {output_format!r}; use one of {', '.join(OUTPUT_FORMATS)}")


def save_dataset(
    df: pd.DataFrame,
    output_format: str,
    metadata: Dict[str, Any],
    path: Optional[str] = None,
) -> str:
    """Write a dataset to path, or return it for stdout when path is None

    Args:
        df: Dataset to write
        output_format: 'csv' or 'json'
        metadata: Metadata block (used by JSON output)
        path: Destination file; None means the caller prints the text

    Returns:
        str: The rendered text
    """
    text = render_dataset(df, output_format, metadata)
    if path:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info(f"Wrote {len(df)} rows to {path}")
    return text


def save_figure_datasets(
    datasets: Dict[str, pd.DataFrame],
    output_dir: str,
    output_format: str,
    metadata: Dict[str, Any],
) -> List[str]:
    """Write one file per figure dataset into output_dir; returns the written paths"""
    os.makedirs(output_dir, exist_ok=True)
    paths = []
    for name, df in datasets.items():
        path = os.path.join(output_dir, f"{name}.{output_format}")
        save_dataset(df, output_format, dict(metadata, figure=name), path)
        paths.append(path)
    return paths
