"""
Casimir Correction-Factor Toolkit

Command-line front end for the finite-temperature Casimir force and free
energy between plane plasma-model mirrors.

Main entry point that initializes logging, parses the command line and
dispatches to the factors, sweep, figures and validate commands.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Dict, List, Optional

import pandas as pd

import config
from combined_factors import MODES, correction_bundle, sweep
from constants import CODATA_2018, CavityState, PhysicalConstants
from data_storage import FACTOR_COLUMNS, build_metadata, save_dataset, save_figure_datasets, sweep_frame
from exceptions import CasimirError, ConvergenceError, DomainError
from figures import build_figure_datasets
from quadrature import QuadratureSpec
from utils import distance_grid, parse_length, parse_temperature
from validation import checks_frame, run_validation

# Get logger for this module
logger = logging.getLogger(__name__)

COMMANDS = ('factors', 'sweep', 'figures', 'validate')

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


def setup_logging(level: str = config.LOG_LEVEL, log_dir: Optional[str] = config.LOG_DIR) -> None:
    """Configure the root logger once; stdout stays reserved for data output"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(os.path.join(log_dir, f"casimir_{datetime.now().strftime('%Y%m%d')}.log")))
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


@dataclass(frozen=True)
class RunConfig:
    """Everything one command needs, resolved from the command line and the environment.

    Attributes:
        command: One of factors, sweep, figures, validate
        L: Single distance in metres (factors)
        L_min, L_max, points, scale: Distance grid (sweep, figures)
        T: Temperature in kelvin (0 is the exact zero-temperature limit)
        lambda_P: Plasma wavelength in metres (0 is the perfect mirror)
        A: Mirror area in square metres
        output_format: 'csv' or 'json'
        output_path: File (or directory for figures); None means stdout
        mode: 'fast' or 'validation'
        spec: Quadrature tolerances
        workers: Worker processes for sweeps
    """

    command: str
    L: Optional[float] = None
    L_min: Optional[float] = None
    L_max: Optional[float] = None
    points: int = config.FIGURE_POINTS
    scale: str = 'log'
    T: float = config.DEFAULT_TEMPERATURE_K
    lambda_P: float = config.METAL_PRESETS['Al']
    A: float = config.DEFAULT_AREA_M2
    output_format: str = 'csv'
    output_path: Optional[str] = None
    mode: str = 'fast'
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    workers: int = config.DEFAULT_WORKERS
    constants: PhysicalConstants = CODATA_2018

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"Unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.mode not in MODES:
            raise DomainError(f"Unknown mode {self.mode!r}; expected one of {MODES}")
        if self.output_format not in config.OUTPUT_FORMATS:
            raise DomainError(f"Unknown output format {self.output_format!r}")
        if self.workers < 1:
            raise DomainError(f"Need at least one worker, got {self.workers!r}")

    def cavity(self, L: float) -> CavityState:
        return CavityState.from_si(L, self.T, self.lambda_P, self.A, self.constants)

    def grid(self) -> List[float]:
        if self.L_min is None or self.L_max is None:
            raise DomainError(f"'{self.command}' needs --L-min and --L-max")
        return distance_grid(self.L_min, self.L_max, self.points, self.scale).tolist()

    def metadata(self) -> Dict:
        return build_metadata(self.spec, self.mode, self.command, self.constants)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='app.py',
        description='Casimir force and free-energy correction factors for plasma-model mirrors at finite temperature.',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--T', default=None, help='Temperature in K, e.g. 300 or 300K (0 = zero temperature)')
    material = common.add_mutually_exclusive_group()
    material.add_argument('--metal', default=None, help=f"Metal preset: {config.describe_metals()}")
    material.add_argument('--lambda-P', dest='lambda_P', default=None,
                          help='Plasma wavelength, e.g. 107nm (0 = perfect mirror)')
    common.add_argument('--area', type=float, default=None, help='Mirror area in m^2')
    common.add_argument('--format', dest='output_format', choices=config.OUTPUT_FORMATS, default='csv')
    common.add_argument('--out', dest='output_path', default=None, help='Output file (directory for figures)')
    common.add_argument('--mode', choices=MODES, default='fast')
    common.add_argument('--abs-tol', type=float, default=None)
    common.add_argument('--rel-tol', type=float, default=None)
    common.add_argument('--workers', type=int, default=None)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument('--L-min', dest='L_min', default=None, help='Smallest distance, e.g. 0.1um')
    grid.add_argument('--L-max', dest='L_max', default=None, help='Largest distance, e.g. 10um')
    grid.add_argument('--points', type=int, default=None)
    grid.add_argument('--scale', choices=('log', 'linear'), default='log')

    factors = subparsers.add_parser('factors', parents=[common], help='Correction factors at one distance')
    factors.add_argument('--L', required=True, help='Mirror distance, e.g. 0.5um')
    subparsers.add_parser('sweep', parents=[common, grid], help='Correction factors over a distance grid')
    subparsers.add_parser('figures', parents=[common, grid], help='Write the figure datasets')
    subparsers.add_parser('validate', parents=[common], help='Run the validation suite')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Resolve parsed arguments into a RunConfig (DomainError on invalid values)"""
    if args.lambda_P is not None:
        lambda_P = parse_length(args.lambda_P)
    else:
        lambda_P = config.resolve_metal(args.metal or 'Al')

    is_grid = args.command in ('sweep', 'figures')
    L_min = getattr(args, 'L_min', None)
    L_max = getattr(args, 'L_max', None)
    if args.command == 'figures':
        L_min = L_min or str(config.FIGURE_L_MIN)
        L_max = L_max or str(config.FIGURE_L_MAX)
    points = getattr(args, 'points', None)

    return RunConfig(
        command=args.command,
        L=parse_length(args.L) if args.command == 'factors' else None,
        L_min=parse_length(L_min) if is_grid and L_min is not None else None,
        L_max=parse_length(L_max) if is_grid and L_max is not None else None,
        points=points if points is not None else config.FIGURE_POINTS,
        scale=getattr(args, 'scale', 'log'),
        T=parse_temperature(args.T) if args.T is not None else config.DEFAULT_TEMPERATURE_K,
        lambda_P=lambda_P,
        A=args.area if args.area is not None else config.DEFAULT_AREA_M2,
        output_format=args.output_format,
        output_path=args.output_path,
        mode=args.mode,
        spec=config.get_quadrature_spec(abs_tol=args.abs_tol, rel_tol=args.rel_tol),
        workers=args.workers if args.workers is not None else config.DEFAULT_WORKERS,
    )


def _emit(text: str, cfg: RunConfig) -> None:
    if not cfg.output_path:
        sys.stdout.write(text)
        sys.stdout.flush()


def cmd_factors(cfg: RunConfig) -> int:
    """Compute the correction bundle at one distance and write it as a single record"""
    if cfg.L is None:
        raise DomainError("'factors' needs --L")
    bundle = correction_bundle(cfg.cavity(cfg.L), cfg.spec, cfg.mode)
    df = pd.DataFrame([bundle.to_record()]).reindex(columns=FACTOR_COLUMNS)
    _emit(save_dataset(df, cfg.output_format, cfg.metadata(), cfg.output_path), cfg)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    """Correction factors over the distance grid; exit 3 if any row failed"""
    results = sweep([cfg.cavity(L) for L in cfg.grid()], cfg.spec, cfg.mode, cfg.workers)
    df = sweep_frame(results)
    _emit(save_dataset(df, cfg.output_format, cfg.metadata(), cfg.output_path), cfg)
    return EXIT_OK if df['ok'].all() else EXIT_NOT_CONVERGED


def cmd_figures(cfg: RunConfig) -> int:
    """Write fig1..fig4 into the output directory"""
    output_dir = cfg.output_path or config.OUTPUT_DIR
    datasets = build_figure_datasets(
        cfg.grid(), cfg.T, config.get_figure_plasma_wavelengths(), cfg.spec, cfg.mode, cfg.workers,
        cfg.A, cfg.constants,
    )
    paths = save_figure_datasets(datasets, output_dir, cfg.output_format, cfg.metadata())
    logger.info(f"Figure datasets written: {', '.join(paths)}")
    all_ok = all(df['ok'].astype(bool).all() for df in datasets.values())
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def cmd_validate(cfg: RunConfig) -> int:
    """Run the validation suite and print (or save) the check table; exit 1 on any failure"""
    checks = run_validation(cfg.mode, cfg.spec, cfg.constants, cfg.workers)
    df = checks_frame(checks)
    if cfg.output_path:
        save_dataset(df, cfg.output_format, cfg.metadata(), cfg.output_path)
    else:
        with pd.option_context('display.max_colwidth', None, 'display.width', 200):
            sys.stdout.write(df.to_string(index=False) + '\n')
    return EXIT_OK if df['passed'].all() else EXIT_VALIDATION_FAILED


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    'factors': cmd_factors,
    'sweep': cmd_sweep,
    'figures': cmd_figures,
    'validate': cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code"""
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    try:
        cfg = config_from_args(args)
        logger.info(f"Running '{cfg.command}' (mode={cfg.mode}, T={cfg.T} K, lambda_P={cfg.lambda_P} m)")
        return HANDLERS[cfg.command](cfg)
    except DomainError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_USAGE
    except ConvergenceError as e:
        logger.error(f"Numerical evaluation did not converge: {e}", exc_info=True)
        return EXIT_NOT_CONVERGED
    except CasimirError as e:
        logger.error(f"Computation failed: {e}", exc_info=True)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
