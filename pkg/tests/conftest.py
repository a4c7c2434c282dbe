import os
import sys

import pytest

# Flat-module layout: make the repository root importable
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import METAL_PRESETS  # noqa: E402
from constants import CavityState  # noqa: E402
from quadrature import DEFAULT_SPEC, QuadratureSpec  # noqa: E402


@pytest.fixture
def spec() -> QuadratureSpec:
    return DEFAULT_SPEC


@pytest.fixture
def loose_spec() -> QuadratureSpec:
    return QuadratureSpec(abs_tol=1e-8, rel_tol=1e-7)


@pytest.fixture
def al_cavity() -> CavityState:
    return CavityState.from_si(1e-6, 300.0, METAL_PRESETS["Al"])


@pytest.fixture
def cu_cavity() -> CavityState:
    return CavityState.from_si(1e-6, 300.0, METAL_PRESETS["Cu"])
