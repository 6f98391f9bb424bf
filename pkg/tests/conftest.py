"""Configure the test environment for the Galerkin blow-up package."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

SRC_ROOT = Path(__file__).resolve().parents[1] / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded random generator.

    Returns:
        numpy.random.Generator: Generator with a fixed seed.

    """

    return np.random.default_rng(20240517)
