"""Shared fixtures for the krein_layers test suite"""

import sys
import os

# Add the repository root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from krein_layers.boundary.geometry import CurveParam, discretize_curve


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def circle_grid():
    return discretize_curve(CurveParam.circle(), 64)


@pytest.fixture
def kite_grid():
    return discretize_curve(CurveParam.kite(), 128)
