"""
Fixtures partagées pour la suite de tests
"""
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.discretization.mesh import build_interval, build_rectangle  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_interval_3():
    return build_interval(1.0, 3)


@pytest.fixture
def single_node():
    """n=1 on (0,1): h = 0.5"""
    return build_interval(1.0, 1)


@pytest.fixture
def interval_16():
    return build_interval(1.0, 16)


@pytest.fixture
def square_4():
    return build_rectangle(1.0, 1.0, 4, 4)
