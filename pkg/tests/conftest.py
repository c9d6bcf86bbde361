"""
共享测试夹具
"""

import numpy as np
import pytest

from thermoporo_splitting.problems import geothermal_problem, toy_problem


@pytest.fixture
def toy():
    """α = 0.2, c̃₀ = 2 的玩具系统"""
    return toy_problem(0.2, 2.0)


@pytest.fixture(scope="session")
def geothermal_small():
    return geothermal_problem(n=4)


@pytest.fixture(scope="session")
def geothermal():
    return geothermal_problem(n=8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
