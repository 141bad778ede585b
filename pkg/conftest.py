"""
Shared pytest fixtures for the semiflow test suite.
"""
import numpy as np
import pytest

from semiflow.models.config import SolverConfig, SolverMode


@pytest.fixture
def rng():
    """Seeded generator; every test that draws random data starts from the same state."""
    return np.random.default_rng(7)


@pytest.fixture
def accelerated_cfg():
    return SolverConfig(order=2, tol=1e-12, max_outer=60, mode=SolverMode.ACCELERATED)


@pytest.fixture
def plain_cfg():
    return SolverConfig(tol=1e-12, max_outer=500, mode=SolverMode.PLAIN)
