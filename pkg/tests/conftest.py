"""
Shared fixtures for the test suite.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from graphs import from_edge_list, make_named


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv("CORRGRAPH_SEED", raising=False)


@pytest.fixture
def k3():
    return make_named("complete", 3)


@pytest.fixture
def k5():
    return make_named("complete", 5)


@pytest.fixture
def c5():
    return make_named("cycle", 5)


@pytest.fixture
def petersen():
    return make_named("petersen")


@pytest.fixture
def p3():
    return from_edge_list(3, [(0, 1), (1, 2)], name="P3")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
