"""
Test Configuration and Fixtures for faircert

Provides shared statistics tables, sample batches and solver options for
all slices.
"""

import sys
import tempfile
from pathlib import Path
from typing import Generator, List

import numpy as np
import pytest

# Add project root to path so 'slices', 'master_core' and 'main' import
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from slices.slice_solver.core import SolverOptions  # noqa: E402
from slices.slice_stats.core import SampleBatch, StatsTable, SubpopStats  # noqa: E402


# =============================================================================
# Pytest Configuration
# =============================================================================

def pytest_configure(config):
    """Configure pytest."""
    config.addinivalue_line("markers", "integration: end-to-end runs of the command line")
    config.addinivalue_line("markers", "slow: long-running numerical checks")


# =============================================================================
# Helpers
# =============================================================================

def make_table(E: List[List[float]], V: List[List[float]], p: List[List[float]], n: int = 100, M=1.0) -> StatsTable:
    """StatsTable from row-major S x C matrices."""
    S, C = len(E), len(E[0])
    cells = [
        SubpopStats(s=s, y=y, n=n, E=E[s][y], V=V[s][y], p=p[s][y])
        for s in range(S)
        for y in range(C)
    ]
    return StatsTable(S=S, C=C, M=M, cells=cells)


def random_table(rng: np.random.Generator, n: int = 100) -> StatsTable:
    """Random binary table with masses of at least 0.02 and variances any [0, 1] loss can have."""
    E = rng.uniform(0.05, 0.95, size=(2, 2))
    V = rng.uniform(0.3, 1.0, size=(2, 2)) * E * (1.0 - E)
    p = (0.02 + 0.92 * rng.dirichlet(np.ones(4))).reshape(2, 2)
    p = p / p.sum()
    return make_table(E.tolist(), V.tolist(), p.tolist(), n=n)


# =============================================================================
# Fixtures
# =============================================================================

@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmp:
        yield Path(tmp)


@pytest.fixture
def uniform_table() -> StatsTable:
    """Binary table with equal masses and E = (0.1, 0.2; 0.3, 0.4)."""
    return make_table(
        E=[[0.1, 0.2], [0.3, 0.4]],
        V=[[0.09, 0.16], [0.21, 0.24]],
        p=[[0.25, 0.25], [0.25, 0.25]],
    )


@pytest.fixture
def diagonal_table() -> StatsTable:
    """Binary table with all mass on the diagonal (0.9, 0, 0, 0.1)."""
    return make_table(
        E=[[0.2, 0.5], [0.5, 0.6]],
        V=[[0.16, 0.25], [0.25, 0.24]],
        p=[[0.9, 0.0], [0.0, 0.1]],
    )


@pytest.fixture
def skewed_table() -> StatsTable:
    """Binary table with unequal masses and moderate variances."""
    return make_table(
        E=[[0.15, 0.35], [0.25, 0.45]],
        V=[[0.12, 0.2], [0.18, 0.24]],
        p=[[0.4, 0.1], [0.2, 0.3]],
        n=400,
    )


@pytest.fixture
def fast_solver() -> SolverOptions:
    """Coarser scans for tests; results stay within 1e-6 of the defaults."""
    return SolverOptions(scan_steps=400, polish_rounds=6, multistarts=6)


@pytest.fixture
def loss_batch() -> SampleBatch:
    """Deterministic loss-mode samples covering all four binary cells."""
    rng = np.random.default_rng(11)
    n = 2000
    s = rng.integers(0, 2, size=n)
    y = rng.integers(0, 2, size=n)
    rates = np.array([[0.1, 0.3], [0.2, 0.4]])
    loss = (rng.uniform(size=n) < rates[s, y]).astype(float)
    shifted = (rng.uniform(size=n) < 0.5).astype(float)
    return SampleBatch(s=s, y=y, loss=loss, shifted_loss=shifted)
