"""Pytest configuration and fixtures."""

import sys
from pathlib import Path

import pytest

# Add src directory to Python path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from analysis import catalog  # noqa: E402
from analysis.matrix_core import StochasticMatrix  # noqa: E402


@pytest.fixture
def footnote() -> StochasticMatrix:
    """Upper-triangular chain with transient states 0, 1 and absorbing state 2."""
    return catalog.footnote()


@pytest.fixture
def s3() -> StochasticMatrix:
    """One transient state feeding a 2-cycle."""
    return catalog.s3()


@pytest.fixture
def two_state() -> StochasticMatrix:
    """Two-state chain with p = 1/3, q = 1/6."""
    return catalog.two_state()


@pytest.fixture
def cycle_2_3() -> StochasticMatrix:
    """Disjoint 2-cycle and 3-cycle, so L = 6."""
    return catalog.block_diag(catalog.cycle(2), catalog.cycle(3))


@pytest.fixture
def footnote_csv(tmp_path: Path) -> Path:
    """The footnote matrix written as CSV with ten-digit decimals."""
    path = tmp_path / "footnote.csv"
    path.write_text("0.5,0.25,0.25\n0,0.6666666667,0.3333333333\n0,0,1\n")
    return path


@pytest.fixture
def identity_json(tmp_path: Path) -> Path:
    """2 x 2 identity as a JSON document."""
    path = tmp_path / "identity.json"
    path.write_text('{"matrix": [[1, 0], [0, 1]], "name": "identity"}')
    return path
