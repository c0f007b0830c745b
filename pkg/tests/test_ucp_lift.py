"""Tests for the diagonal pullover and phase-damping maps on n x n matrices."""

import math

import numpy as np
import pytest

from analysis import catalog
from analysis.chain_structure import canonical_form
from analysis.errors import RowSumViolation
from analysis.matrix_core import StochasticMatrix, numerical_rank
from analysis.spectral import peripheral_projection, peripheral_spectrum
from analysis.ucp_lift import (
    Superoperator,
    coords_to_matrix,
    diag_pullover,
    embedded_stochastic,
    eigenvector_transfer_residual,
    matrix_to_coords,
    pad,
    persistent_iso_check,
    phase_damping,
    superop_peripheral,
    unit_order,
)

# (alpha, beta) pairs covering aperiodic, absorbing and periodic embedded chains
ANGLE_GRID = [
    (0.1, 0.2),
    (0.3, 1.2),
    (0.7, 0.9),
    (math.pi / 4, math.pi / 4),
    (0.0, math.pi / 2),
    (math.pi / 2, 0.0),
    (1.0, 0.4),
    (1.3, 1.5),
    (0.5, 0.5),
    (0.2, 1.4),
]


def test_unit_order() -> None:
    """Test diagonal units come first, then off-diagonal units row by row."""
    assert unit_order(2) == [(0, 0), (1, 1), (0, 1), (1, 0)]
    assert unit_order(3)[:3] == [(0, 0), (1, 1), (2, 2)]
    assert unit_order(3)[3:5] == [(0, 1), (0, 2)]


def test_coordinates() -> None:
    """Test matrix-unit coordinates of a 2 x 2 matrix."""
    A = np.array([[1.0, 2.0], [3.0, 4.0]])

    np.testing.assert_array_equal(matrix_to_coords(A), [1.0, 4.0, 2.0, 3.0])
    np.testing.assert_array_equal(coords_to_matrix(matrix_to_coords(A), 2), A)
    np.testing.assert_array_equal(pad(np.array([1.0, 2.0]), 2), [1.0, 2.0, 0.0, 0.0])


def test_diag_pullover_top_block_is_exact(footnote: StochasticMatrix) -> None:
    """Test the diagonal block of the pullover is S bit for bit."""
    phi = diag_pullover(footnote)

    assert phi.M.shape == (9, 9)
    assert np.array_equal(phi.stochastic_block, footnote.entries)
    assert np.all(phi.M[3:] == 0)
    assert phi.unitality_residual() <= 1e-15


def test_diag_pullover_action(two_state: StochasticMatrix) -> None:
    """Test Phi(a) = diag(S diag(a))."""
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    image = diag_pullover(two_state)(A)

    np.testing.assert_allclose(image, np.diag(two_state.entries @ np.array([1.0, 4.0])))


def test_phase_damping_quarter_turn_is_exact() -> None:
    """Test both first rows equal one half bit-exactly at alpha = beta = pi/4."""
    phi = phase_damping(math.pi / 4, math.pi / 4)

    assert phi.M[0].tolist() == [0.5, 0.5, 0.5, 0.5]
    assert phi.M[1].tolist() == [0.5, 0.5, 0.5, 0.5]
    assert np.all(phi.M[2:] == 0)


def test_phase_damping_embedded_identity() -> None:
    """Test alpha = 0, beta = pi/2 embeds the identity chain."""
    phi = phase_damping(0.0, 1.5707963268)
    S = embedded_stochastic(phi)

    np.testing.assert_array_equal(S.entries, np.eye(2))


def test_embedded_stochastic_validates() -> None:
    """Test a diagonal block that is not stochastic is rejected."""
    M = np.zeros((4, 4))
    M[0, 0] = 0.5
    M[1, 1] = 1.0

    with pytest.raises(RowSumViolation):
        embedded_stochastic(Superoperator(n=2, M=M))


def test_superop_peripheral_restricts_to_p(s3: StochasticMatrix) -> None:
    """Test P_phi restricted to the diagonal block equals P_S."""
    rf = canonical_form(s3)
    P_phi = superop_peripheral(diag_pullover(s3), rf)

    np.testing.assert_allclose(P_phi[:3, :3], peripheral_projection(s3, rf), atol=1e-12)


def test_eigenvector_transfer(cycle_2_3: StochasticMatrix) -> None:
    """Test padded peripheral eigenvectors of S stay eigenvectors of M."""
    rf = canonical_form(cycle_2_3)
    P = peripheral_projection(cycle_2_3, rf)
    residual = eigenvector_transfer_residual(
        diag_pullover(cycle_2_3), P, rf.L, peripheral_spectrum(rf)
    )

    assert residual <= 1e-9


def test_iso_check_quarter_turn() -> None:
    """Test the persistent system of phase damping at pi/4 is one-dimensional."""
    phi = phase_damping(0.7853981634, 0.7853981634)
    report = persistent_iso_check(phi, embedded_stochastic(phi))

    assert report.holds
    assert report.rank_phi == 1
    assert report.as_dict()["holds"] is True


def test_iso_check_embedded_identity() -> None:
    """Test two persistent dimensions when the embedded chain is the identity."""
    phi = phase_damping(0.0, 1.5707963268)
    report = persistent_iso_check(phi, embedded_stochastic(phi))

    assert report.holds
    assert report.rank_phi == 2
    assert report.top_block_exact


@pytest.mark.parametrize(("alpha", "beta"), ANGLE_GRID)
def test_iso_check_phase_damping_grid(alpha: float, beta: float) -> None:
    """Test the isomorphism across the angle grid."""
    phi = phase_damping(alpha, beta)
    report = persistent_iso_check(phi, embedded_stochastic(phi))

    assert report.holds, report
    assert report.rank_phi == report.rank_s


@pytest.mark.parametrize("name", sorted(catalog.NAMED))
def test_iso_check_pullover(name: str) -> None:
    """Test the pullover of every named matrix keeps its persistent system."""
    S = catalog.named(name)
    report = persistent_iso_check(diag_pullover(S), S)

    assert report.holds, report
    assert report.eigen_residual <= 1e-9


def _zero_count(values: np.ndarray) -> int:
    return int(np.sum(np.abs(values) <= 1e-9))


@pytest.mark.parametrize("name", ["two-state", "s3", "footnote", "cycle-3"])
def test_pullover_spectrum(name: str) -> None:
    """Test the pullover has the spectrum of S plus n(n - 1) extra zeros."""
    S = catalog.named(name)
    n = S.n
    M = diag_pullover(S).M
    values_m = np.linalg.eigvals(M)
    values_s = np.linalg.eigvals(S.entries)

    assert _zero_count(values_m) == n * (n - 1) + _zero_count(values_s)
    nonzero_m = np.sort_complex(values_m[np.abs(values_m) > 1e-9])
    nonzero_s = np.sort_complex(values_s[np.abs(values_s) > 1e-9])
    np.testing.assert_allclose(nonzero_m, nonzero_s, atol=1e-9)
    assert numerical_rank(M @ M) == numerical_rank(S.entries @ M[:n])


@pytest.mark.parametrize(("alpha", "beta"), ANGLE_GRID)
def test_phase_damping_square_rank(alpha: float, beta: float) -> None:
    """Test M^2 has the rank of S applied to the top block row, with S exact on top."""
    phi = phase_damping(alpha, beta)
    S = embedded_stochastic(phi)

    assert np.array_equal(phi.stochastic_block, S.entries)
    assert numerical_rank(phi.M @ phi.M) == numerical_rank(S.entries @ phi.M[:2])
