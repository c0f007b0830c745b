"""Unital maps on n x n matrices built from a stochastic matrix, as superoperators.

Matrices are coordinatized in the matrix-unit basis with all diagonal units
e_kk first (ascending k) and then the off-diagonal units e_kl in row-major order,
so both families below take the block shape [[S, B], [0, 0]].
"""

import logging
import math
from dataclasses import asdict, dataclass
from itertools import product
from typing import Any

import numpy as np

from config import DEFAULT_SETTINGS, AnalysisSettings

from .chain_structure import ReducedForm, canonical_form
from .choi_effros import persistent_basis
from .matrix_core import (
    DenseMatrix,
    StochasticMatrix,
    inf_op_norm,
    make_stochastic,
    mat_power,
    numerical_rank,
)
from .spectral import (
    distinct_values,
    eigenprojection,
    peripheral_projection,
    peripheral_spectrum,
    squaring_limit,
)

logger = logging.getLogger(__name__)


def unit_order(n: int) -> list[tuple[int, int]]:
    """Matrix units (k, l) in coordinate order: diagonal first, then row-major off-diagonal."""
    diagonal = [(k, k) for k in range(n)]
    off = [(k, l) for k, l in product(range(n), repeat=2) if k != l]
    return diagonal + off


def matrix_to_coords(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    return np.array([A[k, l] for k, l in unit_order(n)])


def coords_to_matrix(x: np.ndarray, n: int) -> np.ndarray:
    A = np.zeros((n, n), dtype=x.dtype)
    for value, (k, l) in zip(x, unit_order(n), strict=True):
        A[k, l] = value
    return A


def pad(xi: np.ndarray, n: int) -> np.ndarray:
    """Embed diagonal coordinates into the full n^2 coordinate vector."""
    out = np.zeros(n * n, dtype=xi.dtype)
    out[:n] = xi
    return out


@dataclass(frozen=True, eq=False)
class Superoperator:
    """A linear map on n x n matrices as an n^2 x n^2 matrix in the unit_order basis."""

    n: int
    M: DenseMatrix

    @property
    def basis_order(self) -> list[tuple[int, int]]:
        return unit_order(self.n)

    @property
    def stochastic_block(self) -> DenseMatrix:
        return self.M[: self.n, : self.n]

    def __call__(self, A: np.ndarray) -> np.ndarray:
        return coords_to_matrix(self.M @ matrix_to_coords(A), self.n)

    def unitality_residual(self) -> float:
        one = matrix_to_coords(np.eye(self.n))
        return float(np.max(np.abs(self.M @ one - one)))


def diag_pullover(S: StochasticMatrix) -> Superoperator:
    """Phi(a) = diag(S diag(a)): S composed with the diagonal conditional expectation."""
    n = S.n
    M = np.zeros((n * n, n * n))
    M[:n, :n] = S.entries
    return Superoperator(n=n, M=M)


def phase_damping(alpha: float, beta: float) -> Superoperator:
    """
    Two-angle map on 2 x 2 matrices in the basis {e_11, e_22, e_12, e_21}.

    Rows are (cos^2 a, sin^2 a, sin(2a)/2, sin(2a)/2) for a = alpha, beta, and
    zero below. cos^2 is taken as (1 + cos 2a)/2 and sin^2 as 1 - cos^2, which keeps
    the rows summing to exactly 1 on the diagonal block.
    """
    M = np.zeros((4, 4))
    for row, angle in enumerate((alpha, beta)):
        cos2 = (1.0 + math.cos(2 * angle)) / 2
        half_sin = math.sin(2 * angle) / 2
        M[row] = (cos2, 1.0 - cos2, half_sin, half_sin)
    return Superoperator(n=2, M=M)


def embedded_stochastic(phi: Superoperator, validation_tol: float = 1e-9) -> StochasticMatrix:
    """The diagonal block S, validated."""
    return make_stochastic(phi.stochastic_block, validation_tol)


def superop_peripheral(
    phi: Superoperator,
    rf_of_S: ReducedForm,
    proj_tol: float = DEFAULT_SETTINGS.proj_tol,
    max_squarings: int = DEFAULT_SETTINGS.max_squarings,
) -> DenseMatrix:
    """Peripheral projection of M by the same L-power squaring as for S."""
    P, _ = squaring_limit(mat_power(phi.M, rf_of_S.L), proj_tol, max_squarings)
    return P


def eigenvector_transfer_residual(
    phi: Superoperator, P_S: DenseMatrix, L: int, values: list[complex]
) -> float:
    """
    max ||M (xi, 0) - lambda (xi, 0)|| over columns xi of every peripheral E_lambda of S.
    """
    n = phi.n
    worst = 0.0
    for lam in distinct_values(values):
        re, im = eigenprojection(phi.stochastic_block, P_S, L, lam, predicted=values)
        E = re + 1j * im
        for col in E.T:
            x = pad(col, n)
            worst = max(worst, float(np.max(np.abs(phi.M @ x - lam * x))))
    return worst


@dataclass(frozen=True)
class IsoReport:
    """Comparison of the persistent system of a lifted map with that of its stochastic block."""

    rank_phi: int
    rank_s: int
    diagonal_residual: float
    dynamics_residual: float
    range_residual: float
    product_residual: float
    eigen_residual: float
    top_block_exact: bool
    tol: float

    @property
    def holds(self) -> bool:
        return (
            self.rank_phi == self.rank_s
            and max(
                self.diagonal_residual,
                self.dynamics_residual,
                self.range_residual,
                self.product_residual,
            )
            <= self.tol
        )

    def as_dict(self) -> dict[str, Any]:
        return {**asdict(self), "holds": self.holds}


def persistent_iso_check(
    phi: Superoperator,
    S: StochasticMatrix,
    tol: float = DEFAULT_SETTINGS.alg_tol,
    settings: AnalysisSettings = DEFAULT_SETTINGS,
) -> IsoReport:
    """
    Verify that the persistent system of phi is isomorphic to that of S.

    The isomorphism is the inclusion of diagonal-unit coordinates: ranks of the
    two peripheral projections agree, P_phi and M P_phi restrict to P_S and S P_S
    on the diagonal block, and the Choi-Effros products agree, the lifted one
    computed with the genuine matrix product.
    """
    n = phi.n
    rf = canonical_form(S, settings.zero_tol)
    P_S = peripheral_projection(S, rf, settings.proj_tol, settings.max_squarings)
    P_phi = superop_peripheral(phi, rf, settings.proj_tol, settings.max_squarings)

    diagonal_residual = inf_op_norm(P_phi[:n, :n] - P_S)
    dynamics_residual = inf_op_norm((phi.M @ P_phi)[:n, :n] - S.entries @ P_S)

    basis = persistent_basis(P_S, settings.rank_tol)
    lifted = [pad(xi, n) for xi in basis]
    range_residual = max((float(np.max(np.abs(P_phi @ x - x))) for x in lifted), default=0.0)

    product_residual = 0.0
    for (xi, x), (zeta, y) in product(zip(basis, lifted, strict=True), repeat=2):
        XY = coords_to_matrix(x, n) @ coords_to_matrix(y, n)
        lifted_product = P_phi @ matrix_to_coords(XY)
        scalar_product = pad(P_S @ (xi * zeta), n)
        product_residual = max(
            product_residual, float(np.max(np.abs(lifted_product - scalar_product)))
        )

    report = IsoReport(
        rank_phi=numerical_rank(P_phi, settings.rank_tol),
        rank_s=numerical_rank(P_S, settings.rank_tol),
        diagonal_residual=diagonal_residual,
        dynamics_residual=dynamics_residual,
        range_residual=range_residual,
        product_residual=product_residual,
        eigen_residual=eigenvector_transfer_residual(phi, P_S, rf.L, peripheral_spectrum(rf)),
        top_block_exact=bool(np.array_equal(phi.stochastic_block, S.entries)),
        tol=tol,
    )
    if not report.holds:
        logger.warning("persistent isomorphism check failed: %s", report)
    return report
