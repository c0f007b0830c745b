"""Dense matrix helpers and validated construction of stochastic matrices.

Matrices are plain numpy float64 arrays. Norms are taken as operators on
(R^n, sup-norm), i.e. the maximum absolute row sum.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import InputError, NegativeEntry, NonSquare, RowSumViolation

logger = logging.getLogger(__name__)

DenseMatrix = NDArray[np.float64]
RealVector = NDArray[np.float64]

DEFAULT_VALIDATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A validated row-stochastic square matrix; the entries array is read-only."""

    entries: DenseMatrix

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def ones(self) -> RealVector:
        return np.ones(self.n)

    def __matmul__(self, other: NDArray) -> NDArray:
        return self.entries @ other

    def tolist(self) -> list[list[float]]:
        return self.entries.tolist()


MatrixLike = Union[StochasticMatrix, NDArray]


def as_array(A: MatrixLike) -> NDArray:
    """Unwrap a StochasticMatrix, pass arrays through."""
    return A.entries if isinstance(A, StochasticMatrix) else np.asarray(A)


def make_stochastic(
    rows: Sequence[Sequence[float]] | NDArray, validation_tol: float = DEFAULT_VALIDATION_TOL
) -> StochasticMatrix:
    """
    Validate and repair a candidate stochastic matrix.

    Entries in [-validation_tol, 0) are clamped to zero and rows whose sum is within
    validation_tol of 1 are renormalized. Anything further off is rejected.

    Args:
        rows: Square array-like of reals
        validation_tol: Allowed slack, must be positive

    Raises:
        NonSquare: Input is empty, ragged or not square
        NegativeEntry: Some entry is below -validation_tol
        RowSumViolation: Some row sum deviates from 1 by more than validation_tol
    """
    if validation_tol <= 0:
        raise ValueError(f"validation_tol must be positive, got {validation_tol}")

    try:
        data = np.array(rows, dtype=np.float64)
    except ValueError as e:
        raise NonSquare(f"matrix rows have unequal lengths: {e}") from e

    if data.ndim != 2 or data.shape[0] == 0 or data.shape[0] != data.shape[1]:
        raise NonSquare(f"expected a non-empty square matrix, got shape {data.shape}")
    if not np.all(np.isfinite(data)):
        raise InputError("matrix contains non-finite entries")

    neg = np.argwhere(data < -validation_tol)
    if neg.size:
        i, j = (int(v) for v in neg[0])
        raise NegativeEntry(f"entry ({i}, {j}) = {data[i, j]!r} is below -{validation_tol}")
    data[data < 0] = 0.0

    sums = data.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > validation_tol)
    if bad.size:
        i = int(bad[0])
        raise RowSumViolation(f"row {i} sums to {sums[i]!r}, expected 1 within {validation_tol}")

    off = sums != 1.0
    if np.any(off):
        logger.debug("renormalizing %d rows", int(off.sum()))
        data[off] /= sums[off, None]

    data.setflags(write=False)
    return StochasticMatrix(entries=data)


def mat_power(A: MatrixLike, k: int) -> DenseMatrix:
    """A^k by binary exponentiation; A^0 is the identity."""
    if k < 0:
        raise ValueError(f"exponent must be nonnegative, got {k}")
    arr = as_array(A)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"matrix power needs a square matrix, got shape {arr.shape}")
    return np.linalg.matrix_power(arr, k)


def inf_op_norm(A: MatrixLike) -> float:
    """Maximum absolute row sum."""
    arr = np.atleast_2d(as_array(A))
    if arr.size == 0:
        return 0.0
    return float(np.abs(arr).sum(axis=1).max())


def rank_threshold(A: NDArray, floor: float = 1e-7) -> float:
    n = max(A.shape) if A.size else 1
    return max(floor, n * np.finfo(np.float64).eps * inf_op_norm(A))


def pivoted_columns(A: NDArray, floor: float = 1e-7) -> tuple[int, list[int]]:
    """
    Numerical rank and column pivot order from a column-pivoted QR.

    Returns:
        (rank, pivots) where pivots[:rank] index linearly independent columns
    """
    arr = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if arr.size == 0:
        return 0, []
    _, R, piv = scipy.linalg.qr(arr, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.count_nonzero(diag > rank_threshold(arr, floor)))
    return rank, [int(p) for p in piv]


def numerical_rank(A: NDArray, floor: float = 1e-7) -> int:
    return pivoted_columns(A, floor)[0]


def indicator(n: int, states: Iterable[int]) -> RealVector:
    """0/1 vector of length n supported on states."""
    x = np.zeros(n)
    x[list(states)] = 1.0
    return x
