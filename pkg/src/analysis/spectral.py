"""Peripheral projection, ergodic projection and eigenprojections without an eigensolver.

The peripheral spectrum is read off the reduced form (the d_j-th roots of unity
of each recurrent class), so the restriction of S to the persistent subspace has
order L = lcm(d_j). That makes every projection a finite group average or a
limit of S^(L * 2^m), both of which converge without computing eigenvalues.
"""

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from config import DEFAULT_SETTINGS, AnalysisSettings

from .chain_structure import ReducedForm
from .errors import DecoherenceTimeout, NoConvergence, NotPeripheral
from .matrix_core import (
    DenseMatrix,
    MatrixLike,
    StochasticMatrix,
    as_array,
    inf_op_norm,
    mat_power,
    numerical_rank,
)

logger = logging.getLogger(__name__)

ROOT_TOL = 1e-12
PREDICTED_TOL = 1e-9


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary distribution of one recurrent class, as a weight per state."""

    weights: np.ndarray
    class_index: int


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Peripheral spectral data of a stochastic matrix."""

    P: DenseMatrix
    E1: DenseMatrix
    L: int
    peripheral_values: tuple[complex, ...]
    gap_estimate: float
    rank_P: int
    rank_E1: int
    squarings: int

    @property
    def Q(self) -> DenseMatrix:
        """Complementary projection onto the vanishing part."""
        return np.eye(self.P.shape[0]) - self.P


def squaring_limit(A0: np.ndarray, proj_tol: float, max_squarings: int) -> tuple[np.ndarray, int]:
    """
    Iterate A -> A @ A until successive iterates differ by at most proj_tol.

    Returns:
        (limit, number of squarings performed)

    Raises:
        NoConvergence: max_squarings exhausted
    """
    A = np.asarray(A0, dtype=np.float64)
    for m in range(max_squarings):
        B = A @ A
        if inf_op_norm(B - A) <= proj_tol:
            logger.debug("squaring limit reached after %d squarings", m + 1)
            return B, m + 1
        A = B
    raise NoConvergence(
        f"no convergence after {max_squarings} squarings; the mass gap is below resolution"
    )


def peripheral_projection(
    S: StochasticMatrix,
    rf: ReducedForm,
    proj_tol: float = DEFAULT_SETTINGS.proj_tol,
    max_squarings: int = DEFAULT_SETTINGS.max_squarings,
) -> DenseMatrix:
    """P_S as the limit of S^(L * 2^m), starting from S^L."""
    P, _ = squaring_limit(mat_power(S, rf.L), proj_tol, max_squarings)
    return P


def ergodic_projection(S: MatrixLike, P: DenseMatrix, L: int) -> DenseMatrix:
    """E_1 = (1/L) sum_{m<L} S^m P, exact since S restricted to range(P) has order L."""
    arr = as_array(S)
    acc = np.zeros_like(P)
    term = np.array(P, dtype=np.float64)
    for _ in range(L):
        acc += term
        term = arr @ term
    return acc / L


def cesaro_mean(S: MatrixLike, n: int, burn_in: int = 0) -> DenseMatrix:
    """
    Literal average (1/n) sum_{k<n} S^(burn_in + k).

    With burn_in = 0 this is the Cesaro mean, converging to E_1 at rate O(1/n).
    A positive burn_in drops the transient head of the average.
    """
    if n < 1:
        raise ValueError(f"Cesaro mean needs n >= 1, got {n}")
    arr = as_array(S)
    term = mat_power(arr, burn_in)
    acc = np.zeros_like(term)
    for _ in range(n):
        acc += term
        term = arr @ term
    return acc / n


def _root_of_unity(k: int, d: int) -> complex:
    angle = 2 * math.pi * k / d
    re, im = math.cos(angle), math.sin(angle)
    return complex(0.0 if abs(re) < 1e-15 else re, 0.0 if abs(im) < 1e-15 else im)


def peripheral_spectrum(rf: ReducedForm) -> list[complex]:
    """Multiset union over recurrent classes of the d_j-th roots of unity."""
    return [_root_of_unity(k, c.period) for c in rf.classes for k in range(c.period)]


def distinct_values(values: Sequence[complex], tol: float = ROOT_TOL) -> list[complex]:
    out: list[complex] = []
    for v in values:
        if all(abs(v - w) > tol for w in out):
            out.append(v)
    return out


def eigenprojection(
    S: MatrixLike,
    P: DenseMatrix,
    L: int,
    lam: complex,
    predicted: Sequence[complex] | None = None,
) -> tuple[DenseMatrix, DenseMatrix]:
    """
    Peripheral eigenprojection E_lambda = (1/L) sum_{m<L} lambda^(-m) S^m P.

    Returns:
        (real part, imaginary part)

    Raises:
        NotPeripheral: lambda^L != 1, or lambda is not among the predicted values
    """
    if abs(lam**L - 1) > ROOT_TOL:
        raise NotPeripheral(f"{lam} is not an {L}-th root of unity")
    if predicted is not None and all(abs(lam - v) > PREDICTED_TOL for v in predicted):
        raise NotPeripheral(f"{lam} is not in the predicted peripheral spectrum")

    arr = as_array(S)
    acc = np.zeros(P.shape, dtype=np.complex128)
    term = np.array(P, dtype=np.float64)
    for m in range(L):
        acc += cmath.exp(-1j * m * cmath.phase(lam)) * term
        term = arr @ term
    acc /= L
    return acc.real.copy(), acc.imag.copy()


def spectral_reconstruction_residuals(
    S: MatrixLike, P: DenseMatrix, L: int, values: Sequence[complex]
) -> tuple[float, float]:
    """
    Residuals of the peripheral decomposition over the distinct predicted values.

    Returns:
        (||sum E_lambda - P||, ||S P - sum lambda E_lambda||)
    """
    arr = as_array(S)
    total = np.zeros(P.shape, dtype=np.complex128)
    action = np.zeros(P.shape, dtype=np.complex128)
    for lam in distinct_values(values):
        re, im = eigenprojection(arr, P, L, lam, predicted=values)
        E = re + 1j * im
        total += E
        action += lam * E
    sum_residual = float(np.abs(total - P).sum(axis=1).max())
    action_residual = float(np.abs(arr @ P - action).sum(axis=1).max())
    return sum_residual, action_residual


def mass_gap_estimate(
    S: MatrixLike, P: DenseMatrix, iters: int = DEFAULT_SETTINGS.gap_iters
) -> float:
    """
    1 - r, r estimating the spectral radius of S(I - P) as ||T^(2^m)||^(1/2^m).

    The powers are renormalized after each squaring and their scale is carried in
    log form, so the estimate survives far past the point where T^(2^m) underflows.
    Returns 1 when S(I - P) is numerically nilpotent.
    """
    arr = as_array(S)
    T = arr @ (np.eye(arr.shape[0]) - P)
    norm = inf_op_norm(T)
    if norm == 0.0:
        return 1.0

    log_scale = math.log(norm)
    U = T / norm
    r = norm
    for m in range(1, iters + 1):
        V = U @ U
        nv = inf_op_norm(V)
        if nv < 1e-300:
            logger.debug("S(I-P) nilpotent after %d squarings", m)
            return 1.0
        log_scale = 2 * log_scale + math.log(nv)
        U = V / nv
        r = math.exp(log_scale / 2**m)

    gap = 1.0 - min(r, 1.0)
    return gap if gap > 0 else float(np.finfo(np.float64).eps)


def decoherence_time(
    S: MatrixLike,
    P: DenseMatrix,
    epsilon: float = DEFAULT_SETTINGS.epsilon,
    t_max: int = DEFAULT_SETTINGS.t_max,
) -> int:
    """
    Smallest t >= 0 with ||S^t (I - P)|| <= epsilon, by linear scan.

    Raises:
        DecoherenceTimeout: t_max exceeded
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    arr = as_array(S)
    M = np.eye(arr.shape[0]) - P
    t = 0
    while inf_op_norm(M) > epsilon:
        t += 1
        if t > t_max:
            raise DecoherenceTimeout(f"transient part still above {epsilon} after {t_max} steps")
        M = arr @ M
    return t


def subsequence_residuals(S: MatrixLike, P: DenseMatrix, L: int, m_max: int) -> list[float]:
    """||S^(L * 2^m) - P|| for m = 0..m_max."""
    A = mat_power(S, L)
    residuals = []
    for _ in range(m_max + 1):
        residuals.append(inf_op_norm(A - P))
        A = A @ A
    return residuals


def stationary_distributions(E1: DenseMatrix, rf: ReducedForm) -> list[StationaryDistribution]:
    """One stationary distribution per recurrent class, read off a row of E_1."""
    out = []
    for j, c in enumerate(rf.classes):
        w = np.clip(E1[c.states[0]], 0.0, None)
        out.append(StationaryDistribution(weights=w / w.sum(), class_index=j))
    return out


def compute_spectral_data(
    S: StochasticMatrix, rf: ReducedForm, settings: AnalysisSettings = DEFAULT_SETTINGS
) -> SpectralData:
    """Peripheral projection, ergodic projection, predicted spectrum and gap in one pass."""
    P, steps = squaring_limit(mat_power(S, rf.L), settings.proj_tol, settings.max_squarings)
    E1 = ergodic_projection(S, P, rf.L)
    values = peripheral_spectrum(rf)
    rank_P = numerical_rank(P, settings.rank_tol)
    if rank_P != len(values):
        logger.warning("rank(P) = %d but the class periods sum to %d", rank_P, len(values))
    return SpectralData(
        P=P,
        E1=E1,
        L=rf.L,
        peripheral_values=tuple(values),
        gap_estimate=mass_gap_estimate(S, P, settings.gap_iters),
        rank_P=rank_P,
        rank_E1=numerical_rank(E1, settings.rank_tol),
        squarings=steps,
    )
