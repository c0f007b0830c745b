"""The persistent algebra (range P, a o b := P(a * b)) and the checks run on it.

Vectors are functions on the state space; * is the pointwise product. Range P is
closed under the Choi-Effros product o, which makes it an abelian algebra with
unit 1, and S restricted to it is an automorphism of order L.
"""

import logging
from dataclasses import asdict, dataclass
from itertools import combinations_with_replacement, product
from typing import Any

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from config import DEFAULT_SETTINGS, AnalysisSettings

from .chain_structure import DEFAULT_ZERO_TOL, ReducedForm
from .errors import IdempotentVerificationFailed, NotInRange, RankMismatch
from .matrix_core import (
    DenseMatrix,
    MatrixLike,
    RealVector,
    as_array,
    indicator,
    mat_power,
    numerical_rank,
    pivoted_columns,
)

logger = logging.getLogger(__name__)


def _sup(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


@dataclass(frozen=True, eq=False)
class PersistentAlgebra:
    """range(P) with the Choi-Effros product."""

    basis: tuple[RealVector, ...]
    P: DenseMatrix
    L: int
    idempotents: tuple[RealVector, ...]
    unit: RealVector

    @property
    def dim(self) -> int:
        return len(self.basis)

    def product(self, a: RealVector, b: RealVector) -> RealVector:
        return ce_product(self.P, a, b)


@dataclass(frozen=True)
class AlgebraCheckReport:
    """Maximum residuals of the algebra axioms over the basis."""

    commutativity: float
    associativity: float
    closure: float
    unit: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.commutativity, self.associativity, self.closure, self.unit) <= self.tol

    def as_dict(self) -> dict[str, Any]:
        return {**asdict(self), "passed": self.passed}


@dataclass(frozen=True)
class AutomorphismReport:
    """Outcome of checking that S restricted to range(P) is a finite-order automorphism."""

    multiplicativity: float
    commutation: float
    range_invariance: float
    order_residual: float
    order: int
    L: int
    min_inverse_coordinate: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.multiplicativity <= self.tol
            and self.commutation <= self.tol
            and self.range_invariance <= self.tol
            and self.order_residual <= self.tol
            and self.order == self.L
            and self.min_inverse_coordinate >= -self.tol
        )

    def as_dict(self) -> dict[str, Any]:
        return {**asdict(self), "passed": self.passed}


@dataclass(frozen=True)
class DecoherenceReport:
    """Whether C^n splits as the multiplicative domain plus the vanishing part."""

    mult_domain_partition: list[list[int]]
    dim_N: int
    dim_A0: int
    combined_rank: int
    split_holds: bool
    product_coincides: bool

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def persistent_basis(
    P: DenseMatrix, tol: float = DEFAULT_SETTINGS.rank_tol, expected_rank: int | None = None
) -> list[RealVector]:
    """
    Basis of range(P) from a column-pivoted selection of the columns of P.

    Each chosen column is re-projected by P and scaled to unit sup-norm.

    Raises:
        RankMismatch: Detected rank differs from expected_rank
    """
    rank, pivots = pivoted_columns(P, tol)
    if expected_rank is not None and rank != expected_rank:
        raise RankMismatch(f"range(P) has numerical rank {rank}, expected {expected_rank}")

    basis = []
    for col in sorted(pivots[:rank]):
        v = P @ P[:, col]
        basis.append(v / _sup(v))
    return basis


def ce_product(
    P: DenseMatrix, a: RealVector, b: RealVector, alg_tol: float = DEFAULT_SETTINGS.alg_tol
) -> RealVector:
    """
    Choi-Effros product a o b = P(a * b).

    Raises:
        NotInRange: a or b is not fixed by P within alg_tol (scaled by its norm)
    """
    for name, x in (("a", a), ("b", b)):
        if _sup(P @ x - x) > alg_tol * max(1.0, _sup(x)):
            raise NotInRange(f"{name} is not fixed by the peripheral projection")
    return P @ (a * b)


def algebra_check(
    A: PersistentAlgebra, alg_tol: float = DEFAULT_SETTINGS.alg_tol
) -> AlgebraCheckReport:
    """Commutativity, associativity, closure and unit law over all basis pairs and triples."""
    P = A.P
    prod = {
        (i, j): P @ (A.basis[i] * A.basis[j]) for i, j in product(range(A.dim), repeat=2)
    }

    commutativity = max((_sup(prod[i, j] - prod[j, i]) for i, j in prod), default=0.0)
    closure = max((_sup(P @ v - v) for v in prod.values()), default=0.0)
    unit = max((_sup(P @ (A.unit * a) - a) for a in A.basis), default=0.0)
    associativity = 0.0
    for i, j, k in product(range(A.dim), repeat=3):
        left = P @ (prod[i, j] * A.basis[k])
        right = P @ (A.basis[i] * prod[j, k])
        associativity = max(associativity, _sup(left - right))

    report = AlgebraCheckReport(
        commutativity=commutativity,
        associativity=associativity,
        closure=closure,
        unit=unit,
        tol=alg_tol,
    )
    if not report.passed:
        logger.warning("Choi-Effros algebra check failed: %s", report)
    return report


def minimal_idempotents(
    S: MatrixLike,
    rf: ReducedForm,
    P: DenseMatrix,
    alg_tol: float = DEFAULT_SETTINGS.alg_tol,
) -> list[RealVector]:
    """
    Minimal idempotents e_{j,r} = P(1_{C_r}) over every cyclic class of every recurrent class.

    Raises:
        IdempotentVerificationFailed: e o e = e, e o e' = 0 or sum e = 1 fails
    """
    n = P.shape[0]
    idempotents = [P @ indicator(n, block) for c in rf.classes for block in c.cyclic_classes]

    for k, e in enumerate(idempotents):
        if _sup(P @ (e * e) - e) > alg_tol:
            raise IdempotentVerificationFailed(f"idempotent {k} is not idempotent")
    for k, l in combinations_with_replacement(range(len(idempotents)), 2):
        if k != l and _sup(P @ (idempotents[k] * idempotents[l])) > alg_tol:
            raise IdempotentVerificationFailed(f"idempotents {k} and {l} are not orthogonal")
    if idempotents and _sup(np.sum(idempotents, axis=0) - 1.0) > alg_tol:
        raise IdempotentVerificationFailed("idempotents do not resolve the unit")
    return idempotents


def order_residuals(S: MatrixLike, idempotents: list[RealVector], L: int) -> dict[int, float]:
    """max_e ||S^k e - e|| for every divisor k of L."""
    arr = as_array(S)
    out = {}
    for k in (k for k in range(1, L + 1) if L % k == 0):
        Sk = mat_power(arr, k)
        out[k] = max((_sup(Sk @ e - e) for e in idempotents), default=0.0)
    return out


def restricted_automorphism_check(
    S: MatrixLike, A: PersistentAlgebra, alg_tol: float = DEFAULT_SETTINGS.alg_tol
) -> AutomorphismReport:
    """
    Check that S restricted to range(P) is a *-automorphism of order exactly L.

    Covers multiplicativity S(a o b) = Sa o Sb on basis pairs, SP = PS and range
    invariance, S^L = id on range(P), and positivity of the inverse S^(L-1) in
    idempotent coordinates.
    """
    arr = as_array(S)
    P = A.P

    images = [arr @ a for a in A.basis]
    multiplicativity = 0.0
    for i, j in product(range(A.dim), repeat=2):
        lhs = arr @ (P @ (A.basis[i] * A.basis[j]))
        rhs = P @ (images[i] * images[j])
        multiplicativity = max(multiplicativity, _sup(lhs - rhs))

    commutation = float(np.abs(arr @ P - P @ arr).sum(axis=1).max())
    range_invariance = max((_sup(P @ y - y) for y in images), default=0.0)

    SL = mat_power(arr, A.L)
    order_residual = max((_sup(SL @ a - a) for a in A.basis), default=0.0)
    residuals = order_residuals(arr, list(A.idempotents), A.L)
    order = min((k for k, r in residuals.items() if r <= alg_tol), default=0)

    min_coord = 0.0
    if A.idempotents:
        E = np.column_stack(A.idempotents)
        inverse = mat_power(arr, A.L - 1)
        coords, *_ = np.linalg.lstsq(E, inverse @ E, rcond=None)
        min_coord = float(coords.min())

    report = AutomorphismReport(
        multiplicativity=multiplicativity,
        commutation=commutation,
        range_invariance=range_invariance,
        order_residual=order_residual,
        order=order,
        L=A.L,
        min_inverse_coordinate=min_coord,
        tol=alg_tol,
    )
    if not report.passed:
        logger.warning("restricted automorphism check failed: %s", report)
    return report


def coincidence_residual(P: DenseMatrix, a: RealVector, b: RealVector) -> float:
    """||P(a * b) - a * b||; zero when the pointwise product stays in range(P)."""
    ab = a * b
    return _sup(P @ ab - ab)


def product_coincides(
    P: DenseMatrix, basis: list[RealVector], tol: float = DEFAULT_SETTINGS.alg_tol
) -> bool:
    """True iff range(P) is closed under the pointwise product, so o agrees with it."""
    return all(
        coincidence_residual(P, basis[i], basis[j]) <= tol
        for i, j in combinations_with_replacement(range(len(basis)), 2)
    )


def idempotents_are_indicators(idempotents: list[RealVector], tol: float = 1e-9) -> bool:
    """True iff every minimal idempotent is 0/1-valued (equivalent to product coincidence)."""
    return all(np.all(np.minimum(np.abs(e), np.abs(e - 1.0)) <= tol) for e in idempotents)


def multiplicative_domain(S: MatrixLike, zero_tol: float = DEFAULT_ZERO_TOL) -> list[list[int]]:
    """
    Finest partition with every row support inside one block.

    x lies in the multiplicative domain iff S(x^2) = (Sx)^2, which forces x to be
    constant on every row support; blocks are the connected components of the
    hypergraph whose hyperedges are those supports.
    """
    arr = as_array(S)
    n = arr.shape[0]
    links = np.zeros((n, n), dtype=bool)
    for row in arr > zero_tol:
        support = np.flatnonzero(row)
        links[support[0], support] = True

    _, labels = connected_components(scipy.sparse.csr_matrix(links), directed=False)
    blocks: dict[int, list[int]] = {}
    for s in range(n):
        blocks.setdefault(int(labels[s]), []).append(s)
    return sorted(blocks.values(), key=lambda b: b[0])


def decoherence_split_check(
    S: MatrixLike,
    P: DenseMatrix,
    partition: list[list[int]],
    tol: float = DEFAULT_SETTINGS.alg_tol,
    rank_tol: float = DEFAULT_SETTINGS.rank_tol,
) -> DecoherenceReport:
    """
    Test whether block indicators and range(I - P) together span the whole space.

    dim N is the number of blocks, dim A_o = n - rank(P); the split holds when
    these add up to n and the union of both spanning sets has full rank.
    """
    n = P.shape[0]
    Q = np.eye(n) - P
    rank_Q, pivots = pivoted_columns(Q, rank_tol)
    vanishing = Q[:, pivots[:rank_Q]]
    blocks = np.column_stack([indicator(n, b) for b in partition])
    combined_rank = numerical_rank(np.hstack([blocks, vanishing]), rank_tol)

    dim_N = len(partition)
    dim_A0 = n - numerical_rank(P, rank_tol)
    basis = persistent_basis(P, rank_tol)
    return DecoherenceReport(
        mult_domain_partition=[list(b) for b in partition],
        dim_N=dim_N,
        dim_A0=dim_A0,
        combined_rank=combined_rank,
        split_holds=dim_N + dim_A0 == n and combined_rank == n,
        product_coincides=product_coincides(P, basis, tol),
    )


def build_persistent_algebra(
    S: MatrixLike,
    rf: ReducedForm,
    P: DenseMatrix,
    settings: AnalysisSettings = DEFAULT_SETTINGS,
) -> PersistentAlgebra:
    """Basis, idempotents and unit of range(P), with the rank checked against sum d_j."""
    expected = sum(rf.periods)
    basis = persistent_basis(P, settings.rank_tol, expected_rank=expected)
    idempotents = minimal_idempotents(S, rf, P, settings.alg_tol)
    return PersistentAlgebra(
        basis=tuple(basis),
        P=P,
        L=rf.L,
        idempotents=tuple(idempotents),
        unit=np.ones(P.shape[0]),
    )
