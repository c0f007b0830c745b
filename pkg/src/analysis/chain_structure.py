"""Graph structure of a stochastic matrix: classes, periods and the canonical reduced form.

The support digraph has an edge u -> v whenever S[u, v] > zero_tol. A strong
component is recurrent when no edge leaves it; every other state is transient.
"""

import logging
import math
from collections import deque
from collections.abc import Collection
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .errors import NotAClass, TooLarge
from .matrix_core import DenseMatrix, MatrixLike, StochasticMatrix, as_array

logger = logging.getLogger(__name__)

DEFAULT_ZERO_TOL = 1e-12
DEFAULT_MAX_FACE_STATES = 16


@dataclass(frozen=True)
class RecurrentClass:
    """A closed irreducible class with its period and cyclic classes C_0..C_{d-1}."""

    states: tuple[int, ...]
    period: int
    cyclic_classes: tuple[tuple[int, ...], ...]

    @property
    def ordered_states(self) -> tuple[int, ...]:
        """States ordered by cyclic class, then index."""
        return tuple(s for block in self.cyclic_classes for s in block)


@dataclass(frozen=True)
class ReducedForm:
    """
    Canonical reduced form of a stochastic matrix.

    Attributes:
        permutation: permutation[state] is the state's position in the reduced form
        order: States listed in reduced-form order (the inverse of permutation)
        transient: Transient states, ascending
        classes: Recurrent classes, ordered by smallest member
        L: Least common multiple of the class periods
        matrix: S conjugated into block upper-triangular shape
    """

    permutation: tuple[int, ...]
    order: tuple[int, ...]
    transient: tuple[int, ...]
    classes: tuple[RecurrentClass, ...]
    L: int
    matrix: DenseMatrix = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.permutation)

    @property
    def periods(self) -> list[int]:
        return [c.period for c in self.classes]

    @property
    def block_offsets(self) -> list[int]:
        """Start offset of the transient block followed by each class block."""
        offsets = [0, len(self.transient)]
        for c in self.classes[:-1]:
            offsets.append(offsets[-1] + len(c.states))
        return offsets

    @property
    def transient_block(self) -> DenseMatrix:
        t = len(self.transient)
        return self.matrix[:t, :t]

    def class_block(self, j: int) -> DenseMatrix:
        start = self.block_offsets[j + 1]
        stop = start + len(self.classes[j].states)
        return self.matrix[start:stop, start:stop]


def support_graph(S: MatrixLike, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """Boolean adjacency of the support digraph."""
    return as_array(S) > zero_tol


def classify_states(
    S: StochasticMatrix, zero_tol: float = DEFAULT_ZERO_TOL
) -> tuple[list[int], list[list[int]]]:
    """
    Split states into transient ones and recurrent classes.

    Returns:
        (transient states ascending, recurrent classes each ascending, ordered by minimum)
    """
    adj = support_graph(S, zero_tol)
    n_comp, labels = connected_components(
        scipy.sparse.csr_matrix(adj), directed=True, connection="strong"
    )

    escapes = np.zeros(n_comp, dtype=bool)
    for u, v in zip(*np.nonzero(adj), strict=True):
        if labels[u] != labels[v]:
            escapes[labels[u]] = True

    transient = [s for s in range(S.n) if escapes[labels[s]]]
    members: dict[int, list[int]] = {}
    for s in range(S.n):
        if not escapes[labels[s]]:
            members.setdefault(int(labels[s]), []).append(s)
    recurrent = sorted(members.values(), key=lambda states: states[0])

    # a finite chain always has a closed class
    assert recurrent, "stochastic matrix without a recurrent class"
    logger.debug(
        "classified %d transient states, %d recurrent classes", len(transient), len(recurrent)
    )
    return transient, recurrent


def _bfs_levels(adj: np.ndarray, root: int, allowed: set[int]) -> dict[int, int]:
    levels = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v in allowed and v not in levels:
                levels[v] = levels[u] + 1
                queue.append(v)
    return levels


def _check_class(adj: np.ndarray, states: list[int]) -> dict[int, int]:
    """BFS levels from the smallest state; the set must be closed and strongly connected."""
    if not states:
        raise NotAClass("empty state set")
    allowed = set(states)
    for u in states:
        outside = [int(v) for v in np.flatnonzero(adj[u]) if int(v) not in allowed]
        if outside:
            raise NotAClass(f"state {u} has an edge to {outside[0]} outside the set")

    root = states[0]
    levels = _bfs_levels(adj, root, allowed)
    back = _bfs_levels(adj.T, root, allowed)
    if len(levels) != len(states) or len(back) != len(states):
        raise NotAClass(f"states {states} are not strongly connected")
    return levels


def class_period(
    S: StochasticMatrix, class_states: Collection[int], zero_tol: float = DEFAULT_ZERO_TOL
) -> int:
    """
    Index of imprimitivity of a recurrent class.

    The gcd over intra-class edges u -> v of level(u) + 1 - level(v), levels being
    BFS depths from the smallest state. This equals the gcd of all cycle lengths.

    Raises:
        NotAClass: The set is not closed or not strongly connected
    """
    adj = support_graph(S, zero_tol)
    states = sorted(class_states)
    levels = _check_class(adj, states)

    diffs = [
        levels[u] + 1 - levels[int(v)]
        for u in states
        for v in np.flatnonzero(adj[u])
    ]
    return reduce(math.gcd, (abs(d) for d in diffs), 0) or 1


def cyclic_classes(
    S: StochasticMatrix,
    class_states: Collection[int],
    d: int,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> list[list[int]]:
    """Partition a class by BFS level mod d; the smallest state lands in C_0."""
    adj = support_graph(S, zero_tol)
    states = sorted(class_states)
    levels = _check_class(adj, states)
    blocks: list[list[int]] = [[] for _ in range(d)]
    for s in states:
        blocks[levels[s] % d].append(s)
    return blocks


def canonical_form(S: StochasticMatrix, zero_tol: float = DEFAULT_ZERO_TOL) -> ReducedForm:
    """
    Reduce S to block upper-triangular canonical form.

    Transient states come first (ascending), then each recurrent class by smallest
    member, states inside a class ordered by cyclic class then index.
    """
    transient, recurrent = classify_states(S, zero_tol)

    classes = []
    for states in recurrent:
        d = class_period(S, states, zero_tol)
        blocks = cyclic_classes(S, states, d, zero_tol)
        classes.append(
            RecurrentClass(
                states=tuple(states),
                period=d,
                cyclic_classes=tuple(tuple(b) for b in blocks),
            )
        )

    order = list(transient)
    for c in classes:
        order.extend(c.ordered_states)

    permutation = [0] * S.n
    for position, state in enumerate(order):
        permutation[state] = position

    L = reduce(math.lcm, (c.period for c in classes), 1)
    matrix = S.entries[np.ix_(order, order)]
    logger.info(
        "canonical form: %d transient, periods %s, L=%d",
        len(transient),
        [c.period for c in classes],
        L,
    )
    return ReducedForm(
        permutation=tuple(permutation),
        order=tuple(order),
        transient=tuple(transient),
        classes=tuple(classes),
        L=L,
        matrix=matrix,
    )


def permuted_matrix(S: StochasticMatrix, rf: ReducedForm) -> DenseMatrix:
    """S with rows and columns reordered by the reduced form."""
    return S.entries[np.ix_(rf.order, rf.order)]


def is_irreducible(S: MatrixLike, zero_tol: float = DEFAULT_ZERO_TOL) -> bool:
    """True iff the support digraph is strongly connected."""
    adj = support_graph(S, zero_tol)
    n_comp, _ = connected_components(
        scipy.sparse.csr_matrix(adj), directed=True, connection="strong"
    )
    return bool(n_comp == 1)


def is_primitive(block: MatrixLike, zero_tol: float = DEFAULT_ZERO_TOL) -> bool:
    """
    True iff some power of the block is entrywise positive.

    Boolean powering up to Wielandt's bound (n - 1)^2 + 1.
    """
    adj = support_graph(block, zero_tol).astype(np.int64)
    n = adj.shape[0]
    power = adj.copy()
    for _ in range((n - 1) ** 2 + 1):
        if np.all(power > 0):
            return True
        power = ((power @ adj) > 0).astype(np.int64)
    return False


def invariant_faces_bruteforce(
    S: MatrixLike,
    zero_tol: float = DEFAULT_ZERO_TOL,
    max_n: int = DEFAULT_MAX_FACE_STATES,
) -> list[list[int]]:
    """
    Enumerate the nontrivial faces of the positive cone mapped into themselves by S.

    A face spanned by {e_j : j in J} is invariant iff for each j in J the support
    of column j (S e_j) lies inside J. The empty and full sets are excluded.

    Raises:
        TooLarge: More than max_n states
    """
    adj = support_graph(S, zero_tol)
    n = adj.shape[0]
    if n > max_n:
        raise TooLarge(f"{n} states exceeds the face enumeration limit of {max_n}")

    col_masks = [sum(1 << i for i in np.flatnonzero(adj[:, j])) for j in range(n)]
    full = (1 << n) - 1
    subsets = np.arange(1, full, dtype=np.int64)
    invariant = np.ones(subsets.shape, dtype=bool)
    for j, mask in enumerate(col_masks):
        contains_j = ((subsets >> j) & 1).astype(bool)
        leaks = (np.int64(mask) & ~subsets) != 0
        invariant &= ~(contains_j & leaks)

    return [[j for j in range(n) if (int(J) >> j) & 1] for J in subsets[invariant]]
