"""Named stochastic matrices and a seeded random suite for analysis and testing."""

import logging
from collections.abc import Callable

import numpy as np
import scipy.linalg

from .matrix_core import StochasticMatrix, make_stochastic

logger = logging.getLogger(__name__)


def footnote() -> StochasticMatrix:
    """Upper-triangular 3-state chain with a reducible transient block and one absorbing state."""
    return make_stochastic([[1 / 2, 1 / 4, 1 / 4], [0, 2 / 3, 1 / 3], [0, 0, 1]])


def s3() -> StochasticMatrix:
    """One transient state feeding a period-2 class."""
    return make_stochastic([[0, 1 / 2, 1 / 2], [0, 0, 1], [0, 1, 0]])


def two_state(p: float = 1 / 3, q: float = 1 / 6) -> StochasticMatrix:
    return make_stochastic([[1 - p, p], [q, 1 - q]])


def identity(n: int) -> StochasticMatrix:
    return make_stochastic(np.eye(n))


def cycle(d: int) -> StochasticMatrix:
    """Cyclic permutation i -> i + 1 mod d."""
    return make_stochastic(np.roll(np.eye(d), 1, axis=1))


def block_diag(*blocks: StochasticMatrix) -> StochasticMatrix:
    return make_stochastic(scipy.linalg.block_diag(*(b.entries for b in blocks)))


def two_absorbing() -> StochasticMatrix:
    """One transient state split evenly between two absorbing states."""
    return make_stochastic([[0, 1 / 2, 1 / 2], [0, 1, 0], [0, 0, 1]])


NAMED: dict[str, Callable[[], StochasticMatrix]] = {
    "footnote": footnote,
    "s3": s3,
    "two-state": two_state,
    "two-absorbing": two_absorbing,
    "identity-3": lambda: identity(3),
    "cycle-3": lambda: cycle(3),
    "cycle-2-3": lambda: block_diag(cycle(2), cycle(3)),
}


def named(name: str) -> StochasticMatrix:
    try:
        return NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(NAMED)}") from None


def _normalized(weights: np.ndarray) -> np.ndarray:
    return weights / weights.sum(axis=1, keepdims=True)


def _positive(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return rng.uniform(0.1, 1.0, size=shape)


def random_generic(rng: np.random.Generator, n: int, density: float = 0.5) -> np.ndarray:
    """Sparse random rows; each row keeps at least one entry."""
    weights = _positive(rng, (n, n)) * (rng.random((n, n)) < density)
    for i in np.flatnonzero(weights.sum(axis=1) == 0):
        weights[i, rng.integers(n)] = 1.0
    return _normalized(weights)


def random_periodic_block(rng: np.random.Generator, sizes: list[int]) -> np.ndarray:
    """Irreducible block of period len(sizes), each cyclic group feeding the next."""
    n = sum(sizes)
    starts = np.cumsum([0, *sizes])
    weights = np.zeros((n, n))
    d = len(sizes)
    for r in range(d):
        s = (r + 1) % d
        rows = slice(starts[r], starts[r + 1])
        cols = slice(starts[s], starts[s + 1])
        weights[rows, cols] = _positive(rng, (sizes[r], sizes[s]))
    return _normalized(weights)


def random_reducible(rng: np.random.Generator, n: int) -> np.ndarray:
    """Transient states above two or more closed classes, some of them periodic."""
    n_transient = int(rng.integers(1, max(2, n - 2)))
    remaining = n - n_transient
    blocks = []
    while remaining > 0:
        size = int(rng.integers(1, remaining + 1))
        if size >= 2 and rng.random() < 0.5:
            d = int(rng.integers(2, size + 1))
            parts = [1] * d
            for _ in range(size - d):
                parts[rng.integers(d)] += 1
            blocks.append(random_periodic_block(rng, parts))
        else:
            blocks.append(_normalized(_positive(rng, (size, size))))
        remaining -= size

    recurrent = scipy.linalg.block_diag(*blocks)
    m = recurrent.shape[0]
    top = np.zeros((n_transient, n))
    upper = np.triu(_positive(rng, (n_transient, n_transient)), k=1)
    top[:, :n_transient] = upper * (rng.random((n_transient, n_transient)) < 0.5)
    top[:, n_transient:] = _positive(rng, (n_transient, m)) * (rng.random((n_transient, m)) < 0.6)
    top[:, -1] += 0.05
    weights = np.zeros((n, n))
    weights[:n_transient] = _normalized(top)
    weights[n_transient:, n_transient:] = recurrent
    return weights


def _shuffled(rng: np.random.Generator, A: np.ndarray) -> np.ndarray:
    perm = rng.permutation(A.shape[0])
    return A[np.ix_(perm, perm)]


def random_suite(
    seed: int = 20240101, count: int = 200, max_n: int = 10
) -> list[StochasticMatrix]:
    """
    Seeded random stochastic matrices cycling through generic, forced-reducible
    and forced-periodic constructions, each randomly relabelled.
    """
    rng = np.random.default_rng(seed)
    suite = []
    for k in range(count):
        n = int(rng.integers(2, max_n + 1))
        kind = k % 3
        if kind == 0:
            A = random_generic(rng, n)
        elif kind == 1:
            A = random_reducible(rng, max(n, 3))
        else:
            d = int(rng.integers(2, min(n, 5) + 1))
            parts = [1] * d
            for _ in range(n - d):
                parts[rng.integers(d)] += 1
            A = random_periodic_block(rng, parts)
        suite.append(make_stochastic(_shuffled(rng, A)))
    logger.debug("generated %d random matrices from seed %d", count, seed)
    return suite


def standard_suite() -> dict[str, StochasticMatrix]:
    """The hand-checked matrices: footnote, S3, identities, cycles, two-state and unions."""
    suite = {"footnote": footnote(), "s3": s3(), "two-state": two_state()}
    suite.update({f"identity-{n}": identity(n) for n in range(1, 5)})
    suite.update({f"cycle-{d}": cycle(d) for d in range(2, 6)})
    suite["cycle-2-3"] = block_diag(cycle(2), cycle(3))
    suite["two-absorbing"] = two_absorbing()
    return suite
