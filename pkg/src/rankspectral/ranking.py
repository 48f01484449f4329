"""Normalized-rank transform of symmetric data and its exact moments.

Given a hollow symmetric data matrix with N = n(n-1)/2 distinct
upper-triangle entries, the rank transform replaces each entry by
rank/(N + 1), producing a matrix whose entries are a permutation of
{1/(N+1), ..., N/(N+1)}. The distribution of any statistic of this matrix is
the same for every continuous entry distribution, which is what makes the
downstream tests distribution-free.

Entries drawn from a continuous law are distinct almost surely, but observed
data may contain ties. The default policy treats ties as an error; an
explicit seeded policy breaks them uniformly at random.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import make_generator
from .symmetric import SymmetricMatrix


class TieError(ValueError):
    """Tied entries under the ``error`` tie policy."""


@dataclass(frozen=True)
class TiePolicy:
    """How :func:`rank_transform` treats tied entries.

    Use the constructors: ``TiePolicy.error()`` raises :class:`TieError` on
    any tie; ``TiePolicy.random(seed)`` orders each tied group by a seeded
    uniform shuffle, so every ranking of the tied entries is equally likely
    and the result is deterministic given the seed.
    """

    kind: str
    seed: int | None = None

    @classmethod
    def error(cls) -> "TiePolicy":
        return cls(kind="error")

    @classmethod
    def random(cls, seed: int) -> "TiePolicy":
        return cls(kind="random", seed=int(seed))

    def __post_init__(self) -> None:
        if self.kind not in ("error", "random"):
            raise ValueError(f"unknown tie policy kind {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random tie policy requires a seed")


class RankMatrix(SymmetricMatrix):
    """A symmetric matrix whose entries are normalized ranks.

    The packed values must be exactly a permutation of k/(N+1) for
    k = 1..N; the constructor verifies this unless ``validate=False``
    (used internally when the values were just computed as ranks).
    """

    def __init__(self, n: int, values: np.ndarray, validate: bool = True) -> None:
        super().__init__(n, values)
        if validate:
            expected = np.arange(1, self.n_pairs + 1) / (self.n_pairs + 1)
            if not np.array_equal(np.sort(self.values), expected):
                raise ValueError("values are not a permutation of k/(N+1), k=1..N")

    def __repr__(self) -> str:
        return f"RankMatrix(n={self.n})"


def rank_transform(matrix: SymmetricMatrix, policy: TiePolicy | None = None) -> RankMatrix:
    """Replace each upper-triangle entry by its normalized rank.

    Parameters
    ----------
    matrix : SymmetricMatrix
        Hollow symmetric data matrix, n >= 2.
    policy : TiePolicy, optional
        Tie handling; defaults to ``TiePolicy.error()``.

    Returns
    -------
    RankMatrix
        Matrix with entry rank/(N+1) in place of each data entry. Strictly
        monotone transforms of the data give bit-identical output, and
        relabeling nodes commutes with the transform.

    Raises
    ------
    TieError
        Tied entries under the ``error`` policy. The message reports how
        many values are involved and one offending value.
    """
    if policy is None:
        policy = TiePolicy.error()
    a = matrix.values
    n_pairs = a.shape[0]
    order = np.argsort(a)
    ties = np.flatnonzero(np.diff(a[order]) == 0.0)
    if ties.size:
        if policy.kind == "error":
            tied_value = float(a[order[ties[0]]])
            involved = _count_tied(a[order])
            raise TieError(
                f"{involved} tied entries (e.g. value {tied_value!r}); pass "
                f"TiePolicy.random(seed) to break ties at random"
            )
        rng = make_generator(policy.seed)
        shuffle = rng.permutation(n_pairs)
        # Primary key: value; secondary key: random position. Uniform over
        # the orderings of each tied group.
        order = np.lexsort((shuffle, a))
    ranks = np.empty(n_pairs, dtype=np.float64)
    ranks[order] = np.arange(1, n_pairs + 1, dtype=np.float64)
    ranks /= n_pairs + 1
    return RankMatrix(matrix.n, ranks, validate=False)


def _count_tied(sorted_vals: np.ndarray) -> int:
    eq = np.diff(sorted_vals) == 0.0
    involved = np.zeros(sorted_vals.shape[0], dtype=bool)
    involved[:-1] |= eq
    involved[1:] |= eq
    return int(np.count_nonzero(involved))


@dataclass(frozen=True)
class Moments:
    """Exact finite-n moments of a rank matrix's entries and leading eigenvalue.

    Attributes
    ----------
    n : int
        Matrix dimension.
    n_pairs : int
        N = n(n-1)/2.
    sigma_sq : float
        Entry variance, 1/12 - 1/(6(N+1)).
    cov : float
        Covariance of two distinct entries, -1/(12(N+1)); the entries are a
        sample without replacement, hence exchangeable and negatively
        correlated.
    sigma_tilde : float
        Scale of the leading-eigenvalue fluctuation, sigma_sq * sqrt(8/n).
    centering : float
        First-order location of the leading eigenvalue,
        (n-1)/2 + 2 * sigma_sq.
    """

    n: int
    n_pairs: int
    sigma_sq: float
    cov: float
    sigma_tilde: float
    centering: float


def moments(n: int) -> Moments:
    """Exact entry moments and eigenvalue normalization for dimension n."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got n={n}")
    n_pairs = n * (n - 1) // 2
    sigma_sq = 1.0 / 12.0 - 1.0 / (6.0 * (n_pairs + 1))
    cov = -1.0 / (12.0 * (n_pairs + 1))
    sigma_tilde = sigma_sq * math.sqrt(8.0 / n)
    centering = (n - 1) / 2.0 + 2.0 * sigma_sq
    return Moments(
        n=n,
        n_pairs=n_pairs,
        sigma_sq=sigma_sq,
        cov=cov,
        sigma_tilde=sigma_tilde,
        centering=centering,
    )


def whiten(rank_matrix: RankMatrix) -> SymmetricMatrix:
    """Center and scale a rank matrix to mean 0, entry variance 1.

    Returns (R - 1/2) / sigma_n entrywise on the off-diagonal. The spectral
    distribution of the result, scaled by n^{-1/2}, converges to the
    semicircle on [-2, 2], and n^{-1/2} times its operator norm converges
    to 2.
    """
    if not isinstance(rank_matrix, RankMatrix):
        raise TypeError("whiten expects a RankMatrix; apply rank_transform first")
    if rank_matrix.n < 3:
        raise ValueError("whitening needs n >= 3 (entry variance is 0 at n=2)")
    m = moments(rank_matrix.n)
    scaled = (rank_matrix.values - 0.5) / math.sqrt(m.sigma_sq)
    return SymmetricMatrix(rank_matrix.n, scaled)
