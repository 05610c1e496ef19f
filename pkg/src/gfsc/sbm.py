"""Stochastic block models: membership, block matrices and sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import SparseGraph, read_edgelist, write_edgelist
from .rng import stream

__all__ = [
    "Membership", "BlockMatrix", "SimplifiedSbm", "PopulationAdjacency",
    "build_population", "sample_adjacency", "read_edgelist", "write_edgelist",
]

FULL_RANK_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Membership:
    """Block assignment of n vertices to k non-empty blocks."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True).ravel()
        k = int(self.k)
        if k < 1:
            raise ValueError("k must be at least 1")
        if len(labels) and (labels.min() < 0 or labels.max() >= k):
            raise ValueError(f"block indices must lie in [0, {k})")
        sizes = np.bincount(labels, minlength=k)
        if np.any(sizes == 0):
            raise ValueError(f"empty blocks: {np.flatnonzero(sizes == 0).tolist()}")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", k)

    @classmethod
    def equal_blocks(cls, k, s):
        return cls(np.repeat(np.arange(k), s), k)

    @classmethod
    def from_one_hot(cls, z):
        z = np.asarray(z)
        if z.ndim != 2 or np.any(z.sum(axis=1) != 1) or not np.isin(z, (0, 1)).all():
            raise ValueError("one-hot matrix must have exactly one 1 per row")
        return cls(np.argmax(z, axis=1), z.shape[1])

    @property
    def n(self):
        return len(self.labels)

    @property
    def sizes(self):
        return np.bincount(self.labels, minlength=self.k)

    @property
    def largest(self):
        """P, the number of vertices in the largest block."""
        return int(self.sizes.max())

    def one_hot(self):
        z = np.zeros((self.n, self.k))
        z[np.arange(self.n), self.labels] = 1.0
        return z

    def __eq__(self, other):
        return (isinstance(other, Membership) and self.k == other.k
                and np.array_equal(self.labels, other.labels))

    def __hash__(self):
        return hash((self.k, self.labels.tobytes()))


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """Symmetric, full-rank k x k matrix of edge probabilities."""

    entries: np.ndarray

    def __post_init__(self):
        b = np.array(self.entries, dtype=np.float64, copy=True)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("block matrix must be square")
        if np.any(b < 0) or np.any(b > 1):
            raise ValueError("block probabilities must lie in [0, 1]")
        if not np.array_equal(b, b.T):
            raise ValueError("block matrix must be symmetric")
        sv = np.linalg.svd(b, compute_uv=False)
        if sv[-1] <= FULL_RANK_RTOL * sv[0]:
            raise ValueError("block matrix is rank deficient")
        b.setflags(write=False)
        object.__setattr__(self, "entries", b)

    @property
    def k(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class SimplifiedSbm:
    """k equal blocks of s vertices; p_in = q + r, p_out = r."""

    k: int
    s: int
    q: float
    r: float

    def __post_init__(self):
        if self.k < 1 or self.s < 2:
            raise ValueError("need k >= 1 and s >= 2")
        if not (0.0 <= self.r <= 1.0 and 0.0 <= self.q + self.r <= 1.0):
            raise ValueError("need r and q + r in [0, 1]")

    @property
    def n(self):
        return self.k * self.s

    def blocks(self):
        return BlockMatrix(self.q * np.eye(self.k) + self.r)

    def membership(self):
        return Membership.equal_blocks(self.k, self.s)

    def population(self):
        return build_population(self.membership(), self.blocks())


class PopulationAdjacency:
    """Edge-probability matrix ZBZ^T with a zeroed diagonal.

    Holds the block factors when available so rows can be produced without
    the dense n x n matrix; ``matrix`` materializes it on demand.
    """

    def __init__(self, membership: Membership | None = None,
                 blocks: BlockMatrix | None = None, matrix=None):
        if matrix is None and (membership is None or blocks is None):
            raise ValueError("need either block factors or a dense matrix")
        self.membership = membership
        self.blocks = blocks
        self._matrix = None
        if matrix is not None:
            m = np.array(matrix, dtype=np.float64, copy=True)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError("population matrix must be square")
            if not np.array_equal(m, m.T):
                raise ValueError("population matrix must be symmetric")
            if np.any(m < 0) or np.any(m > 1):
                raise ValueError("probabilities must lie in [0, 1]")
            np.fill_diagonal(m, 0.0)
            m.setflags(write=False)
            self._matrix = m
        self.n = membership.n if matrix is None else self._matrix.shape[0]

    @classmethod
    def from_dense(cls, matrix):
        return cls(matrix=matrix)

    @property
    def matrix(self):
        if self._matrix is None:
            z = self.membership.labels
            m = self.blocks.entries[np.ix_(z, z)].copy()
            np.fill_diagonal(m, 0.0)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def row(self, i):
        if self._matrix is not None:
            return self._matrix[i]
        z = self.membership.labels
        out = self.blocks.entries[z[i]][z]
        out[i] = 0.0
        return out

    def expected_degrees(self):
        if self._matrix is not None:
            return self._matrix.sum(axis=1)
        z = self.membership.labels
        b = self.blocks.entries
        per_block = b @ self.membership.sizes - np.diag(b)
        return per_block[z]


def build_population(membership: Membership, blocks: BlockMatrix) -> PopulationAdjacency:
    if membership.k != blocks.k:
        raise ValueError(
            f"membership has k={membership.k} but the block matrix is {blocks.k}x{blocks.k}")
    return PopulationAdjacency(membership, blocks)


def sample_adjacency(population: PopulationAdjacency, seed) -> SparseGraph:
    """Independent Bernoulli draw per upper-triangular pair, mirrored.

    Rows are drawn in order i = 0..n-2 from the single stream ``seed``
    (an int or a ``numpy.random.Generator``), so results are reproducible.
    """
    rng = stream(seed)
    n = population.n
    us, vs = [], []
    for i in range(n - 1):
        probs = population.row(i)[i + 1:]
        hits = np.flatnonzero(rng.random(len(probs)) < probs)
        if len(hits):
            us.append(np.full(len(hits), i, dtype=np.int64))
            vs.append(hits + (i + 1))
    if us:
        u, v = np.concatenate(us), np.concatenate(vs)
    else:
        u = v = np.empty(0, dtype=np.int64)
    return SparseGraph.from_edges(n, u, v)
