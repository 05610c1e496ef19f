"""Sparse symmetric graphs and the normalized Laplacian operator."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend

DEFAULT_DENSE_LIMIT = 4096


class IsolatedVertex(ValueError):
    """A vertex has degree zero, so D^-1/2 is undefined."""

    def __init__(self, vertex):
        super().__init__(f"vertex {vertex} is isolated (degree 0)")
        self.vertex = int(vertex)


class DenseLimitExceeded(ValueError):
    pass


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """Undirected 0/1 graph in CSR form (each edge stored in both rows)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        indptr = _frozen(self.indptr, np.int64)
        indices = _frozen(self.indices, np.int64)
        if indptr.shape != (self.n + 1,) or indptr[0] != 0 or indptr[-1] != len(indices):
            raise ValueError("malformed CSR row offsets")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "degrees", _frozen(np.diff(indptr), np.int64))

    @classmethod
    def from_edges(cls, n, u, v):
        """Build from undirected pairs; duplicates collapse, self loops are rejected."""
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        if u.shape != v.shape:
            raise ValueError("edge endpoint arrays differ in length")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(u == v):
            raise ValueError("self loops are not allowed")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = np.unique(lo * n + hi)
        lo, hi = key // n, key % n
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(int(n), indptr, cols)

    @property
    def n_edges(self):
        return len(self.indices) // 2

    def edges(self):
        """Undirected edges as (u, v) arrays with u < v, sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return rows[keep], self.indices[keep]

    def to_dense(self):
        a = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), self.degrees)
        a[rows, self.indices] = 1.0
        return a

    def to_scipy(self):
        import scipy.sparse as sp

        data = np.ones(len(self.indices))
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))


@dataclass(frozen=True)
class SparsityStats:
    tau: float

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")


class NormalizedLaplacian:
    """The operator L = D^-1/2 W D^-1/2 of a graph without isolated vertices.

    ``sweeps`` counts operator applications (one per matvec or block matmat),
    which lets callers verify the cost of polynomial filtering.
    """

    def __init__(self, graph: SparseGraph, dense_limit: int = DEFAULT_DENSE_LIMIT,
                 backend: str | None = None):
        zero = np.flatnonzero(graph.degrees == 0)
        if len(zero):
            raise IsolatedVertex(zero[0])
        self.graph = graph
        self.n = graph.n
        self.inv_sqrt_degrees = _frozen(1.0 / np.sqrt(graph.degrees), np.float64)
        self.dense_limit = int(dense_limit)
        self.kernels = _backend.resolve(backend)
        self.sweeps = 0

    def __repr__(self):
        return f"NormalizedLaplacian(n={self.n}, edges={self.graph.n_edges})"

    def matmat(self, y, out=None):
        y = np.ascontiguousarray(y, dtype=np.float64)
        if y.ndim != 2 or y.shape[0] != self.n:
            raise ValueError(f"expected an array with {self.n} rows, got shape {y.shape}")
        if out is None:
            out = np.empty_like(y)
        self.kernels.lap_matmat(self.graph.indptr, self.graph.indices,
                                self.inv_sqrt_degrees, y, out)
        self.sweeps += 1
        return out

    def cheb_step(self, t1, t0, acc=None, coef=0.0):
        """In place ``t0 <- 2 L t1 - t0`` (plus ``acc += coef * t0``)."""
        if acc is None:
            acc = np.empty((0, t1.shape[1]))
        out = self.kernels.cheb_step(self.graph.indptr, self.graph.indices,
                                     self.inv_sqrt_degrees, t1, t0, acc, float(coef))
        self.sweeps += 1
        return out

    def to_dense(self):
        if self.n > self.dense_limit:
            raise DenseLimitExceeded(
                f"n={self.n} exceeds the dense limit {self.dense_limit}")
        s = self.inv_sqrt_degrees
        return s[:, None] * self.graph.to_dense() * s[None, :]


def laplacian(graph: SparseGraph, dense_limit: int = DEFAULT_DENSE_LIMIT,
              backend: str | None = None) -> NormalizedLaplacian:
    return NormalizedLaplacian(graph, dense_limit=dense_limit, backend=backend)


def matvec(lap: NormalizedLaplacian, y):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or len(y) != lap.n:
        raise ValueError(f"expected a vector of length {lap.n}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("input vector has non-finite entries")
    return lap.matmat(y[:, None])[:, 0]


def tau(population) -> SparsityStats:
    """Minimum expected degree over n, from a population adjacency."""
    deg = population.expected_degrees()
    if deg.min() <= 0:
        raise ValueError("population has a vertex with zero expected degree")
    return SparsityStats(float(deg.min() / population.n))


def tau_realized(graph: SparseGraph) -> SparsityStats:
    """Fallback for loaded graphs: minimum realized degree over n."""
    if graph.degrees.min() <= 0:
        raise IsolatedVertex(int(np.argmin(graph.degrees)))
    return SparsityStats(float(graph.degrees.min() / graph.n))


def population_laplacian(population, dense_limit: int = DEFAULT_DENSE_LIMIT):
    """Dense D^-1/2 W D^-1/2 of the expected adjacency."""
    if population.n > dense_limit:
        raise DenseLimitExceeded(
            f"n={population.n} exceeds the dense limit {dense_limit}")
    w = population.matrix
    deg = w.sum(axis=1)
    if deg.min() <= 0:
        raise ValueError("population has a vertex with zero expected degree")
    s = 1.0 / np.sqrt(deg)
    return s[:, None] * w * s[None, :]


def write_edgelist(graph: SparseGraph, path, k=None):
    """One ``u v`` pair per line (0-indexed, u < v) after a ``# n=.. k=..`` header."""
    u, v = graph.edges()
    with open(path, "w") as fh:
        header = f"# n={graph.n}"
        if k is not None:
            header += f" k={k}"
        fh.write(header + "\n")
        for a, b in zip(u.tolist(), v.tolist()):
            fh.write(f"{a} {b}\n")


def read_edgelist(path, n=None) -> SparseGraph:
    """Read the edge-list format.

    Comment lines are skipped; an ``n=`` token in a comment is used as the
    vertex count when ``n`` is not given (so trailing isolated vertices
    survive a round trip), otherwise n is the largest index plus one.
    """
    us, vs = [], []
    header_n = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("n="):
                        header_n = int(tok[2:])
                continue
            a, b = line.split()[:2]
            us.append(int(a))
            vs.append(int(b))
    u = np.array(us, dtype=np.int64)
    v = np.array(vs, dtype=np.int64)
    if n is None:
        n = header_n
    if n is None:
        n = int(max(u.max(), v.max()) + 1) if len(u) else 0
    return SparseGraph.from_edges(n, u, v)
