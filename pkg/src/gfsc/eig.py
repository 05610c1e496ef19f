"""Dense symmetric eigendecomposition used as ground truth.

Nothing on the compressive path calls into this module; ``forbid_decomposition``
turns any accidental call into an error so that property can be asserted.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import _backend
from .graph import DEFAULT_DENSE_LIMIT, DenseLimitExceeded, NormalizedLaplacian

# "auto" uses Jacobi rotations up to this size and LAPACK above it
JACOBI_AUTO_MAX = 128
SYMMETRY_TOL = 1e-10
DEGENERATE_GAP = 1e-6
_TIE_DECIMALS = 10

_guard = threading.local()


class DecompositionForbidden(RuntimeError):
    pass


@contextmanager
def forbid_decomposition():
    """Within this block (on this thread) ``decompose`` raises."""
    depth = getattr(_guard, "depth", 0)
    _guard.depth = depth + 1
    try:
        yield
    finally:
        _guard.depth = depth


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenpairs sorted by decreasing |lambda|.

    Ties in |lambda| (after rounding to 1e-10) are broken by decreasing
    signed value, then by the solver's original index.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T

    def apply(self, fn, y):
        """U fn(Lambda) U^T y."""
        u = self.eigenvectors
        return u @ (np.asarray(fn(self.eigenvalues))[:, None] * (u.T @ y))


@dataclass(frozen=True, eq=False)
class LeadingEigenvectors:
    vectors: np.ndarray
    eigenvalues: np.ndarray
    lambda_k: float
    degenerate: bool

    @property
    def k(self):
        return self.vectors.shape[1]

    def projector(self):
        return self.vectors @ self.vectors.T


def _order(w):
    idx = np.arange(len(w))
    mag = np.round(np.abs(w), _TIE_DECIMALS)
    signed = np.round(w, _TIE_DECIMALS)
    return np.lexsort((idx, -signed, -mag))


def decompose(matrix, method: str = "auto", dense_limit: int = DEFAULT_DENSE_LIMIT,
              backend: str | None = None) -> EigenSystem:
    """Full spectrum of a symmetric matrix or a ``NormalizedLaplacian``.

    ``method`` is ``"jacobi"`` (cyclic Jacobi rotations), ``"lapack"``
    (``numpy.linalg.eigh``) or ``"auto"``.
    """
    if getattr(_guard, "depth", 0):
        raise DecompositionForbidden("eigendecomposition is disabled on this code path")
    if isinstance(matrix, NormalizedLaplacian):
        if matrix.n > dense_limit:
            raise DenseLimitExceeded(f"n={matrix.n} exceeds the dense limit {dense_limit}")
        a = matrix.to_dense()
    else:
        a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n > dense_limit:
        raise DenseLimitExceeded(f"n={n} exceeds the dense limit {dense_limit}")
    if n and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    if method == "auto":
        method = "jacobi" if n <= JACOBI_AUTO_MAX else "lapack"
    if method == "jacobi":
        w, v, _ = _backend.resolve(backend).jacobi_eigh(np.ascontiguousarray(a))
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = _order(w)
    return EigenSystem(np.ascontiguousarray(w[order]), np.ascontiguousarray(v[:, order]))


def leading(eigsys: EigenSystem, k: int) -> LeadingEigenvectors:
    if not 1 <= k <= eigsys.n:
        raise ValueError(f"k={k} outside [1, {eigsys.n}]")
    w = eigsys.eigenvalues
    degenerate = k < eigsys.n and abs(w[k - 1]) - abs(w[k]) <= DEGENERATE_GAP
    return LeadingEigenvectors(eigsys.eigenvectors[:, :k], w[:k].copy(),
                               float(abs(w[k - 1])), bool(degenerate))


def ideal_filter_embed(eigsys: EigenSystem, k: int, signals) -> np.ndarray:
    """X X^T R, the ideal low-pass filter applied to each column of R."""
    r = np.asarray(signals, dtype=np.float64)
    if r.ndim == 1:
        r = r[:, None]
    if r.shape[0] != eigsys.n:
        raise ValueError(f"signals have {r.shape[0]} rows, expected {eigsys.n}")
    if not np.all(np.isfinite(r)):
        raise ValueError("signals have non-finite entries")
    x = leading(eigsys, k).vectors
    return x @ (x.T @ r)


def spectral_cluster_exact(lap: NormalizedLaplacian, k: int, seed=0, restarts: int = 10,
                           max_iter: int = 300, method: str = "auto"):
    """Spectral clustering on the k leading eigenvectors; returns a Membership."""
    from .clustering import kmeans, to_membership

    x = leading(decompose(lap, method=method, dense_limit=lap.dense_limit), k).vectors
    return to_membership(kmeans(x, k, seed=seed, restarts=restarts, max_iter=max_iter))
