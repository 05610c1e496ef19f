"""Random signals, compressed embeddings and eigendecomposition-free
estimation of the k-th leading eigenvalue magnitude."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polyfilter import chebyshev_moments, design, filtered_energy
from .rng import box_muller, stream

DEFAULT_BISECT_ITERS = 20


class NonConvergent(RuntimeError):
    """The energy curve was not monotone over the final bisection probes;
    the filter order is too low to resolve the eigengap."""


@dataclass(frozen=True, eq=False)
class RandomSignals:
    """n x d matrix of i.i.d. N(0, 1/d) entries."""

    matrix: np.ndarray
    seed: object = None

    @property
    def shape(self):
        return self.matrix.shape

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    rows: np.ndarray
    kind: str  # "exact", "approximate" or "population"
    k: int
    seed: object = None
    order: object = "ideal"

    def __post_init__(self):
        if self.kind not in ("exact", "approximate", "population"):
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("embedding has non-finite entries")

    @property
    def d(self):
        return self.rows.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.rows if dtype is None else self.rows.astype(dtype)


@dataclass(frozen=True)
class JlParams:
    epsilon1: float
    beta: float
    d: int
    threshold: float


def draw_signals(n: int, d: int, seed=0) -> RandomSignals:
    """Gaussian signals via Box-Muller on the seeded uniform stream, scaled by 1/sqrt(d)."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    z = box_muller(stream(seed), n * d).reshape(n, d) / np.sqrt(d)
    return RandomSignals(z, seed)


def jl_threshold(log_nk: float, epsilon1: float, beta: float) -> float:
    """(4 + 2 beta) / (eps^2/2 - eps^3/3) * log(n + k), given log(n + k)."""
    if not 0.0 < epsilon1 <= 1.0:
        raise ValueError("epsilon1 must lie in (0, 1]")
    if beta <= 0:
        raise ValueError("beta must be positive")
    # same value as (eps^2/2 - eps^3/3) in the denominator, fewer roundings
    return 6.0 * (4.0 + 2.0 * beta) * log_nk / (3.0 * epsilon1**2 - 2.0 * epsilon1**3)


def choose_dimension(n: int, k: int, epsilon1: float, beta: float) -> JlParams:
    """Smallest integer d strictly above the random-projection threshold."""
    t = jl_threshold(math.log(n + k), epsilon1, beta)
    return JlParams(float(epsilon1), float(beta), math.floor(t) + 1, t)


def default_embed_dim(n: int, k: int) -> int:
    return max(4 * k, math.ceil(4 * math.log(n)))


def exact_embed(eigsys, k: int, signals) -> EmbeddingMatrix:
    from .eig import ideal_filter_embed

    rows = ideal_filter_embed(eigsys, k, np.asarray(signals))
    return EmbeddingMatrix(rows, "exact", k, getattr(signals, "seed", None))


def population_embed(pop_eig, sample_x, signals, rotation=None) -> EmbeddingMatrix:
    """Chi O X^T R with O the Procrustes alignment of X onto Chi unless given.

    ``pop_eig`` is the EigenSystem of the population Laplacian and
    ``sample_x`` the LeadingEigenvectors of the sampled one.
    """
    from .eig import leading
    from .metrics import procrustes

    x = sample_x.vectors
    chi = leading(pop_eig, x.shape[1]).vectors
    if chi.shape != x.shape:
        raise ValueError(f"shape mismatch {chi.shape} vs {x.shape}")
    if rotation is None:
        rotation = procrustes(x, chi).rotation
    r = np.asarray(signals, dtype=np.float64)
    if r.shape[0] != x.shape[0]:
        raise ValueError("signals do not match the graph size")
    rows = chi @ (rotation @ (x.T @ r))
    return EmbeddingMatrix(rows, "population", x.shape[1], getattr(signals, "seed", None))


def estimate_lambda_k(lap, k: int, p: int, d: int | None = None, seed=0,
                      iters: int = DEFAULT_BISECT_ITERS, signals=None) -> float:
    """Bisection for |lambda_k| on (0, 1] without an eigendecomposition.

    Each probe designs the order-p filter at the midpoint and compares the
    filtered energy ||h(L) R||_F^2 with k (moving left when it falls short).
    With entries of variance 1/d that energy estimates the number of
    eigenvalues in the passband.  All probes share one R, and their
    energies come from one set of Chebyshev moments, which equals filtering
    R afresh at every probe but costs only p sweeps in total.
    """
    n = lap.n
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if k >= n:
        return 0.5 ** (iters + 1)
    if signals is None:
        signals = draw_signals(n, d or default_embed_dim(n, k), seed)
    moments = chebyshev_moments(lap, np.asarray(signals), p)
    lo, hi = 0.0, 1.0
    probes = []
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        nu = filtered_energy(moments, design(mid, p))
        probes.append((mid, nu))
        if nu < k:
            hi = mid
        else:
            lo = mid
    tail = sorted(probes[-3:])
    for (_, a), (_, b) in zip(tail, tail[1:]):
        if b > a + 1e-9 * max(1.0, abs(a)):
            raise NonConvergent(
                f"filtered energy rises with the cut near {tail[0][0]:.6g}; raise the order p={p}")
    return 0.5 * (lo + hi)


def norm_bounds(k: int, e: float, epsilon2: float, n: int):
    """Interval for ||X~_R||_F^2: lower clamped at 0.

    [(1 - eps2) k - 2 (1 + eps2) k e,  (1 + eps2)(k + 2 k e + n e^2)]
    """
    lower = (1.0 - epsilon2) * k - 2.0 * (1.0 + epsilon2) * k * e
    upper = (1.0 + epsilon2) * (k + 2.0 * k * e + n * e**2)
    return max(lower, 0.0), upper


def norm_bounds_check(x_r_tilde, k: int, e, epsilon2: float) -> bool:
    """True when ||X~_R||_F^2 lies in ``norm_bounds``.

    The statistic is not divided by n: with N(0, 1/d) signals the ideal
    embedding has ||X X^T R||_F^2 = ||X^T R||_F^2, a scaled chi-square with
    mean k.
    """
    rows = np.asarray(x_r_tilde, dtype=np.float64)
    e = getattr(e, "e", e)
    lo, hi = norm_bounds(k, e, epsilon2, rows.shape[0])
    energy = float(np.vdot(rows, rows))
    return lo <= energy <= hi


def concentration_failure_bound(dof: int, epsilon2: float) -> float:
    """Chernoff bound exp(-dof (eps^2 - eps^3) / 4) on a chi-square deviation."""
    return math.exp(-dof * (epsilon2**2 - epsilon2**3) / 4.0)
