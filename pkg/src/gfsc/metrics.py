"""Misclustering measures, Procrustes alignment and bound evaluation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import DEFAULT_DENSE_LIMIT, population_laplacian
from .sbm import Membership, SimplifiedSbm

# relative slack so that a displacement of exactly the threshold counts
BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProcrustesAlignment:
    rotation: np.ndarray
    residual: float
    degenerate: bool


@dataclass(frozen=True)
class MisclusterReport:
    count: int
    rate: float
    definition: str
    P: int | None = None
    epsilon1: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must lie in [0, 1]")


@dataclass(frozen=True)
class SimplifiedQuantities:
    lambda_bar: float
    tau: float
    P: int
    lambda_k_population: float | None


@dataclass(frozen=True)
class BoundReport:
    lambda_bar: float
    tau: float
    P: int
    eq9_bound: float
    observed_rate: float | None = None


def procrustes(x, chi) -> ProcrustesAlignment:
    """Orthogonal O minimizing ||X - Chi O||_F (SVD of Chi^T X)."""
    x = np.asarray(x, dtype=np.float64)
    chi = np.asarray(chi, dtype=np.float64)
    if x.shape != chi.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {chi.shape}")
    u, s, vt = np.linalg.svd(chi.T @ x)
    o = u @ vt
    degenerate = bool(s[-1] <= 1e-12 * max(s[0], 1e-300))
    return ProcrustesAlignment(o, float(np.linalg.norm(x - chi @ o)), degenerate)


def distance_threshold(P: int, epsilon1: float) -> float:
    return (1.0 - epsilon1) / np.sqrt(2.0 * P)


def miscluster_distance(centroids_per_row, chi_r, P: int, epsilon1: float) -> MisclusterReport:
    """Count rows whose centroid is at least (1 - eps1)/sqrt(2P) from its population row."""
    c = np.asarray(centroids_per_row, dtype=np.float64)
    chi_r = np.asarray(chi_r, dtype=np.float64)
    if c.shape != chi_r.shape:
        raise ValueError(f"shape mismatch {c.shape} vs {chi_r.shape}")
    dist = np.linalg.norm(c - chi_r, axis=1)
    thr = distance_threshold(P, epsilon1)
    count = int(np.sum(dist >= thr * (1.0 - BOUNDARY_RTOL)))
    return MisclusterReport(count, count / len(dist), "distance", int(P), float(epsilon1))


def miscluster_permutation(est: Membership, truth: Membership) -> MisclusterReport:
    """Minimum Hamming distance over label matchings (optimal assignment)."""
    if est.n != truth.n:
        raise ValueError("memberships differ in size")
    confusion = np.zeros((est.k, truth.k), dtype=np.int64)
    np.add.at(confusion, (est.labels, truth.labels), 1)
    rows, cols = linear_sum_assignment(-confusion)
    count = int(est.n - confusion[rows, cols].sum())
    return MisclusterReport(count, count / est.n, "permutation", truth.largest)


def lambda_bar(k: int, q: float, r: float) -> float:
    if q <= 0:
        raise ValueError("q = 0 leaves the eigengap formula undefined; "
                         "use the eigendecomposition of the population Laplacian instead")
    return 1.0 / (k * (r / q) + 1.0)


def simplified_quantities(model: SimplifiedSbm, cross_check: bool = True,
                          dense_limit: int = DEFAULT_DENSE_LIMIT) -> SimplifiedQuantities:
    """Closed-form eigengap and sparsity of the four-parameter model.

    With ``cross_check`` the k-th absolute eigenvalue of the population
    Laplacian is computed as well (these formulas ignore the zeroed
    diagonal, so the two differ by O(1/n)).
    """
    lam = lambda_bar(model.k, model.q, model.r)
    tau = model.q / model.k + model.r
    lam_pop = None
    if cross_check and model.n <= dense_limit:
        from .eig import decompose

        eig = decompose(population_laplacian(model.population(), dense_limit),
                        method="lapack", dense_limit=dense_limit)
        lam_pop = float(abs(eig.eigenvalues[model.k - 1]))
    return SimplifiedQuantities(lam, tau, model.s, lam_pop)


def eq9_bound(n: int, k: int, e: float) -> float:
    """k^3 (log n)^2 / n + n^2 e^2 / k, natural log, no constant."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    return k**3 * np.log(n) ** 2 / n + n**2 * e**2 / k


def bound_report(model: SimplifiedSbm, e: float, observed_rate=None) -> BoundReport:
    q = simplified_quantities(model, cross_check=False)
    return BoundReport(q.lambda_bar, q.tau, q.P, eq9_bound(model.n, model.k, e), observed_rate)


def sufficient_condition_violations(centroids_per_row, chi_r, truth: Membership,
                                    P: int, epsilon1: float) -> np.ndarray:
    """Rows that meet the distance condition yet are not strictly closer to
    their own population row than to every other block's row."""
    c = np.asarray(centroids_per_row, dtype=np.float64)
    chi_r = np.asarray(chi_r, dtype=np.float64)
    reps = np.array([np.flatnonzero(truth.labels == g)[0] for g in range(truth.k)])
    centers = chi_r[reps]
    own = np.linalg.norm(c - chi_r, axis=1)
    ok = own < distance_threshold(P, epsilon1)
    to_centers = np.linalg.norm(c[:, None, :] - centers[None, :, :], axis=2)
    to_centers[np.arange(len(c)), truth.labels] = np.inf
    bad = ok & ~(own < to_centers.min(axis=1))
    return np.flatnonzero(bad)


def error_chain(centroids_per_row, chi_r, x_r, x_r_tilde):
    """Terms of ||C - Chi_R||^2 <= 4 ||Chi_R - X_R||^2 + 4 ||X_R - X~_R||^2,
    plus the k-means certificate ||C - X~_R||^2 <= ||Chi_R - X~_R||^2."""
    def sq(a, b):
        d = np.asarray(a) - np.asarray(b)
        return float(np.vdot(d, d))

    lhs = sq(centroids_per_row, chi_r)
    rhs = 4.0 * sq(chi_r, x_r) + 4.0 * sq(x_r, x_r_tilde)
    certificate = sq(centroids_per_row, x_r_tilde) <= sq(chi_r, x_r_tilde) * (1 + 1e-12)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs * (1 + 1e-12) + 1e-15,
            "certificate": certificate}
