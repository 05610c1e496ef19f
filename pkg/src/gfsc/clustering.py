"""k-means (k-means++ seeding, Lloyd iterations, best of several restarts)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import stream
from .sbm import Membership

_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class KMeansResult:
    centroids: np.ndarray
    labels: np.ndarray
    cost: float
    history: tuple
    restarts: int

    @property
    def k(self):
        return self.centroids.shape[0]

    @property
    def per_row(self):
        """C: row i is the centroid of row i's cluster."""
        return self.centroids[self.labels]

    @property
    def assignment(self):
        return Membership(self.labels, self.k)


def _sq_dist(x, c):
    n, k = x.shape[0], c.shape[0]
    out = np.empty((n, k))
    step = max(1, _CHUNK // max(1, k * x.shape[1]))
    for lo in range(0, n, step):
        diff = x[lo:lo + step, None, :] - c[None, :, :]
        out[lo:lo + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _cost(x, c, labels):
    diff = x - c[labels]
    return float(np.vdot(diff, diff))


def _means(x, labels, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    return sums / np.maximum(counts, 1)[:, None], counts


def _plusplus(x, k, rng):
    n = x.shape[0]
    centers = [int(rng.integers(n))]
    d2 = np.sum((x - x[centers[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(rng.integers(n))
        centers.append(nxt)
        d2 = np.minimum(d2, np.sum((x - x[nxt]) ** 2, axis=1))
    return x[centers].copy()


def _fill_empty(x, c, labels, d2, k):
    """Re-seed empty clusters at the points farthest from their centroids."""
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if not len(empty):
        return c, labels
    own = d2[np.arange(len(labels)), labels]
    order = np.argsort(-own, kind="stable")
    pos = 0
    for j in empty:
        while counts[labels[order[pos]]] <= 1:
            pos += 1
        i = order[pos]
        pos += 1
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
    c, _ = _means(x, labels, k)
    return c, labels


def _lloyd(x, c, max_iter, tol):
    k = c.shape[0]
    labels = None
    history = []
    for _ in range(max_iter):
        d2 = _sq_dist(x, c)
        new = np.argmin(d2, axis=1)
        cost = float(d2[np.arange(len(new)), new].sum())
        history.append(cost)
        stalled = len(history) > 1 and history[-2] - cost <= tol * history[-2]
        if labels is not None and (np.array_equal(new, labels) or stalled):
            labels = new
            break
        labels = new
        c, _ = _means(x, labels, k)
        c, labels = _fill_empty(x, c, labels, d2, k)
    c, _ = _means(x, labels, k)
    c, labels = _fill_empty(x, c, labels, _sq_dist(x, c), k)
    final = _cost(x, c, labels)
    if not history or final < history[-1]:
        history.append(final)
    else:
        history[-1] = final
    return c, labels, final, history


def kmeans(points, k: int, seed=0, restarts: int = 10, max_iter: int = 300,
           tol: float = 1e-10) -> KMeansResult:
    """Best-of-``restarts`` Lloyd run from k-means++ seeds.

    Deterministic for an integer seed (restarts draw from one stream in
    order).  Empty clusters are re-seeded, never reported.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in [1, n={n}]")
    if not np.all(np.isfinite(x)):
        raise ValueError("points have non-finite entries")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = stream(seed)
    best = None
    for _ in range(restarts):
        c0 = _plusplus(x, k, rng)
        c, labels, cost, history = _lloyd(x, c0, max_iter, tol)
        if best is None or cost < best[2]:
            best = (c, labels, cost, history)
    c, labels, cost, history = best
    return KMeansResult(c, labels, cost, tuple(history), restarts)


def kmeans_certified(points, k: int, competitor_cost: float, seed=0, restarts: int = 10,
                     max_restarts: int = 80, max_iter: int = 300):
    """k-means whose cost must not exceed ``competitor_cost``.

    Doubles the restart count up to ``max_restarts`` while the certificate
    fails.  Returns ``(result, certified)``.
    """
    while True:
        result = kmeans(points, k, seed=seed, restarts=restarts, max_iter=max_iter)
        ok = result.cost <= competitor_cost * (1 + 1e-12) + 1e-15
        if ok or restarts >= max_restarts:
            return result, ok
        restarts = min(2 * restarts, max_restarts)


def to_membership(result: KMeansResult) -> Membership:
    return result.assignment
