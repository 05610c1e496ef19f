"""Jackson-damped Chebyshev approximation of the ideal low-pass filter.

The filter passes |lambda| >= lambda_cut.  It is applied to signals with
the three-term recurrence T_{l+1}(L) = 2 L T_l(L) - T_{l-1}(L), so an
order-p filter costs exactly p operator sweeps and never needs L densely.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GRID_POINTS = 2001


@dataclass(frozen=True, eq=False)
class PolyFilter:
    """h(lambda) = sum_l coeffs[l] * damping[l] * T_l(lambda) on [-1, 1]."""

    coeffs: np.ndarray
    damping: np.ndarray
    lambda_cut: float | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64, copy=True).ravel()
        g = np.array(self.damping, dtype=np.float64, copy=True).ravel()
        if len(c) < 1 or c.shape != g.shape:
            raise ValueError("coeffs and damping must be non-empty and equally long")
        c.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "damping", g)

    @classmethod
    def from_chebyshev(cls, weights, lambda_cut=None):
        """Undamped filter with the given Chebyshev weights."""
        weights = np.asarray(weights, dtype=np.float64)
        return cls(weights, np.ones_like(weights), lambda_cut)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def weights(self):
        return self.coeffs * self.damping

    def __call__(self, lam):
        return evaluate(self, lam)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("ell,c,g\n")
            for ell, (c, g) in enumerate(zip(self.coeffs, self.damping)):
                fh.write(f"{ell},{float(c)!r},{float(g)!r}\n")


@dataclass(frozen=True)
class FilterError:
    e: float
    kind: str = "spectral"

    def __post_init__(self):
        if not self.e >= 0:
            raise ValueError("filter error must be non-negative")


def jackson_damping(p: int) -> np.ndarray:
    ell = np.arange(p + 1)
    a = np.pi / (p + 1)
    return ((p - ell + 1) * np.cos(a * ell) + np.sin(a * ell) / np.tan(a)) / (p + 1)


def interval_coefficients(a: float, b: float, p: int) -> np.ndarray:
    """Chebyshev coefficients of the indicator of [a, b] within [-1, 1]."""
    ta, tb = np.arccos(a), np.arccos(b)
    c = np.empty(p + 1)
    c[0] = (ta - tb) / np.pi
    ell = np.arange(1, p + 1)
    c[1:] = 2.0 * (np.sin(ell * ta) - np.sin(ell * tb)) / (ell * np.pi)
    return c


def design(lambda_cut: float, p: int) -> PolyFilter:
    """Order-p filter for the passband [-1, -lambda_cut] U [lambda_cut, 1].

    The two interval expansions cancel on odd terms, so those are set to
    exactly zero and the response is even in lambda.
    """
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValueError(f"order must be an integer >= 1, got {p!r}")
    if not 0.0 < lambda_cut <= 1.0:
        raise ValueError(f"lambda_cut must lie in (0, 1], got {lambda_cut!r}")
    theta = np.arccos(lambda_cut)
    c = np.zeros(p + 1)
    c[0] = 2.0 * theta / np.pi
    even = np.arange(2, p + 1, 2)
    c[even] = 4.0 * np.sin(even * theta) / (even * np.pi)
    return PolyFilter(c, jackson_damping(int(p)), float(lambda_cut))


def evaluate(filt: PolyFilter, lam):
    """Filter response at lam (clipped to [-1, 1]) via the Chebyshev recurrence."""
    x = np.clip(np.asarray(lam, dtype=np.float64), -1.0, 1.0)
    w = filt.weights
    t0 = np.ones_like(x)
    out = w[0] * t0
    if len(w) > 1:
        t1 = x.copy()
        out = out + w[1] * t1
        for ell in range(2, len(w)):
            t0, t1 = t1, 2.0 * x * t1 - t0
            out = out + w[ell] * t1
    return out if out.ndim else float(out)


def ideal_response(lam, lambda_k: float):
    """1 where |lam| >= |lambda_k|, else 0."""
    return (np.abs(np.asarray(lam, dtype=np.float64)) >= abs(lambda_k)).astype(np.float64)


def filter_error(filt: PolyFilter, spectrum, lambda_k: float) -> FilterError:
    """max over the given eigenvalues of |h_filter - h_ideal|."""
    lam = np.asarray(spectrum, dtype=np.float64).ravel()
    if len(lam) == 0:
        raise ValueError("empty spectrum")
    return FilterError(float(np.max(np.abs(evaluate(filt, lam) - ideal_response(lam, lambda_k)))))


def grid_error(filt: PolyFilter, lambda_k: float, points: int = GRID_POINTS) -> FilterError:
    """Same maximum over a uniform grid of [-1, 1] plus the points +-|lambda_k|,
    where the ideal response jumps and the error peaks."""
    cut = abs(lambda_k)
    lam = np.concatenate([np.linspace(-1.0, 1.0, points), [-cut, cut]])
    err = np.max(np.abs(evaluate(filt, lam) - ideal_response(lam, lambda_k)))
    return FilterError(float(err), kind="grid")


def fast_filter(lap, filt: PolyFilter, signals) -> np.ndarray:
    """sum_l w_l T_l(L) R using p operator sweeps and three n x d panels."""
    r = np.asarray(signals, dtype=np.float64)
    squeeze = r.ndim == 1
    if squeeze:
        r = r[:, None]
    if r.shape[0] != lap.n:
        raise ValueError(f"signals have {r.shape[0]} rows, expected {lap.n}")
    w = filt.weights
    acc = np.ascontiguousarray(w[0] * r)
    if len(w) > 1:
        t0 = np.array(r, order="C", copy=True)
        t1 = lap.matmat(t0)
        acc += w[1] * t1
        for ell in range(2, len(w)):
            lap.cheb_step(t1, t0, acc, w[ell])
            t0, t1 = t1, t0
    return acc[:, 0] if squeeze else acc


def chebyshev_moments(lap, signals, p: int) -> np.ndarray:
    """mu_j = trace(R^T T_j(L) R) for j = 0..2p, from p operator sweeps.

    Uses T_j^2 = (T_2j + T_0) / 2 and T_{j+1} T_j = (T_{2j+1} + T_1) / 2.
    """
    r = np.array(signals, dtype=np.float64, order="C", copy=True)
    if r.ndim == 1:
        r = r[:, None]
    mu = np.empty(2 * p + 1)
    mu[0] = np.vdot(r, r)
    t1 = lap.matmat(r)
    mu[1] = np.vdot(r, t1)
    mu[2] = 2.0 * np.vdot(t1, t1) - mu[0]
    t0 = r
    for j in range(1, p):
        sq, cross = lap.cheb_step(t1, t0)
        mu[2 * j + 1] = 2.0 * cross - mu[1]
        mu[2 * j + 2] = 2.0 * sq - mu[0]
        t0, t1 = t1, t0
    return mu


def filtered_energy(moments, filt: PolyFilter) -> float:
    """||h(L) R||_F^2 computed from Chebyshev moments of order >= 2p."""
    w = filt.weights
    p = len(w) - 1
    if len(moments) < 2 * p + 1:
        raise ValueError("not enough moments for this filter order")
    i = np.arange(p + 1)
    gram = 0.5 * (moments[i[:, None] + i[None, :]] + moments[np.abs(i[:, None] - i[None, :])])
    return float(w @ gram @ w)
