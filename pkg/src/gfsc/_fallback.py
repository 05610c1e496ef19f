"""Pure numpy/scipy twins of the compiled kernels in ``_kernels.pyx``."""
import numpy as np
import scipy.sparse as sp


def _adjacency(indptr, indices, n):
    data = np.ones(len(indices))
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def lap_matmat(indptr, indices, isd, y, out):
    n = y.shape[0]
    w = _adjacency(indptr, indices, n)
    out[...] = isd[:, None] * (w @ (isd[:, None] * y))


def cheb_step(indptr, indices, isd, t1, t0, acc, coef):
    n = t1.shape[0]
    w = _adjacency(indptr, indices, n)
    t0 *= -1.0
    t0 += (2.0 * isd)[:, None] * (w @ (isd[:, None] * t1))
    if acc.shape[0] == n and coef != 0.0:
        acc += coef * t0
    return float(np.vdot(t0, t0)), float(np.vdot(t0, t1))


def _round_robin(m):
    """Circle-method schedule: m - 1 rounds of m / 2 disjoint pairs (m even)."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, tol=1e-14, max_sweeps=60):
    """Parallel-ordered Jacobi: each round rotates n/2 disjoint pairs at once."""
    n = a.shape[0]
    m = n + (n % 2)
    work = np.zeros((m, m))
    work[:n, :n] = a
    v = np.eye(m)
    frob = np.linalg.norm(work)
    rounds = _round_robin(m) if m > 1 else []
    sweep = 0
    while sweep < max_sweeps:
        off = np.linalg.norm(work - np.diag(np.diag(work)))
        if frob == 0.0 or off <= tol * frob:
            break
        sweep += 1
        for p, q in rounds:
            apq = work[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (work[q, q] - work[p, p]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = work[p, :].copy(), work[q, :].copy()
            work[p, :] = c[:, None] * rp - s[:, None] * rq
            work[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = work[:, p].copy(), work[:, q].copy()
            work[:, p] = cp * c - cq * s
            work[:, q] = cp * s + cq * c
            work[p, q] = 0.0
            work[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    # the padding row/column never couples to real indices, so it stays last
    return np.diag(work)[:n].copy(), np.ascontiguousarray(v[:n, :n]), sweep
