"""Trial orchestration: one record per (graph, seed), sweeps and CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .clustering import kmeans, kmeans_certified
from .eig import decompose, forbid_decomposition, leading
from .embed import (DEFAULT_BISECT_ITERS, choose_dimension, default_embed_dim,
                    draw_signals, estimate_lambda_k, population_embed)
from .graph import (DEFAULT_DENSE_LIMIT, IsolatedVertex, laplacian, population_laplacian,
                    read_edgelist)
from .metrics import eq9_bound, miscluster_distance, miscluster_permutation
from .polyfilter import design, fast_filter, filter_error, grid_error
from .rng import GRAPH, KMEANS, SIGNALS
from .sbm import Membership, SimplifiedSbm, sample_adjacency

MAX_RESAMPLES = 5
# distortion assumed for distance-based rates and the reference dimension
# when epsilon1 is not given
DEFAULT_EPSILON1 = 0.5

CSV_COLUMNS = ("seed", "n", "k", "q", "r", "p", "d", "lambda_hat", "e", "rate_perm",
               "rate_dist", "eq9_bound", "wall_time_ms", "resamples")
POLY_COLUMNS = ("p", "e", "e2", "mean_rate", "trials")


@dataclass(frozen=True)
class TrialConfig:
    """Everything a trial needs apart from its seed.

    Either ``model`` or ``edges`` (with ``k``) names the graph.  ``embed_dim``
    fixes d; otherwise d comes from ``epsilon1``/``beta`` when ``epsilon1``
    is set, else from ``default_embed_dim``.
    """

    model: SimplifiedSbm | None = None
    edges: str | None = None
    labels: str | None = None
    k: int | None = None
    algorithm: str = "compressive"
    p: int = 125
    lambda_cut: float | None = None
    embed_dim: int | None = None
    epsilon1: float | None = None
    beta: float = 1.0
    epsilon2: float = 0.5
    bisect_iters: int = DEFAULT_BISECT_ITERS
    kmeans_restarts: int = 10
    kmeans_max_iter: int = 300
    with_oracle_metrics: bool = False
    dense_limit: int = DEFAULT_DENSE_LIMIT
    timing: bool = False
    backend: str | None = None

    def __post_init__(self):
        if (self.model is None) == (self.edges is None):
            raise ValueError("give exactly one of a model or an edge list")
        if self.edges is not None and self.k is None:
            raise ValueError("an edge list needs k")
        if self.model is not None and self.k not in (None, self.model.k):
            raise ValueError("k disagrees with the model")
        if self.algorithm not in ("compressive", "exact"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm == "compressive" and (self.p is None or self.p < 1):
            raise ValueError("the compressive algorithm needs an order p >= 1")
        if self.algorithm == "exact" and self.model is not None and self.model.n > self.dense_limit:
            raise ValueError(f"exact clustering needs n <= dense limit ({self.dense_limit})")
        if self.embed_dim is not None and self.embed_dim < 1:
            raise ValueError("embed_dim must be >= 1")

    @property
    def n_clusters(self):
        return self.model.k if self.model is not None else self.k

    def dimension(self, n: int) -> int:
        if self.embed_dim is not None:
            return self.embed_dim
        if self.epsilon1 is not None:
            return choose_dimension(n, self.n_clusters, self.epsilon1, self.beta).d
        return default_embed_dim(n, self.n_clusters)

    def to_json(self) -> dict:
        out = asdict(self)
        if self.model is not None:
            out["model"] = asdict(self.model)
        return out


@dataclass
class TrialRecord:
    seed: int
    n: int
    k: int
    q: float | None = None
    r: float | None = None
    p: int | None = None
    d: int | None = None
    lambda_hat: float | None = None
    e: float | None = None
    rate_perm: float | None = None
    rate_dist: float | None = None
    eq9_bound: float | None = None
    wall_time_ms: float | None = None
    resamples: int = 0
    e_kind: str = field(default="", repr=False)
    certified: bool | None = field(default=None, repr=False)

    def row(self):
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@dataclass
class _Sample:
    graph: object
    lap: object
    truth: Membership | None
    resamples: int
    spectrum: object = None
    pop_eig: object = None


def _load_labels(path):
    with open(path) as fh:
        return np.array([int(t) for t in fh.read().split()], dtype=np.int64)


def _sample(config: TrialConfig, seed: int, cache=None) -> _Sample:
    """Sampled graph and Laplacian; resamples when a vertex is isolated."""
    key = ("sample", seed, config.model, config.edges)
    if cache is not None and key in cache:
        return cache[key]
    if config.edges is not None:
        graph = read_edgelist(config.edges)
        truth = None
        if config.labels is not None:
            truth = Membership(_load_labels(config.labels), config.k)
        out = _Sample(graph, laplacian(graph, config.dense_limit, config.backend), truth, 0)
    else:
        pop = config.model.population()
        n = config.model.n
        for attempt in range(MAX_RESAMPLES + 1):
            graph = sample_adjacency(pop, (seed, n, GRAPH, attempt))
            try:
                lap = laplacian(graph, config.dense_limit, config.backend)
                break
            except IsolatedVertex:
                if attempt == MAX_RESAMPLES:
                    raise
        out = _Sample(graph, lap, config.model.membership(), attempt)
    if cache is not None:
        cache[key] = out
    return out


def _spectrum(config, sample):
    if sample.spectrum is None:
        sample.spectrum = decompose(sample.lap, dense_limit=config.dense_limit,
                                    backend=config.backend)
    return sample.spectrum


def _population_spectrum(config, sample):
    if sample.pop_eig is None:
        pop = population_laplacian(config.model.population(), config.dense_limit)
        sample.pop_eig = decompose(pop, method="lapack", dense_limit=config.dense_limit)
    return sample.pop_eig


def _base_record(config, seed, sample):
    m = config.model
    return TrialRecord(seed=int(seed), n=sample.graph.n, k=config.n_clusters,
                       q=None if m is None else m.q, r=None if m is None else m.r,
                       resamples=sample.resamples)


def run_compressive(config: TrialConfig, seed: int, cache=None) -> TrialRecord:
    """Algorithm: estimate |lambda_k|, design the filter, filter d random
    signals with p sweeps, then k-means on the filtered rows.

    The clustering path runs with eigendecompositions forbidden.  With
    ``with_oracle_metrics`` the spectral filter error and the distance-based
    misclustering rate are added afterwards from dense oracles.
    """
    t0 = time.perf_counter()
    sample = _sample(config, seed, cache)
    lap, n, k = sample.lap, sample.graph.n, config.n_clusters
    rec = _base_record(config, seed, sample)
    d = config.dimension(n)
    signals = draw_signals(n, d, (seed, n, SIGNALS))
    with forbid_decomposition():
        if config.lambda_cut is not None:
            lam = float(config.lambda_cut)
        else:
            lam = estimate_lambda_k(lap, k, config.p, iters=config.bisect_iters,
                                    signals=signals)
        filt = design(lam, config.p)
        xt = fast_filter(lap, filt, signals)
        km = kmeans(xt, k, seed=(seed, n, KMEANS), restarts=config.kmeans_restarts,
                    max_iter=config.kmeans_max_iter)
    elapsed = (time.perf_counter() - t0) * 1e3
    rec.p, rec.d, rec.lambda_hat = config.p, d, lam
    if sample.truth is not None:
        rec.rate_perm = miscluster_permutation(km.assignment, sample.truth).rate

    if config.with_oracle_metrics and n <= config.dense_limit:
        eig = _spectrum(config, sample)
        lead = leading(eig, k)
        rec.e = filter_error(filt, eig.eigenvalues, lead.lambda_k).e
        rec.e_kind = "spectral"
        if config.model is not None:
            chi_r = population_embed(_population_spectrum(config, sample), lead, signals).rows
            competitor = float(np.sum((chi_r - xt) ** 2))
            best = km
            if km.cost > competitor * (1 + 1e-12):
                best, _ = kmeans_certified(xt, k, competitor, seed=(seed, n, KMEANS),
                                           restarts=2 * config.kmeans_restarts,
                                           max_iter=config.kmeans_max_iter)
            rec.certified = bool(best.cost <= competitor * (1 + 1e-12) + 1e-15)
            rec.rate_dist = miscluster_distance(best.per_row, chi_r, config.model.s,
                                                config.epsilon1 or DEFAULT_EPSILON1).rate
    else:
        rec.e = grid_error(filt, lam).e
        rec.e_kind = "grid"
    rec.eq9_bound = eq9_bound(n, k, rec.e)
    if config.timing:
        rec.wall_time_ms = elapsed
    return rec


def run_exact(config: TrialConfig, seed: int, cache=None) -> TrialRecord:
    """Baseline: leading eigenvectors from the dense oracle, then k-means."""
    t0 = time.perf_counter()
    sample = _sample(config, seed, cache)
    n, k = sample.graph.n, config.n_clusters
    rec = _base_record(config, seed, sample)
    eig = _spectrum(config, sample)
    lead = leading(eig, k)
    km = kmeans(lead.vectors, k, seed=(seed, n, KMEANS), restarts=config.kmeans_restarts,
                max_iter=config.kmeans_max_iter)
    elapsed = (time.perf_counter() - t0) * 1e3
    rec.d, rec.lambda_hat, rec.e, rec.e_kind = k, lead.lambda_k, 0.0, "spectral"
    if sample.truth is not None:
        rec.rate_perm = miscluster_permutation(km.assignment, sample.truth).rate
    rec.eq9_bound = eq9_bound(n, k, 0.0)
    if config.timing:
        rec.wall_time_ms = elapsed
    return rec


def run_trial(config: TrialConfig, seed: int, cache=None) -> TrialRecord:
    fn = run_exact if config.algorithm == "exact" else run_compressive
    return fn(config, seed, cache)


def run_trials(jobs_list, jobs: int = 1, cache=None):
    """Run ``(config, seed)`` pairs; results come back in input order."""
    if jobs <= 1:
        return [run_trial(c, s, cache) for c, s in jobs_list]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda cs: run_trial(cs[0], cs[1], cache), jobs_list))


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(rec.row())
    return buf.getvalue()


def read_records(path_or_text):
    """Parse a trial CSV back into dicts of floats (empty fields become None)."""
    text = path_or_text
    if "\n" not in text:
        with open(text) as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError("unexpected CSV header")
    out = []
    for row in rows[1:]:
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"row has {len(row)} fields")
        out.append({c: (float(v) if v else None) for c, v in zip(CSV_COLUMNS, row)})
    return out


def write_meta(path, config: TrialConfig, extra=None):
    """Sidecar JSON with the config and the random-projection dimension the
    theory asks for."""
    n = config.model.n if config.model is not None else None
    meta = {"config": config.to_json()}
    if n is not None:
        eps = config.epsilon1 or DEFAULT_EPSILON1
        jl = choose_dimension(n, config.n_clusters, eps, config.beta)
        meta["theory_dimension"] = {"epsilon1": eps, "beta": config.beta, "d": jl.d}
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _with_n(base: TrialConfig, n: int) -> TrialConfig:
    m = base.model
    if m is None:
        raise ValueError("sweeps need a simplified model")
    if n % m.k:
        raise ValueError(f"n={n} is not a multiple of k={m.k}")
    return replace(base, model=SimplifiedSbm(m.k, n // m.k, m.q, m.r))


def sweep_n(base: TrialConfig, n_list, p_list, seeds, jobs: int = 1):
    """Full factorial over (n, p, seed) in that nesting order.

    Trials sharing (n, seed) reuse the same graph and signals.
    """
    plan = [(replace(_with_n(base, n), p=int(p)), int(s))
            for n in n_list for p in p_list for s in seeds]
    return run_trials(plan, jobs, cache={})


def sweep_poly(base: TrialConfig, p_range, seeds, jobs: int = 1):
    """Per-trial records and one summary row per p: (p, e, e^2, mean rate).

    e is the spectral filter error averaged over seeds, which needs the
    dense oracle; the grid value is used beyond the dense limit.
    """
    cfg = replace(base, with_oracle_metrics=True)
    plan = [(replace(cfg, p=int(p)), int(s)) for p in p_range for s in seeds]
    records = run_trials(plan, jobs, cache={})
    summary = []
    per_p = len(seeds)
    for i, p in enumerate(p_range):
        chunk = records[i * per_p:(i + 1) * per_p]
        e = float(np.mean([r.e for r in chunk]))
        rates = [r.rate_perm for r in chunk if r.rate_perm is not None]
        rate = float(np.mean(rates)) if rates else math.nan
        summary.append({"p": int(p), "e": e, "e2": e * e, "mean_rate": rate,
                        "trials": len(chunk)})
    return records, summary


def summary_csv(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POLY_COLUMNS)
    for row in summary:
        w.writerow([_fmt(row[c]) for c in POLY_COLUMNS])
    return buf.getvalue()


def median_rates(records):
    """{(n, p): median rate_perm} over seeds."""
    groups = {}
    for r in records:
        groups.setdefault((r.n, r.p), []).append(r.rate_perm)
    return {key: float(np.median(v)) for key, v in groups.items()}
