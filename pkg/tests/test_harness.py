import math

import numpy as np
import pytest

import gfsc.eig as eig_module
import gfsc.harness as harness
from gfsc import (SimplifiedSbm, TrialConfig, decompose, design, draw_signals, error_chain,
                  fast_filter, kmeans_certified, leading, population_embed,
                  population_laplacian, run_compressive, run_exact, sweep_n, sweep_poly,
                  write_edgelist)
from gfsc.harness import CSV_COLUMNS, median_rates, read_records, records_csv
from gfsc.metrics import sufficient_condition_violations
from gfsc.rng import KMEANS, SIGNALS


@pytest.fixture
def cliques_files(tmp_path, two_cliques):
    edges, labels = tmp_path / "g.txt", tmp_path / "z.txt"
    write_edgelist(two_cliques(20), edges, k=2)
    labels.write_text("\n".join(["0"] * 20 + ["1"] * 20) + "\n")
    return str(edges), str(labels)


def test_config_validation():
    m = SimplifiedSbm(2, 10, 0.3, 0.1)
    with pytest.raises(ValueError):
        TrialConfig()
    with pytest.raises(ValueError):
        TrialConfig(model=m, edges="x", k=2)
    with pytest.raises(ValueError):
        TrialConfig(edges="x")
    with pytest.raises(ValueError):
        TrialConfig(model=m, p=0)
    with pytest.raises(ValueError):
        TrialConfig(model=m, algorithm="exact", dense_limit=10)
    with pytest.raises(ValueError):
        TrialConfig(model=m, algorithm="other")


def test_config_dimension_choice():
    m = SimplifiedSbm(4, 64, 0.3, 0.1)
    assert TrialConfig(model=m).dimension(256) == 23
    assert TrialConfig(model=m, embed_dim=7).dimension(256) == 7
    assert TrialConfig(model=m, epsilon1=1.0).dimension(996) == 249


def test_compressive_two_cliques(cliques_files):
    edges, labels = cliques_files
    rec = run_compressive(TrialConfig(edges=edges, labels=labels, k=2, p=125), 0)
    assert rec.rate_perm == 0.0
    assert rec.q is None and rec.rate_dist is None and rec.e_kind == "grid"


def test_single_cluster_rate_zero():
    m = SimplifiedSbm(1, 40, 0.0, 0.3)
    for seed in range(3):
        assert run_compressive(TrialConfig(model=m, p=25), seed).rate_perm == 0.0
        assert run_exact(TrialConfig(model=m, algorithm="exact"), seed).rate_perm == 0.0


def test_compressive_path_never_decomposes(monkeypatch):
    def boom(*a, **kw):
        raise AssertionError("eigendecomposition on the production path")
    monkeypatch.setattr(harness, "decompose", boom)
    monkeypatch.setattr(eig_module, "decompose", boom)
    rec = run_compressive(TrialConfig(model=SimplifiedSbm(3, 40, 0.5, 0.05), p=50), 0)
    assert rec.rate_perm is not None


def test_resampling_counts(monkeypatch):
    calls = []
    real = harness.laplacian

    def flaky(graph, *a, **kw):
        calls.append(1)
        if len(calls) < 3:
            raise harness.IsolatedVertex(0)
        return real(graph, *a, **kw)
    monkeypatch.setattr(harness, "laplacian", flaky)
    rec = run_compressive(TrialConfig(model=SimplifiedSbm(2, 20, 0.5, 0.1), p=10), 0)
    assert rec.resamples == 2


def test_resampling_gives_up(monkeypatch):
    def never(*a, **kw):
        raise harness.IsolatedVertex(0)
    monkeypatch.setattr(harness, "laplacian", never)
    with pytest.raises(harness.IsolatedVertex):
        run_compressive(TrialConfig(model=SimplifiedSbm(2, 20, 0.5, 0.1), p=10), 0)


def test_high_order_beats_low_order():
    base = TrialConfig(model=SimplifiedSbm(4, 256, 0.3, 0.1))
    recs = sweep_n(base, [1024], [5, 125], range(10))
    med = median_rates(recs)
    assert med[(1024, 125)] < med[(1024, 5)]


def test_exact_strong_signal():
    cfg = TrialConfig(model=SimplifiedSbm(4, 128, 0.5, 0.05), algorithm="exact")
    rates = [run_exact(cfg, s).rate_perm for s in range(10)]
    assert sum(r == 0 for r in rates) >= 9
    rec = run_exact(cfg, 0)
    assert rec.d == 4 and rec.p is None and rec.e == 0.0


def test_exact_and_compressive_agree():
    m = SimplifiedSbm(4, 64, 0.3, 0.1)
    diffs = [run_exact(TrialConfig(model=m, algorithm="exact"), s).rate_perm
             - run_compressive(TrialConfig(model=m, p=125), s).rate_perm for s in range(10)]
    assert abs(np.median(diffs)) <= 0.02


def test_distance_rate_strong_signal():
    cfg = TrialConfig(model=SimplifiedSbm(4, 128, 0.5, 0.05), p=125, with_oracle_metrics=True)
    recs = [run_compressive(cfg, s) for s in range(10)]
    assert np.median([r.rate_dist for r in recs]) <= 0.02
    assert all(r.e_kind == "spectral" for r in recs)


def test_proof_chain_on_trials():
    model = SimplifiedSbm(4, 64, 0.3, 0.1)
    n = model.n
    pop_eig = decompose(population_laplacian(model.population()), method="lapack")
    truth = model.membership()
    for seed in range(10):
        for p in (5, 25, 125):
            sample = harness._sample(TrialConfig(model=model), seed)
            eig = decompose(sample.lap)
            lead = leading(eig, 4)
            r = draw_signals(n, 23, (seed, n, SIGNALS))
            cut = 0.5 * (abs(eig.eigenvalues[3]) + abs(eig.eigenvalues[4]))
            xt = fast_filter(sample.lap, design(cut, p), r.matrix)
            x_r = lead.vectors @ (lead.vectors.T @ r.matrix)
            chi_r = population_embed(pop_eig, lead, r).rows
            competitor = float(np.sum((chi_r - xt) ** 2))
            km, ok = kmeans_certified(xt, 4, competitor, seed=(seed, n, KMEANS))
            chain = error_chain(km.per_row, chi_r, x_r, xt)
            assert chain["certificate"] == ok
            if ok:
                assert chain["holds"]
            assert len(sufficient_condition_violations(km.per_row, chi_r, truth, 64, 0.5)) == 0


def test_sweep_single_cell():
    recs = sweep_n(TrialConfig(model=SimplifiedSbm(2, 32, 0.5, 0.1)), [64], [10], [3])
    text = records_csv(recs)
    assert len(text.splitlines()) == 2
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_sweep_order_and_shared_graphs():
    recs = sweep_n(TrialConfig(model=SimplifiedSbm(2, 32, 0.5, 0.1)), [64, 128], [5, 10], [0, 1])
    assert [(r.n, r.p, r.seed) for r in recs] == [
        (n, p, s) for n in (64, 128) for p in (5, 10) for s in (0, 1)]


def test_csv_schema_and_determinism():
    base = TrialConfig(model=SimplifiedSbm(2, 32, 0.5, 0.1))
    a = records_csv(sweep_n(base, [64, 128], [5, 25], range(3)))
    b = records_csv(sweep_n(base, [64, 128], [5, 25], range(3)))
    assert a == b
    for row in read_records(a):
        assert row["wall_time_ms"] is None
        for c in ("seed", "n", "k", "q", "r", "p", "d", "lambda_hat", "e", "rate_perm",
                  "eq9_bound", "resamples"):
            assert row[c] is not None and math.isfinite(row[c])


def test_parallel_matches_serial():
    base = TrialConfig(model=SimplifiedSbm(2, 32, 0.5, 0.1))
    a = records_csv(sweep_n(base, [64], [5, 25], range(4), jobs=1))
    b = records_csv(sweep_n(base, [64], [5, 25], range(4), jobs=3))
    assert a == b


def test_timing_opt_in():
    rec = run_compressive(TrialConfig(model=SimplifiedSbm(2, 32, 0.5, 0.1), p=5, timing=True), 0)
    assert rec.wall_time_ms > 0


def test_sweep_poly_single_order():
    recs, summary = sweep_poly(TrialConfig(model=SimplifiedSbm(2, 32, 0.5, 0.1)), [7], [0, 1])
    assert len(summary) == 1 and len(recs) == 2
    assert summary[0]["e2"] == pytest.approx(summary[0]["e"] ** 2)
    assert len(harness.summary_csv(summary).splitlines()) == 2


def test_sweep_poly_error_decreases():
    _, summary = sweep_poly(TrialConfig(model=SimplifiedSbm(4, 64, 0.3, 0.1)), range(5, 26),
                            range(3))
    e = [row["e"] for row in summary]
    assert np.all(np.diff(e) < 0)


def test_meta_sidecar(tmp_path):
    path = tmp_path / "m.json"
    harness.write_meta(path, TrialConfig(model=SimplifiedSbm(4, 250, 0.3, 0.1)), {"seeds": [0]})
    import json
    meta = json.loads(path.read_text())
    assert meta["theory_dimension"]["d"] > 0
    assert meta["config"]["model"]["k"] == 4


@pytest.mark.slow
def test_growing_cluster_count_trend():
    medians = []
    for n in (256, 1024, 4096):
        k = math.ceil(n**0.25)
        cfg = TrialConfig(model=SimplifiedSbm(k, n // k, 0.3, 0.1), p=125)
        medians.append(np.median([run_compressive(cfg, s).rate_perm for s in range(5)]))
    assert medians[0] >= medians[1] >= medians[2]
