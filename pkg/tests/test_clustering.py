import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gfsc import Membership, kmeans, kmeans_certified, miscluster_permutation, to_membership
from gfsc.clustering import _lloyd, _plusplus

from oracles import brute_force_kmeans_cost

points = st.integers(0, 10**6).map(lambda s: np.random.default_rng(s).standard_normal((30, 3)))


def test_repeated_locations():
    locs = np.array([[0.0, 0.0], [5.0, 1.0], [-3.0, 4.0]])
    x = np.repeat(locs, 4, axis=0)
    res = kmeans(x, 3, seed=0)
    assert res.cost == 0.0
    truth = Membership(np.repeat(np.arange(3), 4), 3)
    assert miscluster_permutation(res.assignment, truth).count == 0


def test_single_cluster():
    x = np.random.default_rng(0).standard_normal((20, 3))
    res = kmeans(x, 1)
    np.testing.assert_allclose(res.centroids[0], x.mean(axis=0), atol=1e-14)
    assert res.cost == pytest.approx(np.sum((x - x.mean(axis=0)) ** 2))
    assert np.all(to_membership(res).one_hot() == 1)


def test_validation():
    with pytest.raises(ValueError):
        kmeans(np.ones((3, 2)), 4)
    with pytest.raises(ValueError):
        kmeans(np.array([[np.nan]]), 1)
    with pytest.raises(ValueError):
        kmeans(np.ones((3, 2)), 2, restarts=0)


def test_exhaustive_optimum_small_instances():
    hits = 0
    for seed in range(100):
        x = np.random.default_rng(seed).standard_normal((8, 2))
        hits += kmeans(x, 2, seed=seed).cost <= brute_force_kmeans_cost(x, 2) * (1 + 1e-9)
    assert hits >= 95


@given(x=points, k=st.integers(1, 6), seed=st.integers(0, 1000))
def test_result_invariants(x, k, seed):
    res = kmeans(x, k, seed=seed, restarts=3)
    c = res.per_row
    assert len(np.unique(c, axis=0)) <= k
    assert abs(res.cost - np.sum((c - x) ** 2)) <= 1e-10 * max(1.0, res.cost)
    for g in range(k):
        members = x[res.labels == g]
        assert len(members) > 0
        np.testing.assert_allclose(res.centroids[g], members.mean(axis=0), atol=1e-8)
    z = to_membership(res).one_hot()
    assert np.all(z.sum(axis=1) == 1)
    np.testing.assert_array_equal(z.sum(axis=0), np.bincount(res.labels, minlength=k))


@given(x=points, k=st.integers(2, 6), seed=st.integers(0, 1000))
def test_lloyd_cost_non_increasing(x, k, seed):
    c0 = _plusplus(x, k, np.random.default_rng(seed))
    _, _, _, history = _lloyd(x, c0, 300, 1e-10)
    assert np.all(np.diff(history) <= 1e-12 * max(history))


@given(x=points, seed=st.integers(0, 1000), perm_seed=st.integers(0, 1000))
def test_deterministic_and_permutation_equivariant(x, seed, perm_seed):
    a = kmeans(x, 3, seed=seed)
    b = kmeans(x, 3, seed=seed)
    assert np.array_equal(a.labels, b.labels)
    perm = np.random.default_rng(perm_seed).permutation(len(x))
    c = kmeans(x[perm], 3, seed=seed)
    # same partition up to relabeling when the optimum is found in both
    if abs(c.cost - a.cost) <= 1e-9 * a.cost:
        ma, mc = Membership(a.labels[perm], 3), Membership(c.labels, 3)
        assert miscluster_permutation(ma, mc).count == 0


def test_empty_cluster_reseeded():
    # more clusters than distinct locations still returns k non-empty clusters
    x = np.array([[0.0], [0.0], [0.0], [1.0]])
    res = kmeans(x, 3, seed=0)
    assert len(np.unique(res.labels)) == 3


def test_certified_escalates():
    x = np.random.default_rng(3).standard_normal((40, 2))
    res, ok = kmeans_certified(x, 3, competitor_cost=0.0, restarts=5, max_restarts=20)
    assert not ok and res.restarts == 20
    res, ok = kmeans_certified(x, 3, competitor_cost=np.inf)
    assert ok and res.restarts == 10
