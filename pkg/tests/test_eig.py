import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gfsc import (BlockMatrix, DecompositionForbidden, DenseLimitExceeded, Membership,
                  SimplifiedSbm, SparseGraph, build_population, decompose, forbid_decomposition,
                  ideal_filter_embed, laplacian, leading, lambda_bar, miscluster_permutation,
                  population_laplacian, sample_adjacency, spectral_cluster_exact)

METHODS = ("jacobi", "lapack")


def _two_edges():
    return SparseGraph.from_edges(4, [0, 2], [1, 3])


@pytest.mark.parametrize("method", METHODS)
def test_identity(method, backend):
    eig = decompose(np.eye(3), method=method, backend=backend)
    np.testing.assert_allclose(eig.eigenvalues, 1.0)
    np.testing.assert_allclose(eig.reconstruct(), np.eye(3), atol=1e-14)


@pytest.mark.parametrize("method", METHODS)
def test_two_disjoint_edges(method, backend):
    eig = decompose(laplacian(_two_edges()), method=method, backend=backend)
    np.testing.assert_allclose(eig.eigenvalues, [1, 1, -1, -1], atol=1e-14)


@pytest.mark.parametrize("method", METHODS)
def test_k4_spectrum(k4_graph, method, backend):
    # closed form of (J - I)/3: 1 once and -1/3 three times
    eig = decompose(laplacian(k4_graph), method=method, backend=backend)
    np.testing.assert_allclose(eig.eigenvalues, [1, -1 / 3, -1 / 3, -1 / 3], atol=1e-10)


def test_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        decompose(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_rejects_over_limit():
    with pytest.raises(DenseLimitExceeded):
        decompose(np.eye(5), dense_limit=4)


def test_forbid_decomposition():
    with forbid_decomposition():
        with pytest.raises(DecompositionForbidden):
            decompose(np.eye(2))
    decompose(np.eye(2))


@given(seed=st.integers(0, 10_000), n=st.integers(2, 40))
def test_eigensystem_invariants(seed, n):
    a = np.random.default_rng(seed).standard_normal((n, n))
    a = (a + a.T) / 2
    for method in METHODS:
        eig = decompose(a, method=method)
        u = eig.eigenvectors
        assert np.abs(u.T @ u - np.eye(n)).max() <= 1e-10
        assert np.abs(eig.reconstruct() - a).max() <= 1e-8
        mag = np.abs(eig.eigenvalues)
        assert np.all(np.diff(mag) <= 1e-9)


def test_tie_break_by_signed_value():
    eig = decompose(np.diag([-1.0, 0.5, 1.0, -0.5]))
    np.testing.assert_array_equal(eig.eigenvalues, [1.0, -1.0, 0.5, -0.5])


def test_jacobi_matches_lapack_on_graph(backend):
    g = sample_adjacency(SimplifiedSbm(3, 30, 0.3, 0.1).population(), 4)
    lap = laplacian(g)
    a = decompose(lap, method="jacobi", backend=backend).eigenvalues
    b = decompose(lap, method="lapack").eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_leading_full():
    eig = decompose(laplacian(_two_edges()))
    lead = leading(eig, 4)
    np.testing.assert_array_equal(lead.vectors, eig.eigenvectors)


def test_leading_two_edges_span():
    lead = leading(decompose(laplacian(_two_edges())), 2)
    expect = np.array([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]) / 2
    assert np.linalg.norm(lead.projector() - expect) <= 1e-12
    assert lead.degenerate


def test_leading_k4():
    lead = leading(decompose(laplacian(SparseGraph.from_edges(4, *np.triu_indices(4, 1)))), 1)
    assert lead.lambda_k == pytest.approx(1.0)
    np.testing.assert_allclose(np.abs(lead.vectors[:, 0]), 0.5)


def test_leading_out_of_range():
    eig = decompose(np.eye(3))
    with pytest.raises(ValueError):
        leading(eig, 0)
    with pytest.raises(ValueError):
        leading(eig, 4)


@given(seed=st.integers(0, 10_000), k=st.integers(1, 6))
def test_leading_orthonormal_and_ordered(seed, k):
    g = sample_adjacency(SimplifiedSbm(3, 12, 0.4, 0.1).population(), seed)
    try:
        lap = laplacian(g)
    except ValueError:
        return
    eig = decompose(lap)
    lead = leading(eig, k)
    assert np.abs(lead.vectors.T @ lead.vectors - np.eye(k)).max() <= 1e-10
    assert np.all(np.abs(eig.eigenvalues[k:]) <= lead.lambda_k + 1e-12)


def test_ideal_embed_all_pass():
    eig = decompose(laplacian(_two_edges()))
    r = np.random.default_rng(0).standard_normal((4, 3))
    np.testing.assert_allclose(ideal_filter_embed(eig, 4, r), r, atol=1e-12)


def test_ideal_embed_fixes_its_range():
    g = sample_adjacency(SimplifiedSbm(4, 8, 0.5, 0.05).population(), 1)
    eig = decompose(laplacian(g))
    x = leading(eig, 4).vectors
    np.testing.assert_allclose(ideal_filter_embed(eig, 4, x), x, atol=1e-12)


def test_ideal_embed_energy_two_paths():
    g = sample_adjacency(SimplifiedSbm(4, 8, 0.5, 0.05).population(), 2)
    eig = decompose(laplacian(g))
    r = np.random.default_rng(5).standard_normal((32, 10))
    xr = ideal_filter_embed(eig, 4, r)
    x = leading(eig, 4).vectors
    assert abs(np.sum(xr**2) - np.sum((x.T @ r) ** 2)) <= 1e-10
    np.testing.assert_allclose(ideal_filter_embed(eig, 4, xr), xr, atol=1e-10)


def test_ideal_embed_validation():
    eig = decompose(np.eye(3))
    with pytest.raises(ValueError):
        ideal_filter_embed(eig, 1, np.ones((4, 2)))
    with pytest.raises(ValueError):
        ideal_filter_embed(eig, 1, np.full((3, 2), np.inf))


def _random_sbm(rng):
    k = int(rng.integers(2, 6))
    sizes = rng.integers(10, 60, size=k)
    labels = np.repeat(np.arange(k), sizes)
    # diagonally dominant keeps B full rank
    b = rng.uniform(0.01, 0.1, size=(k, k))
    b = (b + b.T) / 2 + np.diag(rng.uniform(0.2, 0.6, size=k))
    return Membership(labels, k), BlockMatrix(np.minimum(b, 1.0))


def test_population_rows_block_constant_and_separated():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        membership, blocks = _random_sbm(rng)
        k = membership.k
        chi = leading(decompose(population_laplacian(build_population(membership, blocks)),
                               method="lapack"), k).vectors
        z = membership.labels
        centers = np.array([chi[z == g][0] for g in range(k)])
        assert np.abs(chi - centers[z]).max() <= 1e-8
        P = membership.largest
        gaps = np.linalg.norm(centers[:, None] - centers[None, :], axis=2)
        off = gaps[~np.eye(k, dtype=bool)]
        assert off.min() >= np.sqrt(2 / P) - 1e-8


@pytest.mark.parametrize("k,s,q,r", [(2, 50, 0.3, 0.1), (4, 64, 0.3, 0.1), (3, 100, 0.5, 0.05)])
def test_eigengap_matches_closed_form(k, s, q, r):
    model = SimplifiedSbm(k, s, q, r)
    eig = decompose(population_laplacian(model.population()), method="lapack")
    assert abs(abs(eig.eigenvalues[k - 1]) - lambda_bar(k, q, r)) <= 2 / model.n


def test_exact_clustering_two_cliques(two_cliques, backend):
    lap = laplacian(two_cliques(10), backend=backend)
    est = spectral_cluster_exact(lap, 2, seed=0)
    truth = Membership(np.repeat([0, 1], 10), 2)
    assert miscluster_permutation(est, truth).count == 0


def test_exact_clustering_single_cluster(k4_graph):
    est = spectral_cluster_exact(laplacian(k4_graph), 1)
    assert np.all(est.labels == 0)
