"""Spectral clustering of stochastic block models through polynomial graph
filtering of random signals."""
from ._backend import BACKEND
from .clustering import KMeansResult, kmeans, kmeans_certified, to_membership
from .eig import (DecompositionForbidden, EigenSystem, LeadingEigenvectors, decompose,
                  forbid_decomposition, ideal_filter_embed, leading, spectral_cluster_exact)
from .embed import (EmbeddingMatrix, JlParams, NonConvergent, RandomSignals,
                    choose_dimension, default_embed_dim, draw_signals, estimate_lambda_k,
                    exact_embed, norm_bounds, norm_bounds_check, population_embed)
from .graph import (DenseLimitExceeded, IsolatedVertex, NormalizedLaplacian, SparseGraph,
                    SparsityStats, laplacian, matvec, population_laplacian, read_edgelist,
                    tau, tau_realized, write_edgelist)
from .harness import (TrialConfig, TrialRecord, run_compressive, run_exact, sweep_n,
                      sweep_poly)
from .metrics import (BoundReport, MisclusterReport, ProcrustesAlignment, bound_report,
                      eq9_bound, error_chain, lambda_bar, miscluster_distance,
                      miscluster_permutation, procrustes, simplified_quantities)
from .polyfilter import (FilterError, PolyFilter, design, evaluate, fast_filter,
                         filter_error, grid_error)
from .sbm import (BlockMatrix, Membership, PopulationAdjacency, SimplifiedSbm,
                  build_population, sample_adjacency)

__version__ = "0.1.0"

__all__ = ["BACKEND", "KMeansResult", "kmeans", "kmeans_certified", "to_membership",
    "DecompositionForbidden", "EigenSystem", "LeadingEigenvectors", "decompose",
    "forbid_decomposition", "ideal_filter_embed", "leading", "spectral_cluster_exact",
    "EmbeddingMatrix", "JlParams", "NonConvergent", "RandomSignals", "choose_dimension",
    "default_embed_dim", "draw_signals", "estimate_lambda_k", "exact_embed", "norm_bounds",
    "norm_bounds_check", "population_embed", "DenseLimitExceeded", "IsolatedVertex",
    "NormalizedLaplacian", "SparseGraph", "SparsityStats", "laplacian", "matvec",
    "population_laplacian", "read_edgelist", "tau", "tau_realized", "write_edgelist",
    "TrialConfig", "TrialRecord", "run_compressive", "run_exact", "sweep_n", "sweep_poly",
    "BoundReport", "MisclusterReport", "ProcrustesAlignment", "bound_report", "eq9_bound",
    "error_chain", "lambda_bar", "miscluster_distance", "miscluster_permutation",
    "procrustes", "simplified_quantities", "FilterError", "PolyFilter", "design", "evaluate",
    "fast_filter", "filter_error", "grid_error", "BlockMatrix", "Membership",
    "PopulationAdjacency", "SimplifiedSbm", "build_population", "sample_adjacency"]
