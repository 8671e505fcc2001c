"""Weighted matrix completion under deterministic, non-uniform sampling.

Debiased projection estimators, computable certification parameters
(lambda, mu, spectral gaps), sampling-pattern generators, ratings
ingestion, and a reproducible experiment harness.
"""

from .diagnostics import (
    DiagnosticsReport,
    PluginBounds,
    best_rank1_weight,
    compute_lambda,
    compute_mu,
    diagnose,
    plugin_bounds,
    unweighted_error,
    weighted_error,
)
from .estimators import (
    Estimate,
    EstimatorConfig,
    debiased_maxnorm_projection,
    debiased_rank_projection,
    proportional_sampling_recovery,
    standard_rank_projection,
)
from .linalg import (
    FactoredVectorPair,
    SvdTriple,
    WeightMatrix,
    gaussian_matrix,
    hadamard,
    hadamard_power,
    operator_norm,
    rng_from,
    top_two_eigenpairs,
    truncated_svd,
)
from .patterns import (
    GraphSpec,
    IngestResult,
    SamplePattern,
    WeightFamilySpec,
    circulant_band,
    circulant_regular,
    ingest_ratings,
    random_regular,
    sample_bernoulli,
    spiky_weight,
    tensor_product,
)

__version__ = "0.1.0"

__all__ = [
    "DiagnosticsReport", "PluginBounds", "best_rank1_weight", "compute_lambda",
    "compute_mu", "diagnose", "plugin_bounds", "unweighted_error", "weighted_error",
    "Estimate", "EstimatorConfig", "debiased_maxnorm_projection",
    "debiased_rank_projection", "proportional_sampling_recovery",
    "standard_rank_projection",
    "FactoredVectorPair", "SvdTriple", "WeightMatrix", "gaussian_matrix",
    "hadamard", "hadamard_power", "operator_norm", "rng_from",
    "top_two_eigenpairs", "truncated_svd",
    "GraphSpec", "IngestResult", "SamplePattern", "WeightFamilySpec",
    "circulant_band", "circulant_regular", "ingest_ratings", "random_regular",
    "sample_bernoulli", "spiky_weight", "tensor_product",
]
