"""Graph Matern SPDE toolkit: graph Gaussian random fields, Phi-Wiener
processes, the SISPDE neural model, and OOD evaluation metrics."""

from ._core import (
    ChebKernel,
    Graph,
    Model,
    SpectralBasis,
    cheb_error_bound,
    chebyshev_apply,
    chebyshev_fit,
    cholesky,
    edge_homophily,
    eigendecompose,
    empirical_covariance,
    label_informativeness,
    lambda_max_bound,
    laplacian,
    load_dataset,
    matern_kernel,
    ood_metrics,
    rbf_kernel,
    rewire_by_covariance,
    rewire_report,
    sample_grf,
    save_dataset,
    sbm_block_labels,
    sbm_generate,
    simulate_phi_wiener,
    train_model,
)

__all__ = [
    "ChebKernel",
    "Graph",
    "Model",
    "SpectralBasis",
    "cheb_error_bound",
    "chebyshev_apply",
    "chebyshev_fit",
    "cholesky",
    "edge_homophily",
    "eigendecompose",
    "empirical_covariance",
    "label_informativeness",
    "lambda_max_bound",
    "laplacian",
    "load_dataset",
    "matern_kernel",
    "ood_metrics",
    "rbf_kernel",
    "rewire_by_covariance",
    "rewire_report",
    "sample_grf",
    "save_dataset",
    "sbm_block_labels",
    "sbm_generate",
    "simulate_phi_wiener",
    "train_model",
]

__version__ = "0.1.0"
