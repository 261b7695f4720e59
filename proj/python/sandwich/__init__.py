"""Data augmentation and sandwich Markov chains on finite and mixture models."""

from ._sandwich import (
    ConvergenceError,
    DegeneratePointError,
    NonErgodicError,
    closed_form_eigenvalues,
    dominant_eigenvalue,
    eigenvalue_curve,
    example_dataset,
    fs_matrix,
    mda_matrix,
    orbit_size,
    permute,
    posterior,
    r_matrix,
    simulate_bernoulli,
    sojourn,
    spectrum,
    stationary,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DegeneratePointError",
    "NonErgodicError",
    "closed_form_eigenvalues",
    "dominant_eigenvalue",
    "eigenvalue_curve",
    "example_dataset",
    "fs_matrix",
    "mda_matrix",
    "orbit_size",
    "permute",
    "posterior",
    "r_matrix",
    "simulate_bernoulli",
    "sojourn",
    "spectrum",
    "stationary",
    "verify",
]
