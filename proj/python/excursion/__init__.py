"""Rare-event estimation for Gaussian random field excursions."""

from ._core import (
    ConfigurationError,
    ExcursionError,
    FieldModel,
    InvalidLevelError,
    NoHitError,
    ReplicateFailureError,
    choose_m,
    cluster_scale,
    cosine_grid_truth,
    cosine_truth,
    cov_matrix,
    crude_grid_mc,
    estimate,
    expected_excursion_measure,
    gamma_level,
    gaussian_tail,
    log_gaussian_tail,
    make_field,
    normalizing_integral,
    pickands_estimate,
    run_pickands,
    run_table,
)

__all__ = [
    "ConfigurationError",
    "ExcursionError",
    "FieldModel",
    "InvalidLevelError",
    "NoHitError",
    "ReplicateFailureError",
    "choose_m",
    "cluster_scale",
    "cosine_grid_truth",
    "cosine_truth",
    "cov_matrix",
    "crude_grid_mc",
    "estimate",
    "expected_excursion_measure",
    "gamma_level",
    "gaussian_tail",
    "log_gaussian_tail",
    "make_field",
    "normalizing_integral",
    "pickands_estimate",
    "run_pickands",
    "run_table",
]
