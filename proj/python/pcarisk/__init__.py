"""Excess risk of PCA: exact risk metrics, bounds and Monte Carlo experiments."""

from ._pcarisk import (
    BoundConstants,
    CovModel,
    EigenSolverError,
    ExperimentConfig,
    Realization,
    __version__,
    asymptotic_experiment,
    bounds,
    deviation_frequency_experiment,
    draw_samples,
    draw_wishart_covariance,
    empirical_covariance,
    estimator_names,
    figure1_sweep,
    ks_statistic,
    left_deviation_bound,
    limit_law_draws,
    limit_law_mean,
    oracle_ratio_grid,
    right_deviation_bound,
    run_replications,
    spiked_bounds,
    sym_eig,
)


def realization(model, n, d, seed=0, stream=0):
    """Draw n Gaussian rows from model and wrap the resulting Sigma_hat."""
    return Realization(model, empirical_covariance(draw_samples(model, n, seed, stream)), d)


__all__ = [name for name in dir() if not name.startswith("_")]
