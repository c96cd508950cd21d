"""Spectral statistics of the 1D Anderson-Bernoulli model."""

import json

from ._anderson_spectra import (
    Error,
    InvalidArgument,
    NumericalFailure,
    __version__,
    eigenvalues,
    log_norm,
    lyapunov_exponent,
    run_experiment as _run_experiment,
    sample_potential,
    seed_for_trial,
    sturm_count,
    validate_coupling,
)


def run_experiment(experiment, config, threads=1):
    """Run an experiment from a config dict. Returns (summary dict, CSV text)."""
    summary, csv = _run_experiment(experiment, json.dumps(config), threads)
    return json.loads(summary), csv


__all__ = [
    "Error",
    "InvalidArgument",
    "NumericalFailure",
    "__version__",
    "eigenvalues",
    "log_norm",
    "lyapunov_exponent",
    "run_experiment",
    "sample_potential",
    "seed_for_trial",
    "sturm_count",
    "validate_coupling",
]
