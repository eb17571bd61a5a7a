"""Tamed stochastic gradient descent: steps, bound envelopes, and experiments.

The heavy lifting lives in the compiled extension ``tsgd._tsgd``; this package
re-exports it and adds a dict-friendly :func:`run` wrapper.
"""

import json as _json

from ._tsgd import (
    RngStream,
    bounded_envelope_k,
    bounded_gradient_envelope,
    canonicalize_libsvm,
    contraction_constant,
    contraction_envelope_k,
    decay_envelope,
    envelope_k,
    fit_rate_points,
    gamma_sweep,
    harmonic_envelope,
    harmonic_product_bound,
    harmonic_step,
    harmonic_sum_bound,
    load_libsvm_file,
    objective_gap_sandwich,
    parse_libsvm,
    perturbation_decomposition,
    run_experiment,
    sgd_step,
    tangent_line_bound,
    taming_factor,
    tsgd_step,
)

__all__ = [
    "RngStream",
    "bounded_envelope_k",
    "bounded_gradient_envelope",
    "canonicalize_libsvm",
    "contraction_constant",
    "contraction_envelope_k",
    "decay_envelope",
    "envelope_k",
    "fit_rate_points",
    "gamma_sweep",
    "harmonic_envelope",
    "harmonic_product_bound",
    "harmonic_step",
    "harmonic_sum_bound",
    "load_libsvm_file",
    "objective_gap_sandwich",
    "parse_libsvm",
    "perturbation_decomposition",
    "run",
    "run_experiment",
    "sgd_step",
    "tangent_line_bound",
    "taming_factor",
    "tsgd_step",
]

__version__ = "0.1.0"


def run(config):
    """Runs an experiment from a config dict (or JSON string)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return run_experiment(config)
