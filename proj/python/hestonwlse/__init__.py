"""Weighted least squares drift estimation for the Heston model."""

import json

from ._hestonwlse import (
    AsymptoticsError,
    EstimationError,
    HestonParams,
    PathGrid,
    QuadEstimate,
    SimConfig,
    asymptotic_covariance,
    exponential_integral_e1,
    load_path,
    mle,
    mle_a_known_b,
    mle_b_known_a,
    mle_covariance_limit,
    psi,
    save_path,
    simulate,
    stationary_mean,
    upper_incomplete_gamma,
    validate,
    wlse,
    wlse_a_known_b,
    wlse_b_known_a,
)
from . import _hestonwlse as _core


def run_consistency(params, c, horizons, config=None, n_paths=500, threads=0):
    return json.loads(_core._run_consistency(params, c, list(horizons), config or SimConfig(), n_paths, threads))


def run_clt(params, c, config=None, n_paths=500, threads=0):
    return json.loads(_core._run_clt(params, c, config or SimConfig(), n_paths, threads))


def run_c_sweep(params, c_values, config=None, n_paths=500, threads=0):
    return json.loads(_core._run_c_sweep(params, list(c_values), config or SimConfig(), n_paths, threads))


def run_mle_vs_wlse(params, c, config=None, n_paths=500, threads=0):
    return json.loads(_core._run_mle_vs_wlse(params, c, config or SimConfig(), n_paths, threads))
