import math

import numpy as np
import pytest

import hestonwlse as hw


def test_params_and_validation():
    p = hw.HestonParams(a=1.0, b=-2.0, alpha=0.0, beta=-0.5, rho=-0.7)
    assert hw.stationary_mean(p) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        hw.validate(hw.HestonParams(a=1.0, b=2.0))
    with pytest.raises(ValueError):
        hw.validate(hw.HestonParams(rho=1.0))


def test_special_functions():
    assert hw.exponential_integral_e1(1.0) == pytest.approx(0.21938393439552029, rel=1e-12)
    assert hw.upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_simulate_and_estimate():
    p = hw.HestonParams()
    path = hw.simulate(p, hw.SimConfig(dt=0.01, t_end=50.0, seed=7))
    assert len(path) == 5001
    assert isinstance(path.x, np.ndarray) and path.x.shape == (5001,)
    assert np.all(path.x >= 0.0)
    e = hw.wlse(path, 1.0)
    assert abs(e.a_hat - p.a) < 1.5 and abs(e.b_hat - p.b) < 3.0
    gram = np.asarray(e.gram)
    assert gram.shape == (2, 2)
    np.testing.assert_allclose(gram @ [e.a_hat, e.b_hat], e.u, rtol=1e-10)
    assert hw.wlse_b_known_a(path, 1.0, p.a) == pytest.approx(
        (e.u[1] - p.a * gram[0, 1]) / gram[1, 1], rel=1e-12)


def test_simulation_is_reproducible():
    cfg = hw.SimConfig(dt=0.01, t_end=5.0, seed=3)
    x1 = hw.simulate(hw.HestonParams(), cfg, 4).x
    x2 = hw.simulate(hw.HestonParams(), cfg, 4).x
    np.testing.assert_array_equal(x1, x2)


def test_mle_zero_hit():
    path = hw.PathGrid(0.1, 0.3, [0.5, 0.0, 0.2, 0.3], [0.0, 0.1, 0.0, 0.1])
    with pytest.raises(hw.EstimationError, match="ZeroHit"):
        hw.mle(path)


def test_asymptotics():
    p = hw.HestonParams()
    psi_c, phi_c = hw.psi(p, 1.0)
    assert psi_c > 0.0 and phi_c > 0.0
    cov = hw.asymptotic_covariance(p, 1.0)
    ala = np.asarray(cov["ALA"])
    assert ala.shape == (2, 2)
    np.testing.assert_allclose(ala, ala.T, rtol=1e-12)
    assert np.all(np.linalg.eigvalsh(ala) > 0.0)
    with pytest.raises(hw.AsymptoticsError):
        hw.mle_covariance_limit(p)
    q = hw.HestonParams(a=3.0)
    near_mle = np.asarray(hw.asymptotic_covariance(q, 1e-8)["ALA"])
    np.testing.assert_allclose(near_mle, np.asarray(hw.mle_covariance_limit(q)), rtol=1e-3)
    assert np.asarray(cov["Lambda"]).shape == (4, 4)


def test_monte_carlo_report():
    cfg = hw.SimConfig(dt=0.02, t_end=20.0, seed=11)
    r1 = hw.run_clt(hw.HestonParams(), 1.0, cfg, n_paths=16, threads=1)
    r2 = hw.run_clt(hw.HestonParams(), 1.0, cfg, n_paths=16, threads=3)
    assert r1 == r2
    assert r1["n_paths"] == 16
    sweep = hw.run_c_sweep(hw.HestonParams(), [0.1, 1.0], cfg, n_paths=8)
    assert len(sweep["records"]) == 2
