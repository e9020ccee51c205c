"""Gauss-Newton inversion unit tests: configs, estimates, recovery, errors."""

import json

import numpy as np
import pytest

from spectrace import (
    FourierDamping,
    GNConfig,
    constant_damping_spectrum,
    estimate_alpha0,
    gauss_newton,
    l2_error,
    multistep_schedule,
    trace_jacobian,
)
from spectrace.traces import build_modal_set, tn_matrix_traces


def _crime_target(coeffs, alpha0, j_trunc, n_polys):
    ms = build_modal_set(FourierDamping(coeffs), j_trunc)
    return tn_matrix_traces(ms, alpha0, n_polys)


def test_gnconfig_validation():
    with pytest.raises(ValueError):
        GNConfig(k_meas=10, m_modes=4, j_trunc=50, n_polys=50, k_tail=5)
    with pytest.raises(ValueError):
        GNConfig(k_meas=4, m_modes=4, j_trunc=50, n_polys=50, k_tail=50,
                 step_control="bisection")
    cfg = GNConfig(k_meas=4, m_modes=4, j_trunc=50, n_polys=50, k_tail=50)
    assert cfg.residual_tol == pytest.approx(1e-5 * 50)


def test_alpha0_estimate_constant_damping():
    s = constant_damping_spectrum(1.4, 40)
    assert estimate_alpha0(s, 40) == pytest.approx(1.4, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_alpha0(s, 41)


def test_inverse_crime_recovery_from_perturbed_start():
    truth = np.array([1.2, 0.3, -0.15, 0.05])
    target = _crime_target(truth, 1.2, 60, 50)
    cfg = GNConfig(
        k_meas=10, m_modes=4, j_trunc=60, n_polys=50, k_tail=10, tol=1e-12,
        initial_guess=FourierDamping(truth * 1.1),
    )
    run = gauss_newton(target, cfg)
    assert run.converged
    assert np.max(np.abs(run.final.coeffs - truth)) < 1e-8
    # residual history is monotone under damped steps
    assert np.all(np.diff(run.residual_norms) <= 0.0)


def test_full_step_mode_also_recovers():
    truth = np.array([1.0, 0.2])
    target = _crime_target(truth, 1.0, 40, 30)
    cfg = GNConfig(
        k_meas=5, m_modes=2, j_trunc=40, n_polys=30, k_tail=5, tol=1e-12,
        initial_guess=FourierDamping([1.1, 0.0]), step_control="full_step",
    )
    run = gauss_newton(target, cfg)
    assert np.max(np.abs(run.final.coeffs - truth)) < 1e-8


def test_jacobian_shape_and_first_row():
    a = FourierDamping([1.1, 0.2, -0.1])
    ms = build_modal_set(a, 50)
    jac = trace_jacobian(ms, 1.1, 12)
    assert jac.shape == (12, 3)
    # dT_1/da_m = M_1(e_m), whose traces are known in closed form
    assert jac[0, 0] == pytest.approx(np.trace(ms.basis_mats[0]))
    assert jac[0, 1] == pytest.approx(1.0 / (2.0 * np.pi**2))


def test_multistep_schedule_padding_and_order():
    truth = np.array([1.3, 0.25, -0.1])
    target = _crime_target(truth, 1.3, 60, 40)
    cfg = GNConfig(
        k_meas=8, m_modes=3, j_trunc=60, n_polys=40, k_tail=8, tol=1e-12,
        initial_guess=FourierDamping([1.3]),
    )
    run = multistep_schedule(target, cfg, [1, 2, 3])
    assert np.max(np.abs(run.final.coeffs - truth)) < 1e-8
    with pytest.raises(ValueError):
        multistep_schedule(target, cfg, [3, 2])


def test_l2_error_closed_forms():
    a = FourierDamping([1.0])
    assert l2_error(a, lambda x: np.ones_like(x)) == pytest.approx(0.0, abs=1e-14)
    # int cos^2(2 pi x) dx = 1/2
    b = FourierDamping([1.0, 1.0])
    assert l2_error(b, lambda x: np.ones_like(x)) == pytest.approx(0.5, abs=1e-12)


def test_l2_error_accepts_uniform_samples():
    a = FourierDamping([2.0])
    samples = 2.0 + 0.01 * np.ones(401)
    assert l2_error(a, samples) == pytest.approx(1e-4, rel=1e-6)


def test_run_json_output(tmp_path):
    truth = np.array([1.0, 0.1])
    target = _crime_target(truth, 1.0, 40, 30)
    cfg = GNConfig(
        k_meas=5, m_modes=2, j_trunc=40, n_polys=30, k_tail=5, tol=1e-12,
        initial_guess=FourierDamping([1.05, 0.0]),
    )
    run = gauss_newton(target, cfg)
    path = tmp_path / "run.json"
    run.write_json(path, l2_error_vs_truth=0.25)
    payload = json.loads(path.read_text())
    assert payload["converged"] is True
    assert payload["l2_error_vs_truth"] == pytest.approx(0.25)
    assert len(payload["iterations"]) == len(run.residual_norms)
    assert payload["iterations"][-1]["residual_norm"] <= 1e-12
