"""Geodesic integration, deviation fields, and exponential-rate fits."""

import numpy as np
import pytest

from geochaos import (
    DomainExitError,
    FitError,
    euclidean_metric,
    fisher_metric_analytic,
    fit_exponential_rate,
    integrate_geodesic,
    integrate_jacobi,
    make_family,
    orthogonal_unit_deviation,
)
from geochaos.models import gaussian_manifold, spin_chaotic_manifold, spin_integrable_manifold

GAUSS = fisher_metric_analytic(make_family("gaussian"))


def test_straight_line_geodesic():
    flat = euclidean_metric(2)
    traj = integrate_geodesic(flat, [0.0, 0.0], [1.0, 2.0], 3.0, tol=1e-10)
    np.testing.assert_allclose(traj.theta[-1], [3.0, 6.0], atol=1e-9)
    assert np.all(np.diff(traj.tau) > 0)


def test_sigma_expansion_closed_form():
    traj = integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, 0.5], 2.0, tol=1e-10)
    assert traj.theta[-1, 0] == pytest.approx(0.0, abs=1e-12)
    assert traj.theta[-1, 1] == pytest.approx(np.e, rel=1e-9)


def test_sigma_expansion_tight_tolerance():
    traj = integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, 0.5], 5.0, tol=1e-12)
    assert abs(traj.theta[-1, 1] - np.exp(2.5)) / np.exp(2.5) < 1e-8


@pytest.mark.parametrize(
    "metric,theta0,v0,tau_max",
    [
        (gaussian_manifold(1), [0.0, 1.0], [0.0, 0.5], 30.0),
        (gaussian_manifold(3), [0.0, 1.0] * 3, [0.0, 0.5] * 3, 30.0),
        (spin_integrable_manifold(), [1.0, 1.0], [0.5, 0.5], 50.0),
        (spin_chaotic_manifold(), [1.0, 0.0, 1.0], [0.0, 0.0, 0.5], 40.0),
    ],
)
def test_speed_conservation(metric, theta0, v0, tau_max):
    traj = integrate_geodesic(metric, theta0, v0, tau_max, tol=1e-9)
    assert traj.speed_drift() < 1e-6
    for k, (lo, hi) in enumerate(metric.domain):
        assert np.all(traj.theta[:, k] > lo)
        assert np.all(traj.theta[:, k] < hi)


def test_reversibility():
    tol = 1e-9
    traj = integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, 0.5], 10.0, tol=tol)
    back = integrate_geodesic(
        GAUSS, traj.theta[-1], -traj.theta_dot[-1], 10.0, tol=tol
    )
    assert np.linalg.norm(back.theta[-1] - np.array([0.0, 1.0])) < 100 * tol


def test_tolerance_bounds_enforced():
    with pytest.raises(ValueError):
        integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, 0.5], 1.0, tol=1e-2)


def test_error_shrinks_with_tolerance():
    exact = np.exp(2.5)
    errors = []
    for tol in (1e-4, 1e-6, 1e-8, 1e-10):
        traj = integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, 0.5], 5.0, tol=tol)
        errors.append(abs(traj.theta[-1, 1] - exact) / exact)
    assert all(a > b for a, b in zip(errors, errors[1:]))
    # proportional step control of the embedded 5(4) pair: error tracks tol
    slope = np.polyfit(np.log([1e-4, 1e-6, 1e-8, 1e-10]), np.log(errors), 1)[0]
    assert 0.5 < slope < 1.3
    assert errors[-1] < 1e-8


def test_domain_exit_on_contraction():
    with pytest.raises(DomainExitError) as excinfo:
        integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, -0.5], 200.0, tol=1e-9)
    # sigma = exp(-tau/2) meets the 2e-12 boundary guard near tau = 53.9
    assert excinfo.value.tau == pytest.approx(53.88, abs=0.5)
    assert excinfo.value.state[1] == pytest.approx(2e-12, rel=1e-3)


def test_jacobi_flat_linear_growth():
    flat = euclidean_metric(2)
    traj = integrate_geodesic(flat, [0.0, 0.0], [1.0, 0.0], 10.0, tol=1e-10)
    jac = integrate_jacobi(flat, traj, [0.0, 0.0], [0.0, 1.0])
    np.testing.assert_allclose(jac.intensity, traj.tau, atol=1e-8)


def test_jacobi_constant_curvature_closed_form():
    c = 1.0 / np.sqrt(2.0)  # unit-speed sigma geodesic
    traj = integrate_geodesic(GAUSS, [0.0, 1.0], [0.0, c], 10.0, tol=1e-9)
    assert traj.speed[0] == pytest.approx(1.0, rel=1e-12)
    j_dot0 = orthogonal_unit_deviation(GAUSS, [0.0, 1.0], [0.0, c], [1.0, 0.0])
    jac = integrate_jacobi(GAUSS, traj, np.zeros(2), j_dot0)
    exact = np.sqrt(2.0) * np.sinh(traj.tau / np.sqrt(2.0))
    np.testing.assert_allclose(jac.intensity, exact, rtol=1e-4, atol=1e-8)
    assert jac.intensity[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(jac.intensity >= 0)
    np.testing.assert_array_equal(jac.tau, traj.tau)


def test_jacobi_matches_perturbed_geodesics():
    metric = gaussian_manifold(2)
    theta0 = np.array([0.0, 1.0, 0.2, 1.5])
    v0 = np.array([0.1, 0.45, -0.05, 0.5])
    traj = integrate_geodesic(metric, theta0, v0, 5.0, tol=1e-10, n_samples=201)
    j_dot0 = orthogonal_unit_deviation(metric, theta0, v0, [0.3, -0.2, 0.8, 0.1])
    jac = integrate_jacobi(metric, traj, np.zeros(4), j_dot0)
    eps = 1e-6
    bumped = integrate_geodesic(
        metric, theta0, v0 + eps * j_dot0, 5.0, tol=1e-10, n_samples=201
    )
    diff = bumped.theta - traj.theta
    g = metric.value(traj.theta)
    norm = np.sqrt(np.einsum("imn,im,in->i", g, diff, diff)) / eps
    rel = np.abs(norm[1:] - jac.intensity[1:]) / jac.intensity[1:]
    assert rel.max() < 1e-2


def test_jacobi_rate_positive_on_gaussian_manifold():
    metric = gaussian_manifold(2)
    theta0 = np.array([0.0, 1.0, 0.0, 1.0])
    v0 = np.array([0.0, 0.5, 0.0, 0.5])
    traj = integrate_geodesic(metric, theta0, v0, 25.0, tol=1e-9)
    j_dot0 = orthogonal_unit_deviation(
        metric, theta0, v0, [1.0, 0.0, 1.0, 0.0], per_factor=True
    )
    jac = integrate_jacobi(metric, traj, np.zeros(4), j_dot0)
    rate, _, residual = fit_exponential_rate(jac.tau, jac.intensity)
    assert rate > 0
    assert rate == pytest.approx(0.5, rel=0.02)
    assert residual < 1e-4


def test_fit_exact_exponential():
    tau = np.linspace(0.0, 10.0, 400)
    rate, amplitude, residual = fit_exponential_rate(tau, np.exp(2.0 * tau))
    assert rate == pytest.approx(2.0, abs=1e-10)
    assert amplitude == pytest.approx(1.0, rel=1e-9)
    assert residual < 1e-12


def test_fit_sinh_tail():
    tau = np.linspace(5.0, 20.0, 600)
    y = np.sqrt(2.0) * np.sinh(tau / np.sqrt(2.0))
    rate, _, _ = fit_exponential_rate(tau, y)
    assert rate == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-3)


def test_fit_flags_non_exponential_series():
    tau = np.linspace(1.0, 10.0, 200)
    rate_full, _, residual_full = fit_exponential_rate(tau, 3.0 * tau + 1.0, window=1.0)
    rate_tail, _, _ = fit_exponential_rate(tau, 3.0 * tau + 1.0, window=0.25)
    assert residual_full > 0.01  # log-linear fit is visibly poor
    assert rate_tail < rate_full  # apparent rate decays with the window


def test_fit_rejects_nonpositive_values():
    tau = np.linspace(0.0, 1.0, 50)
    with pytest.raises(FitError):
        fit_exponential_rate(tau, np.linspace(-1.0, 1.0, 50))
