"""Swept regions, statistical volumes, and growth classification."""

import numpy as np
import pytest

from geochaos import (
    classify_growth,
    euclidean_metric,
    fisher_metric_analytic,
    ige_series,
    integrate_geodesic,
    make_family,
    region_volume,
    statistical_volume,
    swept_region,
)
from geochaos.models import gaussian_manifold, spin_integrable_manifold

GAUSS = fisher_metric_analytic(make_family("gaussian"))


def flat_diagonal_trajectory(tau_max=3.0, n=2001):
    flat = euclidean_metric(2)
    return flat, integrate_geodesic(
        flat, [0.0, 0.0], [1.0, 1.0], tau_max, tol=1e-10, n_samples=n
    )


def sigma_expansion_trajectory(c=0.5, tau_max=30.0, n=1501):
    return integrate_geodesic(
        GAUSS, [0.0, 1.0], [0.0, c], tau_max, tol=1e-10, n_samples=n
    )


def test_swept_region_flat_diagonal():
    _, traj = flat_diagonal_trajectory()
    box = swept_region(traj, 2.0, floor=1e-12)
    np.testing.assert_allclose(box.lower, [0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(box.upper, [2.0, 2.0], rtol=1e-9)


def test_swept_region_sigma_geodesic():
    traj = sigma_expansion_trajectory()
    box = swept_region(traj, 20.0, floor=1e-3, metric=GAUSS)
    assert box.lower[1] == pytest.approx(1.0, rel=1e-9)
    assert box.upper[1] == pytest.approx(np.exp(10.0), rel=1e-6)
    # frozen mu direction gets its floor width, proper at the current point
    width = box.upper[0] - box.lower[0]
    assert width == pytest.approx(1e-3 * np.exp(10.0), rel=1e-6)
    assert box.lower[0] == pytest.approx(-width / 2.0, rel=1e-6)


def test_swept_region_initial_time_all_floored():
    traj = sigma_expansion_trajectory()
    box = swept_region(traj, traj.tau[0], floor=1e-3)
    np.testing.assert_allclose(box.widths(), [1e-3, 2e-3], rtol=1e-12)


def test_swept_region_range_checked():
    traj = sigma_expansion_trajectory()
    with pytest.raises(ValueError):
        swept_region(traj, 31.0, floor=1e-3)
    with pytest.raises(ValueError):
        swept_region(traj, 1.0, floor=-1.0)


def test_region_volume_matches_closed_form():
    traj = sigma_expansion_trajectory()
    floor = 1e-3
    for tau_prime in (5.0, 10.0, 20.0):
        box = swept_region(traj, tau_prime, floor, metric=GAUSS)
        got = region_volume(GAUSS, box)
        sigma = np.exp(0.5 * tau_prime)
        want = floor * sigma * np.sqrt(2.0) * (1.0 - 1.0 / sigma)
        assert abs(got - want) / want < 1e-8


def test_statistical_volume_flat_closed_form():
    flat, traj = flat_diagonal_trajectory()
    assert statistical_volume(flat, traj, 3.0, floor=1e-12) == pytest.approx(
        3.0, rel=1e-5
    )
    assert statistical_volume(flat, traj, 1.5, floor=1e-12) == pytest.approx(
        1.5**2 / 3.0, rel=1e-5
    )


def test_statistical_volume_integrable_closed_form():
    metric = spin_integrable_manifold()
    a, b = 0.5, 0.5
    traj = integrate_geodesic(
        metric, [1.0, 1.0], [a, b], 50.0, tol=1e-10, n_samples=2001
    )
    want = a * b * 50.0**2 / 3.0
    got = statistical_volume(metric, traj, 50.0)
    assert abs(got - want) / want < 1e-6
    # geodesics of the log-flat metric are exact exponentials
    np.testing.assert_allclose(traj.theta[:, 0], np.exp(a * traj.tau), rtol=1e-7)


def test_statistical_volume_range_checked():
    flat, traj = flat_diagonal_trajectory()
    with pytest.raises(ValueError):
        statistical_volume(flat, traj, 4.0)


def test_volume_monotone_for_expanding_sweeps():
    traj = sigma_expansion_trajectory()
    series = ige_series(GAUSS, traj)
    assert np.all(np.diff(series.volume) > -1e-12)
    assert np.all(series.volume > 0)
    np.testing.assert_allclose(series.ige, np.log(series.volume), rtol=1e-14)
    assert np.all(np.diff(series.tau) > 0)
    assert series.tau[0] >= 0.1


def test_ige_series_gaussian_linear_growth():
    traj = sigma_expansion_trajectory(n=601)
    series = ige_series(GAUSS, traj)
    assert series.growth.law == "linear"
    assert series.growth.coefficient == pytest.approx(0.5, abs=0.06)


def test_floor_change_shifts_entropy_additively():
    traj = sigma_expansion_trajectory(n=601)
    s1 = ige_series(GAUSS, traj, floor=1e-3)
    s2 = ige_series(GAUSS, traj, floor=1e-2)
    assert s1.growth.law == s2.growth.law == "linear"
    rel = abs(s2.growth.coefficient - s1.growth.coefficient) / s1.growth.coefficient
    assert rel < 0.02
    shift = s2.ige - s1.ige
    tail = shift[series_tail_start(s1.tau) :]
    np.testing.assert_allclose(tail, np.log(10.0), atol=1e-6)


def series_tail_start(tau):
    return int(np.searchsorted(tau, tau[-1] - 0.5 * (tau[-1] - tau[0])))


def test_ige_series_custom_grid_validation():
    traj = sigma_expansion_trajectory(n=601)
    with pytest.raises(ValueError):
        ige_series(GAUSS, traj, tau_grid=[0.5, 0.4, 1.0])
    with pytest.raises(ValueError):
        ige_series(GAUSS, traj, tau_grid=[0.01, 1.0])


def test_classify_linear():
    tau = np.linspace(1.0, 20.0, 120)
    cls = classify_growth(tau, 3.0 * tau + 1.0)
    assert cls.law == "linear"
    assert cls.coefficient == pytest.approx(3.0, abs=1e-10)
    assert cls.residual_linear < 1e-10


def test_classify_logarithmic():
    tau = np.linspace(2.0, 50.0, 200)
    cls = classify_growth(tau, 2.0 * np.log(tau) + 5.0)
    assert cls.law == "logarithmic"
    assert cls.coefficient == pytest.approx(2.0, abs=1e-10)


def test_classify_power_law_is_not_confidently_linear():
    tau = np.linspace(1.0, 20.0, 200)
    cls = classify_growth(tau, np.sqrt(tau))
    assert cls.law != "linear"


def test_classify_needs_enough_samples():
    tau = np.linspace(2.0, 20.0, 12)
    with pytest.raises(ValueError):
        classify_growth(tau, tau.copy())
    tau = np.linspace(0.2, 1.5, 100)
    with pytest.raises(ValueError):
        classify_growth(tau, tau.copy())
