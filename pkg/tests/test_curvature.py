"""Connection coefficients, curvature tensors, and their identities."""

import numpy as np
import pytest

from geochaos import (
    SingularMetricError,
    christoffel,
    euclidean_metric,
    finite_difference_metric,
    fisher_metric_analytic,
    make_family,
    riemann_ricci_scalar,
    sectional_curvature,
)
from geochaos.manifold import MetricField
from geochaos.models import (
    gaussian_manifold,
    spin_chaotic_manifold,
    spin_integrable_manifold,
)


def random_gaussian_points(l, n, seed):
    rng = np.random.default_rng(seed)
    pts = np.empty((n, 2 * l))
    pts[:, 0::2] = rng.normal(size=(n, l))
    pts[:, 1::2] = rng.uniform(0.3, 3.0, size=(n, l))
    return pts


def test_flat_christoffel_zero():
    flat = euclidean_metric(3)
    np.testing.assert_array_equal(christoffel(flat, [0.4, -1.0, 2.0]), np.zeros((3, 3, 3)))


def test_gaussian_christoffel_closed_form():
    g = fisher_metric_analytic(make_family("gaussian"))
    gamma = christoffel(g, [0.0, 1.0])
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 1] = expected[0, 1, 0] = -1.0
    expected[1, 0, 0] = 0.5
    expected[1, 1, 1] = -1.0
    np.testing.assert_allclose(gamma, expected, atol=1e-14)
    gamma2 = christoffel(g, [0.0, 2.0])
    assert gamma2[0, 0, 1] == pytest.approx(-0.5)
    assert gamma2[1, 0, 0] == pytest.approx(0.25)
    assert gamma2[1, 1, 1] == pytest.approx(-0.5)


def test_christoffel_symmetric_lower_indices():
    metric = spin_chaotic_manifold()
    gamma = christoffel(metric, [1.3, -0.2, 0.8])
    np.testing.assert_allclose(gamma, np.swapaxes(gamma, 1, 2), atol=1e-15)


def test_flat_curvature_zero():
    flat = euclidean_metric(2)
    report = riemann_ricci_scalar(flat, [1.0, 2.0])
    assert report.scalar == 0.0
    np.testing.assert_array_equal(report.riemann, np.zeros((2, 2, 2, 2)))


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_gaussian_scalar_is_minus_l(l):
    metric = gaussian_manifold(l)
    for theta in random_gaussian_points(l, 5, seed=l):
        assert riemann_ricci_scalar(metric, theta).scalar == pytest.approx(
            -float(l), abs=1e-6
        )


def test_finite_difference_provider_scalar():
    metric = gaussian_manifold(2)
    fd = finite_difference_metric(metric)
    for theta in random_gaussian_points(2, 5, seed=42):
        got = riemann_ricci_scalar(fd, theta).scalar
        assert abs(got - (-2.0)) / 2.0 < 1e-3


def _check_riemann_identities(metric, theta, tol):
    report = riemann_ricci_scalar(metric, theta)
    g = metric.value(theta)
    lowered = np.einsum("ml,lnrs->mnrs", g, report.riemann)
    np.testing.assert_allclose(lowered, -np.swapaxes(lowered, 0, 1), atol=tol)
    np.testing.assert_allclose(lowered, -np.swapaxes(lowered, 2, 3), atol=tol)
    bianchi = (
        lowered
        + np.einsum("mrsn->mnrs", lowered)
        + np.einsum("msnr->mnrs", lowered)
    )
    np.testing.assert_allclose(bianchi, np.zeros_like(bianchi), atol=tol)


def test_riemann_identities_analytic():
    for theta in random_gaussian_points(2, 5, seed=3):
        _check_riemann_identities(gaussian_manifold(2), theta, 1e-8)
    _check_riemann_identities(spin_chaotic_manifold(), [1.2, 0.5, 0.9], 1e-8)


def test_riemann_identities_finite_difference():
    fd = finite_difference_metric(gaussian_manifold(1))
    for theta in random_gaussian_points(1, 5, seed=4):
        _check_riemann_identities(fd, theta, 1e-4)


def test_sectional_flat_zero():
    flat = euclidean_metric(3)
    assert sectional_curvature(flat, [0.0, 0.0, 0.0], 0, 1) == 0.0


def test_sectional_gaussian_plane():
    metric = gaussian_manifold(1)
    for theta in random_gaussian_points(1, 4, seed=5):
        assert sectional_curvature(metric, theta, 0, 1) == pytest.approx(-0.5, abs=1e-9)


def test_sectional_cross_block_zero():
    metric = gaussian_manifold(2)
    theta = [0.0, 1.0, 0.5, 2.0]
    assert sectional_curvature(metric, theta, 0, 1) == pytest.approx(-0.5, abs=1e-9)
    assert sectional_curvature(metric, theta, 0, 2) == pytest.approx(0.0, abs=1e-12)


def test_sectional_requires_distinct_axes():
    with pytest.raises(ValueError):
        sectional_curvature(gaussian_manifold(1), [0.0, 1.0], 1, 1)


@pytest.mark.parametrize(
    "metric,sampler",
    [
        (gaussian_manifold(2), lambda rng: random_gaussian_points(2, 1, rng)[0]),
        (
            spin_integrable_manifold(),
            lambda rng: np.random.default_rng(rng).uniform(0.3, 4.0, 2),
        ),
        (
            spin_chaotic_manifold(),
            lambda rng: np.array(
                [
                    np.random.default_rng(rng).uniform(0.3, 4.0),
                    np.random.default_rng(rng + 1).normal(),
                    np.random.default_rng(rng + 2).uniform(0.3, 4.0),
                ]
            ),
        ),
    ],
)
def test_scalar_equals_sum_of_sectionals(metric, sampler):
    for seed in range(8):
        theta = sampler(seed)
        report = riemann_ricci_scalar(metric, theta)
        total = report.sectional.sum()
        assert abs(report.scalar - total) < 1e-6


def test_gaussian_scalar_constant_over_grid():
    metric = gaussian_manifold(1)
    values = [
        riemann_ricci_scalar(metric, [m, s]).scalar
        for m in np.linspace(-3, 3, 10)
        for s in np.linspace(0.3, 4.0, 10)
    ]
    assert max(values) - min(values) < 1e-6


def test_integrable_manifold_is_flat():
    metric = spin_integrable_manifold()
    for mu_a in (0.5, 1.0, 7.0):
        for mu_b in (0.2, 3.0):
            assert abs(riemann_ricci_scalar(metric, [mu_a, mu_b]).scalar) < 1e-8


def test_singular_metric_raises():
    def value(theta):
        return np.array([[1.0, 1.0], [1.0, 1.0]])

    bad = MetricField(
        dim=2,
        value=value,
        derivative=lambda theta: np.zeros((2, 2, 2)),
        second_derivative=lambda theta: np.zeros((2, 2, 2, 2)),
        provider="analytic",
        domain=((-np.inf, np.inf), (-np.inf, np.inf)),
        coord_names=("x", "y"),
    )
    with pytest.raises(SingularMetricError):
        christoffel(bad, [0.0, 0.0])
