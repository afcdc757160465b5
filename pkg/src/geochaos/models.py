"""The packaged case-study experiments.

Four configured experiments, each a pure function of (parameters, seed):

* ``gaussian_ed_experiment``: product of Gaussian factors, exponentially
  expanding sigma geodesics; constant negative scalar curvature, exponential
  deviation growth, linear entropy growth proportional to the number of
  factors.
* ``iho_experiment``: ensemble of inverted harmonic oscillators obtained by
  reparametrizing geodesics of a conformally flat metric; the entropy slope
  matches the summed frequency spectrum.
* ``spin_chain_integrable_experiment``: level-spacing manifold of a
  Poissonian spectrum coupled to an exponential bath; flat, logarithmic
  entropy growth.
* ``spin_chain_chaotic_experiment``: Wigner-Dyson spacing coupled to a
  Gaussian bath; negatively curved block, linear entropy growth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import entropy
from .curvature import riemann_ricci_scalar
from .dynamics import (
    GeodesicTrajectory,
    fit_exponential_rate,
    integrate_geodesic,
    integrate_jacobi,
    orthogonal_unit_deviation,
)
from .errors import ConfigError
from .manifold import (
    MetricField,
    euclidean_metric,
    fisher_metric_analytic,
    make_family,
    product_manifold,
)

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def member_seed(seed, k):
    """Counter-derived per-member seed: seed XOR (k * golden-ratio word)."""
    return (int(seed) ^ ((k * _GOLDEN) & _MASK64)) & _MASK64


def member_rng(seed, k):
    return np.random.Generator(np.random.Philox(key=member_seed(seed, k)))


@dataclass(frozen=True)
class ExperimentReport:
    """Everything an experiment produces, ready for CSV/JSON export."""

    model: str
    config: dict
    scalar_curvature: float | None
    trajectory: GeodesicTrajectory
    ige: entropy.IGESeries
    jacobi: object = None  # JacobiSeries | None
    jacobi_fit: dict | None = None
    ensemble: dict | None = None

    def summary(self):
        out = {
            "model": self.model,
            "config": self.config,
            "scalar_curvature": self.scalar_curvature,
            "ige": self.ige.growth.to_dict(),
            "jacobi": self.jacobi_fit,
            "speed_drift": self.trajectory.speed_drift(),
            "ensemble": self.ensemble,
        }
        return out


# ---------------------------------------------------------------------------
# manifold builders
# ---------------------------------------------------------------------------


def gaussian_manifold(l):
    return product_manifold(
        [fisher_metric_analytic(make_family("gaussian")) for _ in range(l)]
    )


def spin_integrable_manifold():
    return product_manifold(
        [
            fisher_metric_analytic(make_family("poisson_spacing")),
            fisher_metric_analytic(make_family("exponential")),
        ]
    )


def spin_chaotic_manifold():
    return product_manifold(
        [
            fisher_metric_analytic(make_family("wigner_dyson")),
            fisher_metric_analytic(make_family("gaussian")),
        ]
    )


def conformal_oscillator_metric(omegas):
    """Conformally flat metric (1 + sum omega_k^2 theta_k^2 / 2) * identity."""
    om = np.asarray(omegas, dtype=float)
    dim = om.size

    def conformal(theta):
        theta = np.asarray(theta, dtype=float)
        return 1.0 + 0.5 * np.sum(om**2 * theta**2, axis=-1)

    def value(theta):
        theta = np.asarray(theta, dtype=float)
        a = conformal(theta)
        out = np.zeros(theta.shape[:-1] + (dim, dim))
        idx = np.arange(dim)
        out[..., idx, idx] = a[..., None]
        return out

    def derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((dim, dim, dim))
        idx = np.arange(dim)
        out[:, idx, idx] = (om**2 * theta)[:, None]
        return out

    def second_derivative(theta):
        out = np.zeros((dim, dim, dim, dim))
        idx = np.arange(dim)
        for r in range(dim):
            out[r, r, idx, idx] = om[r] ** 2
        return out

    return MetricField(
        dim=dim,
        value=value,
        derivative=derivative,
        second_derivative=second_derivative,
        provider="analytic",
        domain=tuple((-np.inf, np.inf) for _ in range(dim)),
        coord_names=tuple(f"theta_{k + 1}" for k in range(dim)),
    )


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def gaussian_ed_experiment(
    l,
    c,
    tau_max=30.0,
    tol=1e-9,
    *,
    mu0=0.0,
    sigma0=1.0,
    tau_grid_points=601,
    floor=1e-3,
    tau_min=0.1,
    window=0.5,
    seed=0,
):
    """Gaussian product manifold driven by per-factor sigma expansion.

    Each factor starts at (mu0, sigma0) with velocity (0, c * sigma0), so
    sigma_k(tau) = sigma0 * exp(c * tau).  Negative c contracts toward the
    sigma -> 0 boundary and ends in a domain-exit error; that path is kept
    for boundary diagnostics.
    """
    if not 1 <= int(l) <= 4:
        raise ConfigError("l", "must be an integer in [1, 4]")
    if c == 0 or abs(c) > 2.0:
        raise ConfigError("c", "must be nonzero with |c| <= 2")
    if sigma0 <= 0:
        raise ConfigError("sigma0", "must be > 0")
    l = int(l)
    metric = gaussian_manifold(l)
    theta0 = np.tile([mu0, sigma0], l)
    v0 = np.tile([0.0, c * sigma0], l)
    n_samples = max(int(tau_grid_points), 201)
    trajectory = integrate_geodesic(
        metric, theta0, v0, tau_max, tol=tol, n_samples=n_samples
    )
    scalar = riemann_ricci_scalar(metric, theta0).scalar

    direction = np.tile([1.0, 0.0], l)
    j_dot0 = orthogonal_unit_deviation(metric, theta0, v0, direction, per_factor=True)
    jacobi = integrate_jacobi(metric, trajectory, np.zeros(2 * l), j_dot0)
    rate, amplitude, residual = fit_exponential_rate(
        jacobi.tau, jacobi.intensity, window=window
    )
    ige = entropy.ige_series(
        metric, trajectory, tau_min=tau_min, floor=floor, window=window
    )
    config = {
        "l": l,
        "c": c,
        "mu0": mu0,
        "sigma0": sigma0,
        "tau_max": tau_max,
        "tol": tol,
        "tau_grid_points": n_samples,
        "floor": floor,
        "tau_min": tau_min,
        "window": window,
        "seed": int(seed),
    }
    return ExperimentReport(
        model="gaussian_ed",
        config=config,
        scalar_curvature=scalar,
        trajectory=trajectory,
        ige=ige,
        jacobi=jacobi,
        jacobi_fit={"rate": rate, "amplitude": amplitude, "residual": residual},
    )


def oscillator_flow(omegas, theta0, tau_max, tol=1e-9, n_samples=801):
    """Evolve theta_k'' = omega_k^2 theta_k from rest at theta0.

    Returns the flow as a trajectory in the reparametrized flat frame; the
    ``speed`` column is the flat |theta_dot|^2 of the oscillator flow (it is
    not a conserved geodesic speed).
    """
    om = np.asarray(omegas, dtype=float)
    dim = om.size
    th0 = np.full(dim, float(theta0))

    def rhs(t, y):
        return np.concatenate([y[dim:], om**2 * y[:dim]])

    sol = solve_ivp(
        rhs,
        (0.0, tau_max),
        np.concatenate([th0, np.zeros(dim)]),
        method="RK45",
        rtol=tol,
        atol=tol * 1e-3,
        dense_output=True,
    )
    grid = np.linspace(0.0, tau_max, n_samples)
    ys = sol.sol(grid).T
    theta = ys[:, :dim]
    theta_dot = ys[:, dim:]
    return GeodesicTrajectory(
        tau=grid,
        theta=theta,
        theta_dot=theta_dot,
        speed=np.einsum("ij,ij->i", theta_dot, theta_dot),
        tol=tol,
    )


def _draw_frequencies(rng, l, omega_mean, omega_std):
    omegas = np.empty(l)
    for k in range(l):
        value = rng.normal(omega_mean, omega_std)
        tries = 0
        while value <= 0.0:
            tries += 1
            if tries > 100:
                raise ConfigError(
                    "omega_mean", "could not draw a positive frequency in 100 tries"
                )
            value = rng.normal(omega_mean, omega_std)
        omegas[k] = value
    return omegas


def iho_experiment(
    l,
    omega_mean=1.0,
    omega_std=0.0,
    members=1,
    seed=0,
    tau_max=40.0,
    *,
    omegas=None,
    theta0=0.1,
    tol=1e-9,
    tau_grid_points=801,
    floor=1e-3,
    tau_min=0.1,
    window=0.5,
):
    """Inverted-oscillator ensemble with a Gaussian frequency spectrum.

    Every member draws its frequencies with a counter-derived seed, evolves
    the oscillator flow, and fits the linear entropy coefficient; the report
    aggregates the gap between the fitted coefficient and the member's summed
    spectrum.  Passing ``omegas`` pins an explicit deterministic spectrum
    (all members identical, no drawing).

    The entropy volume is taken in the reparametrized flat frame in which
    the oscillator equations hold; see the README for why the conformally
    weighted volume would double the slope.
    """
    l = int(l)
    if l < 1:
        raise ConfigError("l", "must be a positive integer")
    if members < 1:
        raise ConfigError("members", "must be a positive integer")
    if theta0 == 0:
        raise ConfigError("theta0", "must be nonzero (the flow would sit still)")
    if omegas is not None:
        omegas = [float(w) for w in omegas]
        if len(omegas) != l:
            raise ConfigError("omegas", f"expected {l} frequencies")
        if any(w <= 0 for w in omegas):
            raise ConfigError("omegas", "frequencies must be > 0")
    else:
        if omega_mean <= 0:
            raise ConfigError("omega_mean", "must be > 0")
        if omega_std < 0:
            raise ConfigError("omega_std", "must be >= 0")
        if omega_std > 0 and omega_mean <= 3.0 * omega_std:
            raise ConfigError("omega_mean", "must exceed 3 * omega_std")

    n_samples = max(int(tau_grid_points), 201)
    flat = euclidean_metric(l)
    records = []
    first_trajectory = None
    first_ige = None
    for m in range(members):
        if omegas is not None:
            om = np.asarray(omegas, dtype=float)
        else:
            om = _draw_frequencies(member_rng(seed, m), l, omega_mean, omega_std)
        trajectory = oscillator_flow(om, theta0, tau_max, tol=tol, n_samples=n_samples)
        ige = entropy.ige_series(
            flat, trajectory, tau_min=tau_min, floor=floor, window=window
        )
        records.append(
            {
                "member": m,
                "seed": member_seed(seed, m),
                "omegas": om.tolist(),
                "sum_omega": float(om.sum()),
                "lambda_hat": ige.growth.coefficient,
                "law": ige.growth.law,
                "residual_linear": ige.growth.residual_linear,
            }
        )
        if m == 0:
            first_trajectory = trajectory
            first_ige = ige
    gaps = np.array([r["lambda_hat"] - r["sum_omega"] for r in records])
    ensemble = {
        "members": records,
        "mean_gap": float(gaps.mean()),
        "std_gap": float(gaps.std()),
    }
    config = {
        "l": l,
        "omega_mean": omega_mean,
        "omega_std": omega_std,
        "omegas": omegas,
        "members": members,
        "theta0": theta0,
        "tau_max": tau_max,
        "tol": tol,
        "tau_grid_points": n_samples,
        "floor": floor,
        "tau_min": tau_min,
        "window": window,
        "seed": int(seed),
    }
    return ExperimentReport(
        model="iho",
        config=config,
        scalar_curvature=None,
        trajectory=first_trajectory,
        ige=first_ige,
        ensemble=ensemble,
    )


def iho_reparametrization_check(omegas, theta0=0.1, phi_max=0.1, tol=1e-10):
    """Compare raw conformal-metric geodesics with the oscillator flow.

    The oscillator form of the flow follows from reparametrizing unit-speed
    geodesics of the conformal metric, so the comparison needs
    speed-consistent initial data |theta_dot|^2 = 2 * (1 - Phi).  Returns a
    dict with the maximum relative deviation of the coordinates while
    |Phi| <= phi_max, plus the comparison horizon.
    """
    om = np.asarray(omegas, dtype=float)
    dim = om.size
    th0 = np.full(dim, float(theta0))
    a0 = 1.0 + 0.5 * float(np.sum(om**2 * th0**2))
    v0_tau = np.full(dim, np.sqrt(2.0 * a0 / dim))

    def phi(theta):
        return -0.5 * np.sum(om**2 * np.asarray(theta) ** 2, axis=-1)

    # oscillator flow with the speed-consistent velocity, stopped at phi_max
    def rhs(t, y):
        return np.concatenate([y[dim:], om**2 * y[:dim]])

    def phi_event(t, y):
        return phi_max - np.abs(phi(y[:dim]))

    phi_event.terminal = True
    sol = solve_ivp(
        rhs,
        (0.0, 50.0),
        np.concatenate([th0, v0_tau]),
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=True,
        events=[phi_event],
    )
    tau_star = float(sol.t_events[0][0]) if sol.t_events[0].size else float(sol.t[-1])

    # arc length of the reparametrized flow: ds = sqrt(2) (1 - Phi) dtau
    taus = np.linspace(0.0, tau_star, 513)
    osc = sol.sol(taus).T
    one_minus_phi = 1.0 - phi(osc[:, :dim])
    s_of_tau = np.concatenate(
        [
            [0.0],
            np.cumsum(
                0.5
                * (np.sqrt(2.0) * one_minus_phi[1:] + np.sqrt(2.0) * one_minus_phi[:-1])
                * np.diff(taus)
            ),
        ]
    )
    s_star = float(s_of_tau[-1])

    metric = conformal_oscillator_metric(om)
    raw = integrate_geodesic(
        metric,
        th0,
        v0_tau / (np.sqrt(2.0) * a0),
        s_star,
        tol=tol,
        n_samples=257,
    )
    # recover tau along the raw geodesic: dtau = ds / (sqrt(2) (1 - Phi))
    inv_rate = 1.0 / (np.sqrt(2.0) * (1.0 - phi(raw.theta)))
    tau_of_s = np.concatenate(
        [[0.0], np.cumsum(0.5 * (inv_rate[1:] + inv_rate[:-1]) * np.diff(raw.tau))]
    )
    keep = tau_of_s <= tau_star
    reference = sol.sol(tau_of_s[keep]).T[:, :dim]
    deviation = np.abs(raw.theta[keep] - reference)
    scale = np.maximum(np.max(np.abs(reference)), 1e-12)
    return {
        "max_rel_deviation": float(deviation.max() / scale),
        "tau_star": tau_star,
        "s_star": s_star,
        "phi_max": phi_max,
    }


def spin_chain_integrable_experiment(
    a,
    b,
    tau_max=50.0,
    tol=1e-9,
    *,
    tau_grid_points=1001,
    floor=1e-3,
    tau_min=0.1,
    window=0.5,
    seed=0,
):
    """Poissonian level-spacing manifold coupled to an exponential bath.

    The metric is flat in log coordinates; geodesics from (1, 1) with
    velocity (a, b) are mu_A = exp(a tau), mu_B = exp(b tau), and the
    entropy grows logarithmically.
    """
    if a <= 0:
        raise ConfigError("a", "must be > 0")
    if b <= 0:
        raise ConfigError("b", "must be > 0")
    metric = spin_integrable_manifold()
    theta0 = np.array([1.0, 1.0])
    v0 = np.array([float(a), float(b)])
    n_samples = max(int(tau_grid_points), 201)
    trajectory = integrate_geodesic(
        metric, theta0, v0, tau_max, tol=tol, n_samples=n_samples
    )
    scalar = riemann_ricci_scalar(metric, theta0).scalar
    ige = entropy.ige_series(
        metric, trajectory, tau_min=tau_min, floor=floor, window=window
    )
    config = {
        "a": a,
        "b": b,
        "tau_max": tau_max,
        "tol": tol,
        "tau_grid_points": n_samples,
        "floor": floor,
        "tau_min": tau_min,
        "window": window,
        "seed": int(seed),
    }
    return ExperimentReport(
        model="spin_integrable",
        config=config,
        scalar_curvature=scalar,
        trajectory=trajectory,
        ige=ige,
    )


def spin_chain_chaotic_experiment(
    c,
    tau_max=40.0,
    tol=1e-9,
    *,
    tau_grid_points=801,
    floor=1e-3,
    tau_min=0.1,
    window=0.5,
    seed=0,
):
    """Wigner-Dyson spacing manifold coupled to a Gaussian bath.

    The geodesic from (mu_A, mu_B, sigma_B) = (1, 0, 1) with velocity
    (0, 0, c) expands the bath sigma exponentially; the entropy grows
    linearly and the scalar curvature is the Gaussian block's -1.
    """
    if c <= 0:
        raise ConfigError("c", "must be > 0")
    metric = spin_chaotic_manifold()
    theta0 = np.array([1.0, 0.0, 1.0])
    v0 = np.array([0.0, 0.0, float(c)])
    n_samples = max(int(tau_grid_points), 201)
    trajectory = integrate_geodesic(
        metric, theta0, v0, tau_max, tol=tol, n_samples=n_samples
    )
    scalar = riemann_ricci_scalar(metric, theta0).scalar
    ige = entropy.ige_series(
        metric, trajectory, tau_min=tau_min, floor=floor, window=window
    )
    config = {
        "c": c,
        "tau_max": tau_max,
        "tol": tol,
        "tau_grid_points": n_samples,
        "floor": floor,
        "tau_min": tau_min,
        "window": window,
        "seed": int(seed),
    }
    return ExperimentReport(
        model="spin_chaotic",
        config=config,
        scalar_curvature=scalar,
        trajectory=trajectory,
        ige=ige,
    )
