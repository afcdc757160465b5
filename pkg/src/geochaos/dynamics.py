"""Geodesic flow and geodesic-deviation integration.

Geodesics solve theta'' + Gamma(theta', theta') = 0 with an adaptive
embedded Runge-Kutta 5(4) pair and dense output on a uniform grid.  The
deviation (Jacobi) field is integrated jointly with the geodesic as a
first-order system in (theta, theta', J, DJ/dtau), with the covariant
derivatives expanded into ordinary ones plus Gamma terms, so no interpolated
trajectory enters the deviation equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .curvature import christoffel, riemann_tensor
from .errors import DomainExitError, FitError, StiffnessError

# Open boundaries are unreachable for the exponential approach the models
# produce, so "exit" is declared at this relative distance from the boundary,
# where the Fisher metrics are already hopelessly ill-conditioned.
BOUNDARY_GUARD = 1e-12


@dataclass(frozen=True)
class GeodesicTrajectory:
    """Uniform-grid samples (tau, theta, theta_dot) of one geodesic.

    ``speed[i]`` is g(theta_dot, theta_dot) at sample i; it is conserved
    along exact geodesics and its drift measures integration error.
    """

    tau: np.ndarray  # (n,)
    theta: np.ndarray  # (n, dim)
    theta_dot: np.ndarray  # (n, dim)
    speed: np.ndarray  # (n,)
    tol: float

    @property
    def dim(self):
        return self.theta.shape[1]

    def speed_drift(self):
        ref = self.speed[0]
        if ref == 0.0:
            return float(np.max(np.abs(self.speed)))
        return float(np.max(np.abs(self.speed - ref)) / abs(ref))


@dataclass(frozen=True)
class JacobiSeries:
    """Samples of the deviation field along a trajectory's tau grid.

    ``j_dot`` holds the covariant derivative DJ/dtau; ``intensity`` is the
    metric norm ||J||_g at each sample.
    """

    tau: np.ndarray
    j: np.ndarray  # (n, dim)
    j_dot: np.ndarray  # (n, dim)
    intensity: np.ndarray  # (n,)


def _domain_events(metric, theta0):
    """Terminal events firing when a coordinate nears an open boundary."""
    events = []
    for k, (lo, hi) in enumerate(metric.domain):
        if np.isfinite(lo):
            guard = lo + BOUNDARY_GUARD * (1.0 + abs(theta0[k] - lo))

            def lower_event(t, y, k=k, guard=guard):
                return y[k] - guard

            lower_event.terminal = True
            lower_event.direction = -1
            events.append(lower_event)
        if np.isfinite(hi):
            guard = hi - BOUNDARY_GUARD * (1.0 + abs(hi - theta0[k]))

            def upper_event(t, y, k=k, guard=guard):
                return guard - y[k]

            upper_event.terminal = True
            upper_event.direction = -1
            events.append(upper_event)
    return events


def _solve(metric, rhs, y0, tau_max, tol, n_samples):
    events = _domain_events(metric, np.asarray(y0)[: metric.dim])
    sol = solve_ivp(
        rhs,
        (0.0, tau_max),
        np.asarray(y0, dtype=float),
        method="RK45",
        rtol=tol,
        atol=tol * 1e-3,
        dense_output=True,
        events=events,
    )
    if sol.status == 1:  # a terminal event fired
        t_exit = min(float(te[0]) for te in sol.t_events if te.size)
        raise DomainExitError(
            f"trajectory reached the domain boundary at tau={t_exit:.6g}",
            tau=t_exit,
            state=sol.sol(t_exit),
        )
    if sol.status < 0:
        raise StiffnessError(f"integrator step underflow: {sol.message}")
    grid = np.linspace(0.0, tau_max, n_samples)
    return grid, sol.sol(grid).T


def integrate_geodesic(metric, theta0, v0, tau_max, tol=1e-9, n_samples=401):
    """Integrate the geodesic with initial point ``theta0`` and velocity ``v0``.

    Local error per step is controlled at ``tol``; samples are taken on a
    uniform grid of ``n_samples`` points over [0, tau_max].  Raises
    DomainExitError (with the exit time and last state) if the trajectory
    reaches the boundary of the metric's open domain, StiffnessError on step
    underflow.
    """
    theta0 = np.asarray(theta0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not (1e-12 <= tol <= 1e-3):
        raise ValueError("tol must lie in [1e-12, 1e-3]")
    metric.check_interior(theta0)
    dim = metric.dim

    def rhs(t, y):
        theta, v = y[:dim], y[dim:]
        gamma = christoffel(metric, theta)
        acc = -np.einsum("rmn,m,n->r", gamma, v, v)
        return np.concatenate([v, acc])

    grid, samples = _solve(
        metric, rhs, np.concatenate([theta0, v0]), tau_max, tol, n_samples
    )
    theta = samples[:, :dim]
    theta_dot = samples[:, dim:]
    g = metric.value(theta)
    speed = np.einsum("imn,im,in->i", g, theta_dot, theta_dot)
    return GeodesicTrajectory(
        tau=grid, theta=theta, theta_dot=theta_dot, speed=speed, tol=tol
    )


def integrate_jacobi(metric, trajectory, j0, j_dot0):
    """Integrate the deviation field along (a re-run of) ``trajectory``.

    ``j_dot0`` is the initial covariant derivative DJ/dtau.  The geodesic is
    re-integrated jointly with (J, DJ/dtau) from the trajectory's own initial
    data, tolerance, and grid, and the deviation intensity ||J||_g is
    evaluated with the metric at each sample.
    """
    dim = metric.dim
    j0 = np.asarray(j0, dtype=float)
    j_dot0 = np.asarray(j_dot0, dtype=float)
    if j0.shape != (dim,) or j_dot0.shape != (dim,):
        raise ValueError(f"deviation data must have dimension {dim}")
    theta0 = trajectory.theta[0]
    v0 = trajectory.theta_dot[0]
    tau_max = float(trajectory.tau[-1])

    def rhs(t, y):
        theta = y[:dim]
        v = y[dim : 2 * dim]
        j = y[2 * dim : 3 * dim]
        k = y[3 * dim :]
        gamma = christoffel(metric, theta)
        riem = riemann_tensor(metric, theta)
        gv = np.einsum("rmn,m->rn", gamma, v)
        acc = -gv @ v
        dj = k - gv @ j
        dk = -gv @ k - np.einsum("mnrs,n,r,s->m", riem, v, j, v)
        return np.concatenate([v, acc, dj, dk])

    y0 = np.concatenate([theta0, v0, j0, j_dot0])
    grid, samples = _solve(
        metric, rhs, y0, tau_max, trajectory.tol, trajectory.tau.size
    )
    j = samples[:, 2 * dim : 3 * dim]
    j_dot = samples[:, 3 * dim :]
    g = metric.value(samples[:, :dim])
    intensity = np.sqrt(np.maximum(np.einsum("imn,im,in->i", g, j, j), 0.0))
    return JacobiSeries(tau=grid, j=j, j_dot=j_dot, intensity=intensity)


def orthogonal_unit_deviation(metric, theta0, v0, direction, per_factor=False):
    """Deviation-rate vector g-orthogonalized against ``v0`` and normalized.

    With ``per_factor`` the normalization is applied blockwise (unit g-norm
    inside every product factor); otherwise the whole vector gets unit norm.
    """
    g = metric.value(np.asarray(theta0, dtype=float))
    v0 = np.asarray(v0, dtype=float)
    w = np.asarray(direction, dtype=float).copy()
    vv = v0 @ g @ v0
    if vv > 0:
        w -= ((w @ g @ v0) / vv) * v0
    if per_factor and metric.blocks is not None:
        for off, block in metric.factor_blocks():
            sl = slice(off, off + block.dim)
            norm = np.sqrt(w[sl] @ g[sl, sl] @ w[sl])
            if norm > 0:
                w[sl] /= norm
        return w
    norm = np.sqrt(w @ g @ w)
    if norm == 0:
        raise ValueError("deviation direction is parallel to the velocity")
    return w / norm


def fit_exponential_rate(tau, y, window=0.5):
    """Least-squares fit of log y = log A + rate * tau on the tail window.

    ``window`` is the fraction of the tau range used, counted from the end.
    Returns (rate, amplitude, residual) with residual the RMS of the
    log-space misfit.  Raises FitError when y is not positive on the window.
    """
    tau = np.asarray(tau, dtype=float)
    y = np.asarray(y, dtype=float)
    if not 0.0 < window <= 1.0:
        raise ValueError("window must lie in (0, 1]")
    cut = tau[-1] - window * (tau[-1] - tau[0])
    mask = tau >= cut
    if np.count_nonzero(mask) < 2:
        raise FitError("fit window contains fewer than two samples")
    if np.any(y[mask] <= 0.0):
        raise FitError("series is not positive on the fit window")
    logy = np.log(y[mask])
    rate, intercept = np.polyfit(tau[mask], logy, 1)
    resid = logy - (rate * tau[mask] + intercept)
    return float(rate), float(np.exp(intercept)), float(np.sqrt(np.mean(resid**2)))
