"""Statistical volume and entropy growth along a geodesic.

The volume explored up to time tau is the time average

    V(tau) = (1/tau) * integral_0^tau vol(tau') dtau',

where vol(tau') integrates sqrt(|det g|) over the axis-aligned region swept
by the trajectory up to tau'.  Coordinates the trajectory leaves frozen get
a floor width; the floor is a fixed *proper* (metric) width resolved at the
trajectory's current point, so a frozen coordinate's box width in
coordinates is floor / sqrt(g_kk).  The entropy series is S = log V, and its
asymptotic law (linear vs logarithmic in tau) is decided by competing
least-squares fits on the tail.

The inner integral factorizes over product-metric blocks; half-line
coordinates are integrated after a log substitution so a fixed node count
stays accurate while the swept box expands exponentially.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError, QuadratureError
from .quad import _leggauss

DEFAULT_FLOOR = 1e-3
DEFAULT_NODES = 32
DEFAULT_TAU_MIN = 0.1
DEFAULT_WINDOW = 0.5


@dataclass(frozen=True)
class Box:
    """Axis-aligned region: per-coordinate closed intervals."""

    lower: np.ndarray
    upper: np.ndarray

    def widths(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class GrowthClassification:
    """Winning asymptotic law of an entropy series tail."""

    law: str  # "linear" | "logarithmic" | "inconclusive"
    coefficient: float
    intercept: float
    residual_linear: float
    residual_log: float

    def to_dict(self):
        return {
            "law": self.law,
            "coefficient": self.coefficient,
            "intercept": self.intercept,
            "residual_linear": self.residual_linear,
            "residual_log": self.residual_log,
        }


@dataclass(frozen=True)
class IGESeries:
    """Samples (tau, V(tau), S(tau) = log V) plus the fitted growth law."""

    tau: np.ndarray
    volume: np.ndarray
    ige: np.ndarray
    growth: GrowthClassification


def _floor_widths(metric, trajectory, floor, index):
    """Per-coordinate floor widths at sample ``index`` (proper if metric given)."""
    base = floor * (1.0 + np.abs(trajectory.theta[0]))
    if metric is None:
        return base
    g = metric.value(trajectory.theta[index])
    return base / np.sqrt(np.diag(g))


def swept_region(trajectory, tau_prime, floor, metric=None):
    """Bounding box of the trajectory segment up to ``tau_prime``.

    Frozen (degenerate) coordinates are widened symmetrically to the floor
    width; passing ``metric`` makes the floor a proper width at the current
    point instead of a raw coordinate width.
    """
    if floor <= 0:
        raise ValueError("floor must be positive")
    tau = trajectory.tau
    if not (tau[0] <= tau_prime <= tau[-1]):
        raise ValueError(f"tau_prime={tau_prime} outside trajectory range")
    idx = int(np.searchsorted(tau, tau_prime, side="right") - 1)
    seg = trajectory.theta[: idx + 1]
    lower = seg.min(axis=0)
    upper = seg.max(axis=0)
    w = _floor_widths(metric, trajectory, floor, idx)
    narrow = (upper - lower) < w
    mid = 0.5 * (upper + lower)
    lower = np.where(narrow, mid - 0.5 * w, lower)
    upper = np.where(narrow, mid + 0.5 * w, upper)
    return Box(lower=lower, upper=upper)


def _axis_rule(block, k, a, b, nodes):
    """Nodes/weights arrays of shape (n, nodes) for integrating axis k.

    ``a``/``b`` are per-sample interval ends.  Half-line coordinates go
    through u = log x so the rule tracks integrands concentrated at the
    lower end of exponentially wide boxes.
    """
    x, w = _leggauss(nodes)
    lo_d, hi_d = block.domain[k]
    if np.isfinite(lo_d) and not np.isfinite(hi_d):
        a = np.maximum(a, lo_d + 1e-300)
        ua, ub = np.log(a - lo_d), np.log(b - lo_d)
        half = 0.5 * (ub - ua)
        xs = lo_d + np.exp(ua[:, None] + half[:, None] * (x + 1.0))
        ws = half[:, None] * w * (xs - lo_d)
    else:
        half = 0.5 * (b - a)
        xs = a[:, None] + half[:, None] * (x + 1.0)
        ws = half[:, None] * w
    return xs, ws


def _block_volumes(block, lower, upper, nodes):
    """sqrt(|det g|) integrated over per-sample boxes of one metric block."""
    n = lower.shape[0]
    bdim = block.dim
    rules = [
        _axis_rule(block, k, lower[:, k], upper[:, k], nodes) for k in range(bdim)
    ]
    if bdim == 1:
        xs, ws = rules[0]
        g = block.value(xs[..., None])
        return np.einsum("ni,ni->n", ws, np.sqrt(np.abs(g[..., 0, 0])))
    if bdim == 2:
        (x0, w0), (x1, w1) = rules
        pts = np.empty((n, nodes, nodes, 2))
        pts[..., 0] = x0[:, :, None]
        pts[..., 1] = x1[:, None, :]
        g = block.value(pts)
        det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
        return np.einsum("ni,nj,nij->n", w0, w1, np.sqrt(np.abs(det)))
    # generic tensor product, one sample at a time
    out = np.empty(n)
    for i in range(n):
        axes = [r[0][i] for r in rules]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        g = block.value(mesh)
        det = np.linalg.det(g)
        weight = rules[0][1][i]
        for r in rules[1:]:
            weight = np.multiply.outer(weight, r[1][i])
        out[i] = np.sum(weight * np.sqrt(np.abs(det)))
    return out


def region_volume(metric, box, nodes=DEFAULT_NODES):
    """Integral of sqrt(|det g|) over ``box`` by tensor Gauss-Legendre."""
    lower = np.asarray(box.lower, dtype=float)[None, :]
    upper = np.asarray(box.upper, dtype=float)[None, :]
    vol = 1.0
    for off, block in metric.factor_blocks():
        sl = slice(off, off + block.dim)
        vol = vol * _block_volumes(block, lower[:, sl], upper[:, sl], nodes)[0]
    if not np.isfinite(vol):
        raise QuadratureError(f"volume quadrature produced {vol!r}", last=vol)
    return float(vol)


def _volume_series(metric, trajectory, floor, nodes):
    """vol(tau') at every trajectory sample, floors applied pointwise."""
    theta = trajectory.theta
    lower = np.minimum.accumulate(theta, axis=0)
    upper = np.maximum.accumulate(theta, axis=0)
    base = floor * (1.0 + np.abs(theta[0]))
    g_all = metric.value(theta)
    w = base / np.sqrt(np.diagonal(g_all, axis1=-2, axis2=-1))
    narrow = (upper - lower) < w
    mid = 0.5 * (upper + lower)
    lower = np.where(narrow, mid - 0.5 * w, lower)
    upper = np.where(narrow, mid + 0.5 * w, upper)
    vol = np.ones(theta.shape[0])
    for off, block in metric.factor_blocks():
        sl = slice(off, off + block.dim)
        vol = vol * _block_volumes(block, lower[:, sl], upper[:, sl], nodes)
    if not np.all(np.isfinite(vol)):
        raise QuadratureError("volume quadrature produced non-finite values")
    return vol


def _time_average(tau, vol):
    """(1/tau) * cumulative trapezoid of vol; first entry is unusable."""
    inner = np.concatenate(
        [[0.0], np.cumsum(0.5 * (vol[1:] + vol[:-1]) * np.diff(tau))]
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(tau > 0, inner / np.where(tau > 0, tau, 1.0), np.nan)


def statistical_volume(
    metric, trajectory, tau, *, floor=DEFAULT_FLOOR, nodes=DEFAULT_NODES
):
    """Time-averaged swept volume V(tau) for a single tau.

    The inner integral uses tensor Gauss-Legendre per product block; the
    outer time average uses the trapezoid rule on the trajectory grid.
    """
    grid = trajectory.tau
    if not (grid[0] <= tau <= grid[-1]) or tau <= 0:
        raise ValueError(f"tau={tau} outside the positive trajectory range")
    vol = _volume_series(metric, trajectory, floor, nodes)
    mask = grid <= tau
    t = grid[mask]
    v = vol[mask]
    if t[-1] < tau:  # partial last segment, linear in vol
        frac = (tau - t[-1]) / (grid[mask.sum()] - t[-1])
        v_end = vol[mask.sum() - 1] + frac * (vol[mask.sum()] - vol[mask.sum() - 1])
        t = np.append(t, tau)
        v = np.append(v, v_end)
    inner = np.trapezoid(v, t)
    return float(inner / tau)


def classify_growth(tau, s, window=DEFAULT_WINDOW, separation=1.5):
    """Decide between S = a*tau + b and S = a*log(tau) + b on the tail.

    The law with the smaller RMS residual wins only when the other residual
    exceeds it by ``separation``; otherwise the verdict is inconclusive.
    """
    tau = np.asarray(tau, dtype=float)
    s = np.asarray(s, dtype=float)
    cut = tau[-1] - window * (tau[-1] - tau[0])
    mask = tau >= cut
    if np.count_nonzero(mask) < 10:
        raise ValueError("need at least 10 samples in the fit window")
    if np.any(tau[mask] <= 1.0):
        raise ValueError("fit window must satisfy tau > 1")
    t = tau[mask]
    y = s[mask]

    a_lin, b_lin = np.polyfit(t, y, 1)
    r_lin = float(np.sqrt(np.mean((y - (a_lin * t + b_lin)) ** 2)))
    a_log, b_log = np.polyfit(np.log(t), y, 1)
    r_log = float(np.sqrt(np.mean((y - (a_log * np.log(t) + b_log)) ** 2)))

    if r_lin * separation <= r_log:
        law, coeff, intercept = "linear", a_lin, b_lin
    elif r_log * separation <= r_lin:
        law, coeff, intercept = "logarithmic", a_log, b_log
    else:
        law, coeff, intercept = "inconclusive", np.nan, np.nan
    return GrowthClassification(
        law=law,
        coefficient=float(coeff),
        intercept=float(intercept),
        residual_linear=r_lin,
        residual_log=r_log,
    )


def ige_series(
    metric,
    trajectory,
    tau_grid=None,
    *,
    tau_min=DEFAULT_TAU_MIN,
    floor=DEFAULT_FLOOR,
    nodes=DEFAULT_NODES,
    window=DEFAULT_WINDOW,
):
    """Entropy series S(tau) = log V(tau) along the trajectory.

    ``tau_grid`` defaults to the trajectory samples above ``tau_min``; when
    given it must be strictly increasing and lie on the trajectory range.
    """
    grid = trajectory.tau
    vol = _volume_series(metric, trajectory, floor, nodes)
    v_all = _time_average(grid, vol)
    if tau_grid is None:
        mask = grid >= tau_min
        tau_out = grid[mask]
        v_out = v_all[mask]
    else:
        tau_out = np.asarray(tau_grid, dtype=float)
        if np.any(np.diff(tau_out) <= 0):
            raise ValueError("tau_grid must be strictly increasing")
        if tau_out[0] < tau_min or tau_out[-1] > grid[-1]:
            raise ValueError("tau_grid must lie within [tau_min, trajectory end]")
        v_out = np.interp(tau_out, grid, v_all)
    if np.any(v_out <= 0) or np.any(~np.isfinite(v_out)):
        raise QuadratureError("volume series is not positive on the grid")
    s_out = np.log(v_out)
    growth = classify_growth(tau_out, s_out, window=window)
    return IGESeries(tau=tau_out, volume=v_out, ige=s_out, growth=growth)
