"""Parametric probability families and their Fisher-Rao metric fields.

Four families are supported: ``gaussian`` (mean, standard deviation),
``exponential`` (mean), ``poisson_spacing`` (mean level spacing of a
Poissonian spectrum; same density as the exponential), and ``wigner_dyson``
(Wigner surmise scaled so the parameter is the mean spacing).

Each family has a closed-form Fisher metric (``fisher_metric_analytic``) and
an independent quadrature oracle (``fisher_metric_numeric``) that estimates
    g_mn = E[ d_m log p * d_n log p ]
with finite-difference score functions, so the two paths share no
derivatives.  Product manifolds assemble block-diagonal metrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import quad
from .errors import DomainError, SingularMetricError, UnsupportedFamilyError

SUPPORTED_FAMILIES = ("gaussian", "exponential", "poisson_spacing", "wigner_dyson")

_REAL_LINE = (-np.inf, np.inf)
_POSITIVE = (0.0, np.inf)


@dataclass(frozen=True)
class SampleDomain:
    """Range of the sample variable x: the real line or the open half-line."""

    kind: str  # "real" | "halfline"
    lower: float
    upper: float


@dataclass(frozen=True)
class ParametricFamily:
    """A one-dimensional-sample probability family p(x | theta)."""

    name: str
    param_dim: int
    param_names: tuple
    params: tuple  # reference parameter point used as defaults
    sample_domain: SampleDomain
    param_domain: tuple  # open (lo, hi) per parameter
    log_density: Callable  # (x, theta) -> log p, broadcasting over x

    def density(self, x, theta=None):
        theta = self.params if theta is None else tuple(theta)
        return np.exp(self.log_density(np.asarray(x, dtype=float), theta))

    def truncated_support(self, theta):
        """Finite integration window outside of which p is negligible."""
        if self.name == "gaussian":
            mu, sigma = theta
            return mu - 12.0 * sigma, mu + 12.0 * sigma
        mu = theta[0]
        return 0.0, 40.0 * mu


@dataclass(frozen=True)
class MetricField:
    """The map theta -> g_mn(theta) together with its first two derivatives.

    ``value(theta)`` returns the (dim, dim) matrix and broadcasts over a
    leading batch axis; ``derivative(theta)[r, m, n] = d_r g_mn`` and
    ``second_derivative(theta)[s, r, m, n] = d_s d_r g_mn`` are pointwise.
    ``blocks`` records the product structure as (offset, factor) pairs and is
    what the volume quadrature uses to factorize separable determinants.
    """

    dim: int
    value: Callable
    derivative: Callable
    second_derivative: Callable
    provider: str  # "analytic" | "finite-difference"
    domain: tuple  # open (lo, hi) per coordinate
    coord_names: tuple
    blocks: tuple = field(default=None, repr=False)

    def factor_blocks(self):
        if self.blocks is None:
            return ((0, self),)
        return self.blocks

    def contains(self, theta):
        theta = np.asarray(theta, dtype=float)
        for k, (lo, hi) in enumerate(self.domain):
            if not (lo < theta[k] < hi):
                return False
        return True

    def check_interior(self, theta):
        if not self.contains(theta):
            raise DomainError(
                f"point {np.asarray(theta).tolist()} is outside the open domain"
            )

    def inverse_value(self, theta):
        g = self.value(theta)
        try:
            inv = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise SingularMetricError(f"metric singular at {theta}") from exc
        if not np.all(np.isfinite(inv)):
            raise SingularMetricError(f"metric inverse not finite at {theta}")
        return inv


def _validate_params(name, names, values, domains):
    for label, value, (lo, hi) in zip(names, values, domains):
        if not (lo < value < hi):
            raise DomainError(
                f"{name}: parameter {label}={value!r} outside open interval "
                f"({lo}, {hi})"
            )


def make_family(name, **params):
    """Construct one of the supported families at a reference parameter point.

    gaussian(mu, sigma); exponential(mu); poisson_spacing(mu);
    wigner_dyson(mu).  ``mu`` is the mean (mean spacing for the two
    level-spacing families).
    """
    if name == "gaussian":
        mu = float(params.pop("mu", 0.0))
        sigma = float(params.pop("sigma", 1.0))
        _extra_check(name, params)
        _validate_params(name, ("mu", "sigma"), (mu, sigma), (_REAL_LINE, _POSITIVE))

        def log_density(x, theta):
            m, s = theta
            return -0.5 * np.log(2.0 * np.pi * s * s) - (x - m) ** 2 / (2.0 * s * s)

        return ParametricFamily(
            name=name,
            param_dim=2,
            param_names=("mu", "sigma"),
            params=(mu, sigma),
            sample_domain=SampleDomain("real", -np.inf, np.inf),
            param_domain=(_REAL_LINE, _POSITIVE),
            log_density=log_density,
        )

    if name in ("exponential", "poisson_spacing"):
        mu = float(params.pop("mu", 1.0))
        _extra_check(name, params)
        _validate_params(name, ("mu",), (mu,), (_POSITIVE,))

        def log_density(x, theta):
            (m,) = theta
            return -np.log(m) - x / m

        return ParametricFamily(
            name=name,
            param_dim=1,
            param_names=("mu",),
            params=(mu,),
            sample_domain=SampleDomain("halfline", 0.0, np.inf),
            param_domain=(_POSITIVE,),
            log_density=log_density,
        )

    if name == "wigner_dyson":
        mu = float(params.pop("mu", 1.0))
        _extra_check(name, params)
        _validate_params(name, ("mu",), (mu,), (_POSITIVE,))

        def log_density(s, theta):
            (m,) = theta
            return (
                np.log(np.pi / 2.0)
                + np.log(s)
                - 2.0 * np.log(m)
                - np.pi * s * s / (4.0 * m * m)
            )

        return ParametricFamily(
            name=name,
            param_dim=1,
            param_names=("mu",),
            params=(mu,),
            sample_domain=SampleDomain("halfline", 0.0, np.inf),
            param_domain=(_POSITIVE,),
            log_density=log_density,
        )

    raise UnsupportedFamilyError(
        f"unknown family {name!r}; supported: {', '.join(SUPPORTED_FAMILIES)}"
    )


def _extra_check(name, params):
    if params:
        raise DomainError(f"{name}: unexpected parameters {sorted(params)}")


def normalization(family, theta=None, tol=1e-10):
    """Integral of the density over the sample domain (should be 1)."""
    theta = family.params if theta is None else tuple(theta)
    a, b = family.truncated_support(theta)

    def estimate(n):
        x, w = quad.interval_nodes(a, b, n)
        return float(np.sum(w * family.density(x, theta)))

    return float(quad.integrate_refining(estimate, n0=64, tol=tol))


def sample_mean(family, theta=None, tol=1e-10):
    """Mean of x under the family, by quadrature."""
    theta = family.params if theta is None else tuple(theta)
    a, b = family.truncated_support(theta)

    def estimate(n):
        x, w = quad.interval_nodes(a, b, n)
        return float(np.sum(w * x * family.density(x, theta)))

    return float(quad.integrate_refining(estimate, n0=64, tol=tol))


# ---------------------------------------------------------------------------
# closed-form Fisher metrics
# ---------------------------------------------------------------------------


def _diag_metric(dim, diag_fn, ddiag_fn, d2diag_fn, domain, coord_names):
    """Metric field with diagonal value diag(diag_fn(theta))."""

    def value(theta):
        theta = np.asarray(theta, dtype=float)
        d = np.asarray(diag_fn(theta))
        out = np.zeros(theta.shape[:-1] + (dim, dim))
        idx = np.arange(dim)
        out[..., idx, idx] = np.moveaxis(d, 0, -1) if d.ndim > 1 else d
        return out

    def derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((dim, dim, dim))
        idx = np.arange(dim)
        dd = ddiag_fn(theta)  # (dim_deriv, dim_diag)
        out[:, idx, idx] = dd
        return out

    def second_derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((dim, dim, dim, dim))
        idx = np.arange(dim)
        d2 = d2diag_fn(theta)  # (dim, dim, dim_diag)
        out[:, :, idx, idx] = d2
        return out

    return MetricField(
        dim=dim,
        value=value,
        derivative=derivative,
        second_derivative=second_derivative,
        provider="analytic",
        domain=domain,
        coord_names=coord_names,
    )


def fisher_metric_analytic(family):
    """Closed-form Fisher-Rao metric of a supported family.

    gaussian -> diag(1/sigma^2, 2/sigma^2) in (mu, sigma) coordinates;
    exponential and poisson_spacing -> (1/mu^2); wigner_dyson -> (4/mu^2).
    """
    if family.name == "gaussian":

        def diag(theta):
            s = theta[..., 1]
            return np.stack([1.0 / s**2, 2.0 / s**2], axis=0)

        def ddiag(theta):
            s = theta[1]
            return np.array([[0.0, 0.0], [-2.0 / s**3, -4.0 / s**3]])

        def d2diag(theta):
            s = theta[1]
            out = np.zeros((2, 2, 2))
            out[1, 1] = [6.0 / s**4, 12.0 / s**4]
            return out

        return _diag_metric(
            2, diag, ddiag, d2diag, (_REAL_LINE, _POSITIVE), ("mu", "sigma")
        )

    if family.name in ("exponential", "poisson_spacing", "wigner_dyson"):
        scale = 4.0 if family.name == "wigner_dyson" else 1.0

        def diag(theta):
            m = theta[..., 0]
            return np.stack([scale / m**2], axis=0)

        def ddiag(theta):
            m = theta[0]
            return np.array([[-2.0 * scale / m**3]])

        def d2diag(theta):
            m = theta[0]
            return np.array([[[6.0 * scale / m**4]]])

        return _diag_metric(1, diag, ddiag, d2diag, (_POSITIVE,), ("mu",))

    raise UnsupportedFamilyError(f"no closed-form metric for {family.name!r}")


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Node budget and refinement tolerance for the Fisher oracle."""

    nodes: int = 64
    tol: float = 1e-8
    max_nodes: int = 8192
    score_step: float = 1e-5


def fisher_metric_numeric(family, theta, spec=QuadratureSpec()):
    """Quadrature estimate of the Fisher information matrix at ``theta``.

    Scores d_m log p are taken by central differences in the parameters, so
    this path is independent of the closed forms and serves as their oracle.
    Refines by node doubling; raises QuadratureError if refinement stalls.
    """
    theta = np.asarray(theta, dtype=float)
    k = family.param_dim
    for label, value, (lo, hi) in zip(family.param_names, theta, family.param_domain):
        if not (lo < value < hi):
            raise DomainError(f"{family.name}: {label}={value} not interior")
    a, b = family.truncated_support(theta)
    steps = spec.score_step * (1.0 + np.abs(theta))

    def estimate(n):
        x, w = quad.interval_nodes(a, b, n)
        scores = np.empty((k, x.size))
        for m in range(k):
            up = theta.copy()
            dn = theta.copy()
            up[m] += steps[m]
            dn[m] -= steps[m]
            scores[m] = (
                family.log_density(x, tuple(up)) - family.log_density(x, tuple(dn))
            ) / (2.0 * steps[m])
        p = family.density(x, tuple(theta))
        return np.einsum("i,mi,ni->mn", w * p, scores, scores)

    g = quad.integrate_refining(
        estimate, n0=spec.nodes, tol=spec.tol, max_nodes=spec.max_nodes
    )
    return 0.5 * (g + g.T)


# ---------------------------------------------------------------------------
# product manifolds
# ---------------------------------------------------------------------------


def product_manifold(factors):
    """Block-diagonal metric field over the product of the given factors.

    Coordinates are concatenated factor by factor (interleaved (mu_k,
    sigma_k) pairs for Gaussian factors), so the value is block diagonal and
    every derivative is assembled blockwise with exact zeros off the blocks.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("product_manifold requires at least one factor")
    if len(factors) == 1:
        return factors[0]

    flat = []
    offset = 0
    for f in factors:
        for off, block in f.factor_blocks():
            flat.append((offset + off, block))
        offset += f.dim
    dim = offset
    domain = tuple(iv for f in factors for iv in f.domain)
    names = []
    for i, f in enumerate(factors, start=1):
        names.extend(f"{n}_{i}" for n in f.coord_names)

    def value(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1] + (dim, dim))
        for off, block in flat:
            sl = slice(off, off + block.dim)
            out[..., sl, sl] = block.value(theta[..., sl])
        return out

    def derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((dim, dim, dim))
        for off, block in flat:
            sl = slice(off, off + block.dim)
            out[sl, sl, sl] = block.derivative(theta[sl])
        return out

    def second_derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((dim, dim, dim, dim))
        for off, block in flat:
            sl = slice(off, off + block.dim)
            out[sl, sl, sl, sl] = block.second_derivative(theta[sl])
        return out

    provider = (
        "analytic"
        if all(b.provider == "analytic" for _, b in flat)
        else "finite-difference"
    )
    return MetricField(
        dim=dim,
        value=value,
        derivative=derivative,
        second_derivative=second_derivative,
        provider=provider,
        domain=domain,
        coord_names=tuple(names),
        blocks=tuple(flat),
    )


def euclidean_metric(dim, coord_names=None):
    """Flat identity metric on R^dim (each coordinate its own block)."""

    def block_value(theta):
        theta = np.asarray(theta, dtype=float)
        return np.ones(theta.shape[:-1] + (1, 1))

    def block_derivative(theta):
        return np.zeros((1, 1, 1))

    def block_second(theta):
        return np.zeros((1, 1, 1, 1))

    block = MetricField(
        dim=1,
        value=block_value,
        derivative=block_derivative,
        second_derivative=block_second,
        provider="analytic",
        domain=(_REAL_LINE,),
        coord_names=("x",),
    )
    names = coord_names or tuple(f"x_{i + 1}" for i in range(dim))
    if dim == 1:
        return replace(block, coord_names=tuple(names))

    def value(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1] + (dim, dim))
        idx = np.arange(dim)
        out[..., idx, idx] = 1.0
        return out

    return MetricField(
        dim=dim,
        value=value,
        derivative=lambda theta: np.zeros((dim, dim, dim)),
        second_derivative=lambda theta: np.zeros((dim, dim, dim, dim)),
        provider="analytic",
        domain=tuple(_REAL_LINE for _ in range(dim)),
        coord_names=tuple(names),
        blocks=tuple((i, block) for i in range(dim)),
    )


# ---------------------------------------------------------------------------
# finite-difference provider and coordinate order maps
# ---------------------------------------------------------------------------


def _richardson(coarse, fine):
    return (4.0 * fine - coarse) / 3.0


def finite_difference_metric(metric):
    """Replace a metric field's derivatives by central differences.

    One Richardson extrapolation level on top of second-order central
    differences; steps scale with 1 + |theta| per axis.
    """
    dim = metric.dim
    value = metric.value

    def derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.empty((dim, dim, dim))
        for r in range(dim):
            h = 1e-4 * (1.0 + abs(theta[r]))
            out[r] = _richardson(_central1(value, theta, r, h),
                                 _central1(value, theta, r, 0.5 * h))
        return out

    def second_derivative(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.empty((dim, dim, dim, dim))
        for s in range(dim):
            hs = 1e-3 * (1.0 + abs(theta[s]))
            for r in range(dim):
                hr = 1e-3 * (1.0 + abs(theta[r]))
                if r == s:
                    d = _richardson(_central2(value, theta, r, hr),
                                    _central2(value, theta, r, 0.5 * hr))
                else:
                    d = _richardson(
                        _mixed2(value, theta, s, r, hs, hr),
                        _mixed2(value, theta, s, r, 0.5 * hs, 0.5 * hr),
                    )
                out[s, r] = d
        return out

    return replace(
        metric,
        derivative=derivative,
        second_derivative=second_derivative,
        provider="finite-difference",
        blocks=None,
    )


def _shifted(theta, axis, delta):
    out = np.array(theta, dtype=float)
    out[axis] += delta
    return out


def _central1(f, theta, axis, h):
    return (f(_shifted(theta, axis, h)) - f(_shifted(theta, axis, -h))) / (2.0 * h)


def _central2(f, theta, axis, h):
    return (
        f(_shifted(theta, axis, h)) - 2.0 * f(theta) + f(_shifted(theta, axis, -h))
    ) / (h * h)


def _mixed2(f, theta, ax_a, ax_b, ha, hb):
    pp = f(_shifted(_shifted(theta, ax_a, ha), ax_b, hb))
    pm = f(_shifted(_shifted(theta, ax_a, ha), ax_b, -hb))
    mp = f(_shifted(_shifted(theta, ax_a, -ha), ax_b, hb))
    mm = f(_shifted(_shifted(theta, ax_a, -ha), ax_b, -hb))
    return (pp - pm - mp + mm) / (4.0 * ha * hb)


def index_map(l, order="grouped"):
    """Permutation between interleaved and grouped coordinate orders.

    The native order for l two-parameter factors interleaves pairs
    (mu_1, sigma_1, ..., mu_l, sigma_l).  ``order="grouped"`` returns the
    index array ``p`` with grouped[i] = interleaved[p[i]], i.e. all means
    first, then all sigmas; ``order="interleaved"`` returns the inverse map.
    """
    grouped_from_interleaved = np.concatenate(
        [np.arange(0, 2 * l, 2), np.arange(1, 2 * l, 2)]
    )
    if order == "grouped":
        return grouped_from_interleaved
    if order == "interleaved":
        return np.argsort(grouped_from_interleaved)
    raise ValueError("order must be 'grouped' or 'interleaved'")
