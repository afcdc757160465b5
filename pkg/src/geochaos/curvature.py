"""Connection coefficients, curvature tensors, and curvature indicators.

Conventions: ``christoffel(metric, theta)[r, m, n] = Gamma^r_mn`` and

    R^m_nrs = d_r Gamma^m_ns - d_s Gamma^m_nr
              + Gamma^m_rl Gamma^l_ns - Gamma^m_sl Gamma^l_nr,

with the Ricci tensor contracted on the first and third slots and the scalar
by a further inverse-metric contraction.  The scalar equals the sum of
sectional curvatures over ordered pairs of g-orthonormalized coordinate
directions; a negative scalar flags expanding directions of the geodesic
flow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMetricError


@dataclass(frozen=True)
class CurvatureReport:
    """Curvature data of a metric field at a single point."""

    point: np.ndarray
    christoffel: np.ndarray  # Gamma[r, m, n]
    riemann: np.ndarray  # R[m, n, r, s] = R^m_nrs
    ricci: np.ndarray
    scalar: float
    sectional: np.ndarray  # K[r, s] over orthonormalized coordinate planes

    def to_dict(self):
        return {
            "point": self.point.tolist(),
            "christoffel": self.christoffel.tolist(),
            "riemann": self.riemann.tolist(),
            "ricci": self.ricci.tolist(),
            "scalar": self.scalar,
            "sectional": self.sectional.tolist(),
        }


def _inverse(metric, theta):
    g = metric.value(theta)
    try:
        inv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError(f"metric singular at {np.asarray(theta).tolist()}") from exc
    if not np.all(np.isfinite(inv)):
        raise SingularMetricError(f"metric inverse not finite at {np.asarray(theta).tolist()}")
    return g, inv


def christoffel(metric, theta):
    """Gamma^r_mn = 1/2 g^rl (d_m g_ln + d_n g_lm - d_l g_mn)."""
    theta = np.asarray(theta, dtype=float)
    _, ginv = _inverse(metric, theta)
    d = metric.derivative(theta)  # d[r, m, n] = d_r g_mn
    # s[l, m, n] = d_m g_ln + d_n g_lm - d_l g_mn
    s = np.einsum("mln->lmn", d) + np.einsum("nlm->lmn", d) - d
    return 0.5 * np.einsum("rl,lmn->rmn", ginv, s)


def _christoffel_and_gradient(metric, theta):
    """Gamma and its coordinate gradient dGamma[s, r, m, n] = d_s Gamma^r_mn."""
    theta = np.asarray(theta, dtype=float)
    _, ginv = _inverse(metric, theta)
    d = metric.derivative(theta)
    dd = metric.second_derivative(theta)  # dd[s, r, m, n] = d_s d_r g_mn
    s = np.einsum("mln->lmn", d) + np.einsum("nlm->lmn", d) - d
    gamma = 0.5 * np.einsum("rl,lmn->rmn", ginv, s)
    # d_s g^rl = -g^ra (d_s g_ab) g^bl
    dginv = -np.einsum("ra,sab,bl->srl", ginv, d, ginv)
    ds = (
        np.einsum("smln->slmn", dd)
        + np.einsum("snlm->slmn", dd)
        - np.einsum("slmn->slmn", dd)
    )
    dgamma = 0.5 * np.einsum("srl,lmn->srmn", dginv, s) + 0.5 * np.einsum(
        "rl,slmn->srmn", ginv, ds
    )
    return gamma, dgamma


def riemann_tensor(metric, theta):
    """R^m_nrs at ``theta`` (mixed, first index raised)."""
    gamma, dgamma = _christoffel_and_gradient(metric, theta)
    quad_term = np.einsum("mrl,lns->mnrs", gamma, gamma)
    r = (
        np.einsum("rmns->mnrs", dgamma)
        - np.einsum("smnr->mnrs", dgamma)
        + quad_term
        - np.einsum("mnrs->mnsr", quad_term)
    )
    return r


def _orthonormal_coordinate_frame(g):
    """Gram-Schmidt of the coordinate directions under the inner product g.

    Returns e with rows e[i] the orthonormalized directions, processed in
    index order so the result is deterministic.
    """
    dim = g.shape[0]
    e = np.zeros((dim, dim))
    for i in range(dim):
        v = np.zeros(dim)
        v[i] = 1.0
        for j in range(i):
            v = v - (e[j] @ g @ v) * e[j]
        norm2 = v @ g @ v
        if not norm2 > 0:
            raise SingularMetricError("metric not positive definite in Gram-Schmidt")
        e[i] = v / np.sqrt(norm2)
    return e


def riemann_ricci_scalar(metric, theta):
    """Full curvature report: Riemann, Ricci, scalar, and sectional matrix."""
    theta = np.asarray(theta, dtype=float)
    g, ginv = _inverse(metric, theta)
    gamma, dgamma = _christoffel_and_gradient(metric, theta)
    quad_term = np.einsum("mrl,lns->mnrs", gamma, gamma)
    riem = (
        np.einsum("rmns->mnrs", dgamma)
        - np.einsum("smnr->mnrs", dgamma)
        + quad_term
        - np.einsum("mnrs->mnsr", quad_term)
    )
    ricci = np.einsum("mnms->ns", riem)
    scalar = float(np.einsum("ns,ns->", ginv, ricci))
    lowered = np.einsum("ml,lnrs->mnrs", g, riem)
    frame = _orthonormal_coordinate_frame(g)
    dim = metric.dim
    sectional = np.zeros((dim, dim))
    for r in range(dim):
        for s in range(dim):
            if r == s:
                continue
            sectional[r, s] = np.einsum(
                "mnrs,m,n,r,s->", lowered, frame[r], frame[s], frame[r], frame[s]
            )
    return CurvatureReport(
        point=theta,
        christoffel=gamma,
        riemann=riem,
        ricci=ricci,
        scalar=scalar,
        sectional=sectional,
    )


def sectional_curvature(metric, theta, rho, sigma):
    """Sectional curvature of the plane spanned by coordinate axes rho, sigma.

    The axes are orthonormalized against g at ``theta`` by Gram-Schmidt in
    index order before evaluating K = R(e_rho, e_sigma, e_rho, e_sigma).
    """
    if rho == sigma:
        raise ValueError("sectional curvature needs two distinct axes")
    report = riemann_ricci_scalar(metric, np.asarray(theta, dtype=float))
    return float(report.sectional[rho, sigma])
