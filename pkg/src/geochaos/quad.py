"""Gauss-Legendre quadrature helpers.

Nodes and weights come from numpy's Golub-Welsch implementation; the helpers
here map them onto finite intervals, optionally through a log substitution
for half-line coordinates, and refine by node doubling.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=None)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def interval_nodes(a: float, b: float, n: int):
    """Nodes and weights integrating over [a, b] with an n-point rule."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def log_interval_nodes(a: float, b: float, n: int):
    """Nodes and weights for [a, b] with 0 < a < b via the u = log x map.

    The substitution clusters nodes near the lower end, which keeps fixed
    node counts accurate when b/a spans many decades.
    """
    u, w = interval_nodes(np.log(a), np.log(b), n)
    x = np.exp(u)
    return x, w * x


def integrate_refining(evaluate, n0=64, tol=1e-8, max_nodes=8192):
    """Refine ``evaluate(n)`` by doubling n until successive values settle.

    ``evaluate`` maps a node count to an estimate (scalar or ndarray).
    Returns the converged estimate; raises QuadratureError with the last two
    estimates attached if doubling reaches ``max_nodes`` without settling.
    """
    n = n0
    prev = np.asarray(evaluate(n), dtype=float)
    cur = prev
    while n < max_nodes:
        n *= 2
        cur = np.asarray(evaluate(n), dtype=float)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if np.max(np.abs(cur - prev)) < tol * scale:
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not converge below {tol:g} within {max_nodes} nodes",
        last=cur,
        previous=prev,
    )
