"""Gauss-Legendre panel quadrature with square-root edge substitutions.

The analysis integrals contain terms like sqrt(K**2 r**2 - Z(K)**2) that
vanish like sqrt(K - K_edge) at locking boundaries.  Substituting
K = edge +/- u**2 restores smoothness, so plain Gauss-Legendre nodes on
the transformed variable converge at spectral rate.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def gauss_panel(a, b, n):
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def sqrt_panel(a, b, n, singular_left=True, singular_right=True):
    """Nodes/weights on [a, b] regularizing sqrt singularities at the ends.

    Splits at the midpoint; on each half with a flagged singular end the
    variable change K = end -/+ u**2 is applied.  Returns (nodes, weights)
    such that sum(w * f(nodes)) approximates the integral of f over [a, b].
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    m = 0.5 * (a + b)
    nodes, weights = [], []
    # left half [a, m]
    if singular_left:
        u, wu = gauss_panel(0.0, np.sqrt(m - a), n)
        nodes.append(a + u * u)
        weights.append(2.0 * u * wu)
    else:
        x, w = gauss_panel(a, m, n)
        nodes.append(x)
        weights.append(w)
    # right half [m, b]
    if singular_right:
        u, wu = gauss_panel(0.0, np.sqrt(b - m), n)
        nodes.append(b - u * u)
        weights.append(2.0 * u * wu)
    else:
        x, w = gauss_panel(m, b, n)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)
