"""Stationary states (r, Delta) of the mean-field model.

A stationary state rotating at common frequency Omega = omega - Delta
satisfies

    r^2 e^{i beta} = i INT_tot g Z / K
                     + INT_locked g sqrt(K^2 r^2 - Z^2) / K
                     - i INT_drift g sign(Z) sqrt(Z^2 - K^2 r^2) / K

with Z(K) = Delta + K c0.  Oscillators with K r > |Z| are phase-locked,
the rest drift.  The total-range and drifting integrals are combined here
so the integrand stays finite when the support reaches K = 0.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import UsageError
from .distributions import Empirical
from ._quadrature import sqrt_panel

__all__ = ["LockPartition", "StationaryState", "lock_partition", "residual",
           "find_states", "boundary_c0"]

_DEDUP_TOL = 1e-4
_ROOT_TOL = 1e-8


@dataclass
class LockPartition:
    """Disjoint K-intervals of locked and drifting oscillators."""

    locked: list
    drifting: list
    support: tuple

    def is_locked(self, K, r, delta, c0):
        K = np.asarray(K, dtype=float)
        return K * r > np.abs(delta + K * c0)

    def locked_measure(self):
        return sum(b - a for a, b in self.locked)

    def drifting_measure(self):
        return sum(b - a for a, b in self.drifting)

    def total_measure(self):
        return self.support[1] - self.support[0]


def lock_partition(r, delta, c0, support):
    """Exact interval arithmetic for the locked/drifting split.

    Boundaries solve K r = +/-(delta + K c0), i.e. K = delta/(r - c0) and
    K = -delta/(r + c0) where defined, clipped to the support.
    """
    if r < 0:
        raise UsageError("r must be >= 0")
    lo, hi = support
    if r == 0.0:
        return LockPartition([], [(lo, hi)], (lo, hi))
    cuts = set()
    if not np.isclose(r, c0):
        K1 = delta / (r - c0)
        if lo < K1 < hi:
            cuts.add(K1)
    if r + c0 > 0:
        K2 = -delta / (r + c0)
        if lo < K2 < hi:
            cuts.add(K2)
    pts = [lo] + sorted(cuts) + [hi]
    locked, drifting = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        m = 0.5 * (a + b)
        if m * r > abs(delta + m * c0):
            locked.append((a, b))
        else:
            drifting.append((a, b))
    return LockPartition(locked, drifting, (lo, hi))


def _branch_values(K, r, delta, c0):
    """Pointwise integrand of the self-consistency right-hand side, over g(K) dK.

    Locked branch:   (i Z + sqrt(K^2 r^2 - Z^2)) / K
    Drifting branch: i (Z - sign(Z) sqrt(Z^2 - K^2 r^2)) / K
    The drifting form vanishes as K -> 0, so no 1/K blow-up at a support
    edge touching zero.
    """
    K = np.asarray(K, dtype=float)
    Z = delta + K * c0
    locked = K * r > np.abs(Z)
    out = np.empty(K.shape, dtype=complex)
    Kl, Zl = K[locked], Z[locked]
    out[locked] = (1j * Zl + np.sqrt(np.maximum(Kl ** 2 * r ** 2 - Zl ** 2, 0.0))) / Kl
    Kd, Zd = K[~locked], Z[~locked]
    root = np.sqrt(np.maximum(Zd ** 2 - Kd ** 2 * r ** 2, 0.0))
    out[~locked] = 1j * (Zd - np.sign(Zd) * root) / Kd
    return out


def residual(r, delta, spec, c0, beta, nodes_per_panel=24):
    """Self-consistency defect RHS(r, Delta) - r^2 e^{i beta} (complex).

    For Empirical specs the integrals are exact discrete sums over the
    strength set; otherwise each locked/drifting interval gets its own
    quadrature panel with sqrt-regularized ends.
    """
    if not 0 <= r:
        raise UsageError("r must be >= 0")
    target = r ** 2 * np.exp(1j * beta)
    if isinstance(spec, Empirical):
        return np.mean(_branch_values(spec.values, r, delta, c0)) - target
    part = lock_partition(r, delta, c0, spec.support())
    total = 0.0 + 0.0j
    for a, b in part.locked + part.drifting:
        K, w = sqrt_panel(a, b, nodes_per_panel)
        total += np.sum(w * spec.pdf(K) * _branch_values(K, r, delta, c0))
    return total - target


@dataclass
class StationaryState:
    """A root of the self-consistency equation with its classification."""

    r: float
    delta: float
    c0: float
    beta: float
    partition: LockPartition
    classification: str          # 'incoherent' | 'partially_locked' | 'fully_locked'
    residual_norm: float
    stability: str = "unknown"   # set by the stability module

    @property
    def is_incoherent(self):
        return self.classification == "incoherent"


def make_state(spec, r, delta, c0, beta):
    """Build a StationaryState (partition + classification) at a given root."""
    if isinstance(spec, Empirical):
        lo, hi = spec.support()
        part = lock_partition(r, delta, c0, (lo, hi + 1e-12))
        res = residual(r, delta, spec, c0, beta)
        if r == 0.0:
            cls = "incoherent"
        else:
            locked = spec.values * r > np.abs(delta + spec.values * c0)
            cls = "fully_locked" if locked.all() else "partially_locked"
        return StationaryState(r, delta, c0, beta, part, cls, abs(res))
    part = lock_partition(r, delta, c0, spec.support())
    res = residual(r, delta, spec, c0, beta)
    if r == 0.0:
        cls = "incoherent"
    elif part.drifting_measure() < 1e-9 * part.total_measure():
        cls = "fully_locked"
    else:
        cls = "partially_locked"
    return StationaryState(r, delta, c0, beta, part, cls, abs(res))


def find_states(spec, c0, beta, r_subdivisions=50, delta_seeds=3):
    """All stationary states found from a subdivided (r, Delta) seed grid.

    The incoherent r = 0 state (an exact root for any Delta) is always
    included.  Nontrivial roots are deduplicated and must satisfy
    |residual| < 1e-8.
    """
    if r_subdivisions < 10:
        raise UsageError("need r_subdivisions >= 10")
    lo, hi = spec.support()
    Kmax = hi
    dlo, dhi = -Kmax * (c0 + 1.0), Kmax

    def F(x):
        v = residual(x[0], x[1], spec, c0, beta)
        return [v.real, v.imag]

    # coarse |residual| landscape: one row per r-subinterval midpoint.
    # The Delta axis is sinh-spaced: fully locked branches pin Delta within
    # ~ K_lo of zero while drifting branches can push it to -K_hi*(c0+1).
    edges = np.linspace(0.0, 1.0, r_subdivisions + 1)
    r_grid = 0.5 * (edges[:-1] + edges[1:])
    n_d = max(41, 8 * delta_seeds)
    u_lo, u_hi = np.arcsinh(dlo / 0.05), np.arcsinh(dhi / 0.05)
    d_grid = 0.05 * np.sinh(np.linspace(u_lo, u_hi, n_d))
    land = np.empty((len(r_grid), len(d_grid)))
    for i, r0 in enumerate(r_grid):
        for j, d0 in enumerate(d_grid):
            land[i, j] = abs(residual(r0, d0, spec, c0, beta))

    # seeds: per-row best Delta values plus 2-D local minima of the landscape
    seeds = []
    for i, r0 in enumerate(r_grid):
        order = np.argsort(land[i])[:delta_seeds]
        seeds.extend((r0, d_grid[j]) for j in order)
    interior = land[1:-1, 1:-1]
    is_min = np.ones_like(interior, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            is_min &= interior <= land[1 + di:len(r_grid) - 1 + di,
                                       1 + dj:len(d_grid) - 1 + dj]
    seeds.extend((r_grid[i + 1], d_grid[j + 1]) for i, j in zip(*np.where(is_min)))

    roots = []
    for r0, d0 in seeds:
        if abs(residual(r0, d0, spec, c0, beta)) > 0.5:
            continue
        sol = optimize.least_squares(
            F, [r0, d0], bounds=([0.0, dlo], [1.0, dhi]),
            xtol=3e-16, ftol=3e-16, gtol=1e-14, max_nfev=120)
        r, d = sol.x
        if not r > 1e-3:
            continue
        if abs(residual(r, d, spec, c0, beta)) > _ROOT_TOL:
            continue
        if any(np.hypot(r - rr, 0.1 * (d - dd)) < _DEDUP_TOL for rr, dd in roots):
            continue
        roots.append((r, d))

    states = [make_state(spec, 0.0, 0.0, c0, beta)]
    for r, d in sorted(roots, key=lambda t: -t[0]):
        states.append(make_state(spec, r, d, c0, beta))
    return states


def boundary_c0(spec, beta, level, bracket, side, tol=1e-3, coarse=16, **fs_kw):
    """Level boundary of the stationary branches along c0.

    side='upper': largest c0 in the bracket with some root r >= level
    (None if that still holds at the bracket top).  side='lower': smallest
    c0 whose largest root has r <= level (None if never).  Located by
    coarse scan plus bisection on find_states output.
    """
    if not 0 < level < 1:
        raise UsageError("level must be in (0, 1)")
    a, b = bracket

    def max_root(c0):
        return max(s.r for s in find_states(spec, c0, beta, **fs_kw))

    if side == "upper":
        pred = lambda c0: max_root(c0) >= level
    elif side == "lower":
        pred = lambda c0: max_root(c0) <= level
    else:
        raise UsageError("side must be 'upper' or 'lower'")

    grid = np.linspace(a, b, coarse)
    vals = [pred(c) for c in grid]
    if side == "upper":
        if vals[-1]:
            return None
        if not vals[0]:
            return None
        # last True before the first False
        idx = max(i for i, v in enumerate(vals) if v)
        lo_c, hi_c = grid[idx], grid[idx + 1]
        while hi_c - lo_c > tol:
            m = 0.5 * (lo_c + hi_c)
            if pred(m):
                lo_c = m
            else:
                hi_c = m
        return 0.5 * (lo_c + hi_c)
    else:
        if not any(vals):
            return None
        idx = min(i for i, v in enumerate(vals) if v)
        if idx == 0:
            return grid[0]
        lo_c, hi_c = grid[idx - 1], grid[idx]
        while hi_c - lo_c > tol:
            m = 0.5 * (lo_c + hi_c)
            if pred(m):
                hi_c = m
            else:
                lo_c = m
        return 0.5 * (lo_c + hi_c)
