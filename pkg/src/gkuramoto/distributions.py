"""Coupling-strength distributions g(K).

Four families are supported: truncated Gaussian, uniform, truncated
power-law, and empirical (a finite set of strengths, treated as a delta
mixture for analysis integrals and as a histogram density for reporting).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _sciint
from scipy import special

from .errors import UsageError
from ._quadrature import gauss_panel

__all__ = [
    "CouplingDistribution",
    "TruncGaussian",
    "Uniform",
    "TruncPowerLaw",
    "Empirical",
    "distribution_from_dict",
]


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class CouplingDistribution:
    """Interface shared by all g(K) families."""

    def support(self):
        """(lo, hi) bounds of the support."""
        raise NotImplementedError

    def normalization(self):
        """Constant C making the density integrate to one."""
        raise NotImplementedError

    def pdf(self, K):
        raise NotImplementedError

    def sample(self, n, seed=None):
        raise NotImplementedError

    def mean(self):
        return self.expect(lambda K: K)

    def expect(self, f, breakpoints=(), tol=1e-9):
        """Integral of f(K) g(K) dK over the support (adaptive quadrature)."""
        lo, hi = self.support()
        pts = sorted(p for p in breakpoints if lo < p < hi)

        def integrand(K):
            return f(K) * self.pdf(K)

        probe = integrand(np.array([0.5 * (lo + hi)]))[0]
        if np.iscomplexobj(np.asarray(probe)):
            re, ere = _sciint.quad(lambda K: integrand(np.array([K]))[0].real,
                                   lo, hi, points=pts or None, epsabs=tol, limit=200)
            im, eim = _sciint.quad(lambda K: integrand(np.array([K]))[0].imag,
                                   lo, hi, points=pts or None, epsabs=tol, limit=200)
            return re + 1j * im
        val, _ = _sciint.quad(lambda K: integrand(np.array([K]))[0],
                              lo, hi, points=pts or None, epsabs=tol, limit=200)
        return val

    def quad_nodes(self, breakpoints=(), min_nodes=400):
        """Fixed Gauss-Legendre nodes K and weights w with w ~ g(K) dK.

        Panels are split at the given interior breakpoints.  Used for the
        eigenvalue scans and the reduced-field integrator, where the same
        grid is reused for many evaluations.
        """
        lo, hi = self.support()
        pts = [lo] + sorted(p for p in breakpoints if lo < p < hi) + [hi]
        n_panels = len(pts) - 1
        per = max(24, int(np.ceil(min_nodes / n_panels)))
        Ks, ws = [], []
        for a, b in zip(pts[:-1], pts[1:]):
            x, w = gauss_panel(a, b, per)
            Ks.append(x)
            ws.append(w * self.pdf(x))
        return np.concatenate(Ks), np.concatenate(ws)

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class TruncGaussian(CouplingDistribution):
    """Gaussian kernel exp(-(K-Km)^2 / (2 s^2)) truncated to [Ka, 2*Km - Ka]."""

    s: float
    Km: float = 2.0
    Ka: float = 0.01

    def __post_init__(self):
        if self.s <= 0:
            raise UsageError("width s must be positive")
        if not 0 < self.Ka <= self.Km:
            raise UsageError("require 0 < Ka <= Km")

    @property
    def Kb(self):
        # symmetric truncation keeps the mean at Km
        return 2.0 * self.Km - self.Ka

    def support(self):
        return self.Ka, self.Kb

    def normalization(self):
        z = (self.Kb - self.Km) / (np.sqrt(2.0) * self.s)
        area = self.s * np.sqrt(2.0 * np.pi) * 0.5 * (special.erf(z) - special.erf(-z))
        if area <= 0:
            raise UsageError("degenerate support")
        return 1.0 / area

    def pdf(self, K):
        K = np.asarray(K, dtype=float)
        dens = self.normalization() * np.exp(-0.5 * ((K - self.Km) / self.s) ** 2)
        return np.where((K >= self.Ka) & (K <= self.Kb), dens, 0.0)

    def sample(self, n, seed=None):
        if n < 1:
            raise UsageError("need n >= 1")
        rng = _as_rng(seed)
        out = np.empty(n)
        filled = 0
        while filled < n:
            # rejection from the untruncated Gaussian
            draw = rng.normal(self.Km, self.s, size=2 * (n - filled) + 16)
            keep = draw[(draw >= self.Ka) & (draw <= self.Kb)]
            take = min(len(keep), n - filled)
            out[filled:filled + take] = keep[:take]
            filled += take
        return out

    def mean(self):
        return self.Km

    def to_dict(self):
        return {"kind": "trunc_gaussian", "s": self.s, "Km": self.Km, "Ka": self.Ka}


@dataclass(frozen=True)
class Uniform(CouplingDistribution):
    """Flat density on [Km(1-w), Km(1+w)]."""

    w: float
    Km: float = 2.0

    def __post_init__(self):
        if not 0 < self.w <= 1:
            raise UsageError("half-width fraction w must be in (0, 1]")
        if self.Km <= 0:
            raise UsageError("Km must be positive")

    def support(self):
        return self.Km * (1.0 - self.w), self.Km * (1.0 + self.w)

    def normalization(self):
        return 1.0 / (2.0 * self.Km * self.w)

    def pdf(self, K):
        K = np.asarray(K, dtype=float)
        lo, hi = self.support()
        return np.where((K >= lo) & (K <= hi), self.normalization(), 0.0)

    def sample(self, n, seed=None):
        if n < 1:
            raise UsageError("need n >= 1")
        rng = _as_rng(seed)
        lo, hi = self.support()
        return lo + (hi - lo) * rng.random(n)

    def mean(self):
        return self.Km

    def to_dict(self):
        return {"kind": "uniform", "w": self.w, "Km": self.Km}


@dataclass(frozen=True)
class TruncPowerLaw(CouplingDistribution):
    """Density ~ K^(-gamma) on [Ka, Kb]."""

    gamma: float
    Ka: float = 0.01
    Kb: float = 10.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise UsageError("gamma must be positive")
        if not 0 < self.Ka < self.Kb:
            raise UsageError("require 0 < Ka < Kb")

    def support(self):
        return self.Ka, self.Kb

    def normalization(self):
        if self.gamma == 1.0:
            # logarithmic antiderivative branch
            return 1.0 / np.log(self.Kb / self.Ka)
        e = 1.0 - self.gamma
        return e / (self.Kb ** e - self.Ka ** e)

    def pdf(self, K):
        K = np.asarray(K, dtype=float)
        with np.errstate(invalid="ignore"):
            dens = self.normalization() * np.where(K > 0, K, np.nan) ** (-self.gamma)
        return np.where((K >= self.Ka) & (K <= self.Kb), dens, 0.0)

    def cdf(self, K):
        K = np.clip(np.asarray(K, dtype=float), self.Ka, self.Kb)
        if self.gamma == 1.0:
            return np.log(K / self.Ka) / np.log(self.Kb / self.Ka)
        e = 1.0 - self.gamma
        return (K ** e - self.Ka ** e) / (self.Kb ** e - self.Ka ** e)

    def ppf(self, q):
        q = np.asarray(q, dtype=float)
        if self.gamma == 1.0:
            return self.Ka * (self.Kb / self.Ka) ** q
        e = 1.0 - self.gamma
        return (self.Ka ** e + q * (self.Kb ** e - self.Ka ** e)) ** (1.0 / e)

    def sample(self, n, seed=None):
        if n < 1:
            raise UsageError("need n >= 1")
        rng = _as_rng(seed)
        return self.ppf(rng.random(n))

    def to_dict(self):
        return {"kind": "trunc_power_law", "gamma": self.gamma,
                "Ka": self.Ka, "Kb": self.Kb}


@dataclass(frozen=True, eq=False)
class Empirical(CouplingDistribution):
    """Finite strength set {K_i}, treated as the delta mixture (1/N) sum delta(K - K_i).

    pdf() reports a histogram density (for plots); analysis integrals use
    the exact discrete sum via expect()/quad_nodes().
    """

    values: np.ndarray
    hist_range: tuple = (0.0, 9.0)
    bin_width: float = 0.3

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) == 0:
            raise UsageError("need a nonempty 1-D strength vector")
        if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
            raise UsageError("all strengths must be positive and finite")
        object.__setattr__(self, "values", vals)

    def support(self):
        return float(self.values.min()), float(self.values.max())

    def normalization(self):
        return 1.0

    def pdf(self, K):
        K = np.asarray(K, dtype=float)
        lo, hi = self.hist_range
        edges = np.arange(lo, hi + 0.5 * self.bin_width, self.bin_width)
        hist, edges = np.histogram(self.values, bins=edges, density=True)
        idx = np.searchsorted(edges, K, side="right") - 1
        out = np.zeros_like(K, dtype=float)
        ok = (idx >= 0) & (idx < len(hist))
        out[ok] = hist[idx[ok]]
        return out

    def sample(self, n, seed=None):
        if n < 1:
            raise UsageError("need n >= 1")
        if n == len(self.values):
            return self.values.copy()
        rng = _as_rng(seed)
        return rng.choice(self.values, size=n, replace=True)

    def mean(self):
        return float(self.values.mean())

    def expect(self, f, breakpoints=(), tol=1e-9):
        return np.mean(f(self.values))

    def quad_nodes(self, breakpoints=(), min_nodes=400):
        w = np.full(len(self.values), 1.0 / len(self.values))
        return self.values.copy(), w

    def to_dict(self):
        return {"kind": "empirical", "values": self.values.tolist(),
                "hist_range": list(self.hist_range), "bin_width": self.bin_width}


_KINDS = {
    "trunc_gaussian": TruncGaussian,
    "uniform": Uniform,
    "trunc_power_law": TruncPowerLaw,
}


def distribution_from_dict(d):
    """Rebuild a distribution from its to_dict() form."""
    kind = d.get("kind")
    if kind == "empirical":
        return Empirical(np.asarray(d["values"], dtype=float),
                         hist_range=tuple(d.get("hist_range", (0.0, 9.0))),
                         bin_width=d.get("bin_width", 0.3))
    if kind not in _KINDS:
        raise UsageError(f"unknown distribution kind: {kind!r}")
    cls = _KINDS[kind]
    kwargs = {k: v for k, v in d.items() if k != "kind"}
    return cls(**kwargs)
