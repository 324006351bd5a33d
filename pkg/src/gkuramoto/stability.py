"""Linear stability of stationary states.

Incoherent state: eigenvalues lambda = mu - i nu - i omega satisfy

    cos(beta) = (1/2) INT mu K g(K) / (mu^2 + (K c0 - nu)^2) dK
    sin(beta) = (1/2) INT K g(K) (K c0 - nu) / (mu^2 + (K c0 - nu)^2) dK

and the mu -> 0+ limit of this pair gives the critical offset c0*.

Locked states: the low-dimensional closure a_n = a^n reduces the
linearized dynamics to a 2x2 characteristic determinant

    (1 - J11)(1 - J22) - J12 J21 = 0,   Re(lambda) > 0,

with J integrals built from the stationary coefficient a0(K).
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize

from .errors import UsageError, NumericalError
from .distributions import Empirical
from .selfconsistency import lock_partition
from ._quadrature import gauss_panel, sqrt_panel

__all__ = [
    "IncoherentSpectrum", "LockedKernel", "OAField",
    "critical_c0", "incoherent_modes", "locked_kernel", "char_residual",
    "classify_stability", "oa_evolve", "incoherent_field", "field_from_kernel",
]


class IncoherentSpectrum(NamedTuple):
    mu: float   # growth rate
    nu: float   # rotation (on top of the intrinsic frequency)


# ---------------------------------------------------------------------------
# incoherent state


def _pv_kernel_integral(spec, x):
    """Principal value of INT K g(K)/(K - x) dK over the support.

    Uses K g/(K - x) = g + x g/(K - x) and the standard subtraction
    g(K) -> g(K) - g(x), whose log term is explicit.
    """
    lo, hi = spec.support()
    if not lo < x < hi:
        raise UsageError("PV point must lie inside the support")
    gx = float(spec.pdf(np.array([x]))[0])
    from scipy import integrate as _sciint

    def f(K):
        if abs(K - x) < 1e-12:
            h = 1e-7 * (hi - lo)
            return float((spec.pdf(np.array([min(x + h, hi)]))[0]
                          - spec.pdf(np.array([max(x - h, lo)]))[0]) / (2 * h))
        return float((spec.pdf(np.array([K]))[0] - gx) / (K - x))

    val, _ = _sciint.quad(f, lo, hi, points=[x], limit=200)
    return 1.0 + x * (val + gx * np.log((hi - x) / (x - lo)))


def critical_c0(spec, beta, bracket=(0.0, 3.0), n_scan=240):
    """Critical offset c0* for the incoherent state.

    In the marginal limit the two spectral conditions reduce to a single
    equation for x = nu/c0 inside the support:

        cos(beta) * PV INT K g/(K - x) dK = pi * x * g(x) * sin(beta)

    each solution carries c0 = pi x g(x) / (2 cos beta); the threshold is
    the largest such c0 in the bracket (the incoherent state is unstable
    below it and neutrally stable above).  Returns None when no marginal
    point falls inside the bracket.
    """
    if not 0 <= beta < np.pi / 2:
        raise UsageError("beta must be in [0, pi/2)")
    lo, hi = spec.support()
    eps = 1e-9 * (hi - lo)

    def h(x):
        return (np.cos(beta) * _pv_kernel_integral(spec, x)
                - np.pi * x * float(spec.pdf(np.array([x]))[0]) * np.sin(beta))

    # the marginal point can sit in a logarithmic boundary layer at either
    # support edge, so augment the linear scan with geometric edge refinement
    off = (hi - lo) * np.geomspace(1e-13, 0.1, 40)
    xs = np.unique(np.concatenate([
        np.linspace(lo + eps, hi - eps, n_scan), lo + off, hi - off]))
    hs = np.array([h(x) for x in xs])
    cands = []
    for i in range(len(xs) - 1):
        if np.isfinite(hs[i]) and np.isfinite(hs[i + 1]) and hs[i] * hs[i + 1] < 0:
            x_star = optimize.brentq(h, xs[i], xs[i + 1], xtol=1e-12)
            c0 = np.pi * x_star * float(spec.pdf(np.array([x_star]))[0]) / (2.0 * np.cos(beta))
            if bracket[0] <= c0 <= bracket[1]:
                cands.append(c0)
    if not cands:
        return None
    return max(cands)


def _lorentzian_integrals(spec, c0, mu, nu):
    """The two spectral integrals for the incoherent state (mu > 0).

    The Lorentzian peak at K = nu/c0 (width mu/c0) gets a tangent
    substitution; the rest of the support uses plain panels.
    """
    lo, hi = spec.support()
    if isinstance(spec, Empirical):
        K = spec.values
        den = mu * mu + (K * c0 - nu) ** 2
        return (0.5 * np.mean(mu * K / den), 0.5 * np.mean(K * (K * c0 - nu) / den))
    x = nu / c0
    delta = 50.0 * mu / c0
    a, b = max(lo, x - delta), min(hi, x + delta)
    nodes, weights = [], []
    if a < b and b > lo and a < hi:
        # peak region: K = x + (mu/c0) tan(psi)
        plo = np.arctan(c0 * (a - x) / mu)
        phi_ = np.arctan(c0 * (b - x) / mu)
        psi, wp = gauss_panel(plo, phi_, 64)
        Kp = x + (mu / c0) * np.tan(psi)
        nodes.append(Kp)
        weights.append(wp * (mu / c0) / np.cos(psi) ** 2)
    for p, q in ((lo, a), (b, hi)):
        if q > p:
            Ko, wo = gauss_panel(p, q, 48)
            nodes.append(Ko)
            weights.append(wo)
    K = np.concatenate(nodes)
    w = np.concatenate(weights) * spec.pdf(K)
    den = mu * mu + (K * c0 - nu) ** 2
    I1 = 0.5 * np.sum(w * mu * K / den)
    I2 = 0.5 * np.sum(w * K * (K * c0 - nu) / den)
    return I1, I2


def incoherent_modes(spec, c0, beta, mu_seeds=None, nu_seeds=None):
    """Growing modes (mu > 0, nu) of the incoherent state; empty list if stable."""
    if c0 <= 0:
        raise UsageError("c0 must be positive")
    lo, hi = spec.support()
    if mu_seeds is None:
        mu_seeds = np.array([1e-5, 3e-4, 3e-3, 3e-2, 0.3, 1.0]) * max(c0 * hi, 1.0)
    if nu_seeds is None:
        # interior seeds plus boundary layers at the support edges, where
        # weakly growing modes concentrate near threshold
        off = c0 * (hi - lo) * np.array([1e-7, 1e-5, 1e-3])
        nu_seeds = np.concatenate([
            np.linspace(lo * c0, hi * c0, 9)[1:-1],
            lo * c0 + off, hi * c0 - off])

    def F(x):
        mu, nu = x
        I1, I2 = _lorentzian_integrals(spec, c0, max(mu, 1e-12), nu)
        return [np.cos(beta) - I1, np.sin(beta) - I2]

    found = []
    for m0 in mu_seeds:
        for n0 in nu_seeds:
            sol = optimize.least_squares(
                F, [m0, n0], bounds=([1e-12, lo * c0 - c0 * (hi - lo)],
                                     [10.0 * max(c0 * hi, 1.0), hi * c0 + c0 * (hi - lo)]),
                xtol=3e-16, ftol=3e-16, gtol=1e-14, max_nfev=120)
        # accept only genuine zeros with positive growth
            mu, nu = sol.x
            if mu <= 1e-6:
                continue
            res = F([mu, nu])
            if np.hypot(*res) > 1e-8:
                continue
            if any(np.hypot(mu - m, 0.1 * (nu - n)) < 1e-5 for m, n in found):
                continue
            found.append((mu, nu))
    return [IncoherentSpectrum(m, n) for m, n in sorted(found, key=lambda t: -t[0])]


# ---------------------------------------------------------------------------
# locked states


@dataclass
class LockedKernel:
    """Stationary closure coefficient and linearization data on a K grid."""

    K: np.ndarray        # quadrature nodes (or the empirical strengths)
    w: np.ndarray        # weights incl. g(K) (or 1/N)
    a0: np.ndarray       # stationary coefficient, |a0| = 1 on the locked set
    m11: np.ndarray
    q11: np.ndarray
    q12: np.ndarray
    r0: float
    delta0: float
    c0: float
    beta: float

    def reconstructed_r(self):
        """Order parameter rebuilt from a0; must equal r0 (identity check)."""
        return np.sum(self.w * np.conj(self.a0))


def _a0_m11(K, r0, delta0, c0, beta):
    Z = delta0 + K * c0
    locked = K * r0 > np.abs(Z)
    a0 = np.empty(len(K), dtype=complex)
    m11 = np.empty(len(K), dtype=complex)
    eb = np.exp(-1j * beta)
    Kl, Zl = K[locked], Z[locked]
    root_l = np.sqrt(np.maximum(Kl ** 2 * r0 ** 2 - Zl ** 2, 0.0))
    a0[locked] = (-1j * Zl + root_l) / (Kl * r0 * eb)
    m11[locked] = -root_l
    Kd, Zd = K[~locked], Z[~locked]
    root_d = np.sqrt(np.maximum(Zd ** 2 - Kd ** 2 * r0 ** 2, 0.0))
    a0[~locked] = (-1j * Zd + 1j * np.sign(Zd) * root_d) / (Kd * r0 * eb)
    m11[~locked] = -1j * np.sign(Zd) * root_d
    return a0, m11


def locked_kernel(state, spec, nodes_per_panel=80):
    """Linearization kernel of a locked stationary state.

    Positive square-root branch on the locked set, sign(Z) branch on the
    drifting set; m11 is real <= 0 on the locked set and pure imaginary on
    the drifting set.
    """
    if not state.r > 0:
        raise UsageError("locked_kernel needs a state with r > 0")
    if state.residual_norm > 1e-6:
        raise UsageError("state residual too large; not a stationary state")
    r0, d0, c0, beta = state.r, state.delta, state.c0, state.beta
    if isinstance(spec, Empirical):
        K = spec.values.astype(float)
        w = np.full(len(K), 1.0 / len(K))
    else:
        part = lock_partition(r0, d0, c0, spec.support())
        Ks, ws = [], []
        for a, b in sorted(part.locked + part.drifting):
            x, wx = sqrt_panel(a, b, nodes_per_panel)
            Ks.append(x)
            ws.append(wx * spec.pdf(x))
        K = np.concatenate(Ks)
        w = np.concatenate(ws)
    a0, m11 = _a0_m11(K, r0, d0, c0, beta)
    q11 = K * np.exp(1j * beta) / 2.0
    q12 = -K * np.exp(-1j * beta) * a0 ** 2 / 2.0
    return LockedKernel(K, w, a0, m11, q11, q12, r0, d0, c0, beta)


def char_residual(lam, kernel):
    """Characteristic determinant (1-J11)(1-J22) - J12 J21 at Re(lam) > 0.

    Vectorized over lam; tends to 1 as |lam| -> infinity.
    """
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam.real <= 0):
        raise UsageError("char_residual requires Re(lambda) > 0")
    L = lam[..., None]
    wk = kernel.w
    J11 = np.sum(wk * kernel.q11 / (L - kernel.m11), axis=-1)
    J12 = np.sum(wk * kernel.q12 / (L - kernel.m11), axis=-1)
    J21 = np.sum(wk * np.conj(kernel.q12) / (L - np.conj(kernel.m11)), axis=-1)
    J22 = np.sum(wk * np.conj(kernel.q11) / (L - np.conj(kernel.m11)), axis=-1)
    out = (1.0 - J11) * (1.0 - J22) - J12 * J21
    return out if out.shape else complex(out)


@dataclass
class EigenSearch:
    """Right half-plane scan region and grid for the eigenvalue search."""

    eps: float = 1e-4
    lam_max: Optional[float] = None   # defaults to 2 max(K) (1 + c0)
    omega_max: Optional[float] = None
    n_re: int = 40
    n_im: int = 80
    newton_tol: float = 1e-10


def _polish_zero(kernel, lam0, tol, n_iter=60):
    lam = lam0
    for _ in range(n_iter):
        d = char_residual(lam, kernel)
        if abs(d) < tol:
            return lam
        h = 1e-7 * (1.0 + abs(lam))
        if lam.real - h <= 0:
            h = 0.5 * lam.real
        dp = (char_residual(lam + h, kernel) - char_residual(lam - h, kernel)) / (2 * h)
        if dp == 0:
            return None
        step = d / dp
        new = lam - step
        if new.real <= 0:
            new = complex(max(lam.real / 2, 1e-12), new.imag)
        if abs(new - lam) < 1e-14 * (1 + abs(lam)):
            lam = new
            break
        lam = new
    return lam if abs(char_residual(lam, kernel)) < tol else None


def classify_stability(state, spec, search=None):
    """Stability verdict for a stationary state.

    Incoherent states dispatch to the mu > 0 mode search; locked states
    scan the right half-plane for characteristic-equation zeros.  Returns
    'unstable' or 'at_least_neutrally_stable' (for fully locked states the
    latter means linearly stable).
    """
    if search is None:
        search = EigenSearch()
    if state.classification == "incoherent":
        modes = incoherent_modes(spec, state.c0, state.beta) if state.c0 > 0 else []
        return "unstable" if modes else "at_least_neutrally_stable"

    kernel = locked_kernel(state, spec)
    Kmax = spec.support()[1]
    lam_max = search.lam_max or 2.0 * Kmax * (1.0 + state.c0)
    om_max = search.omega_max or 2.0 * Kmax * (1.0 + state.c0)
    re = np.geomspace(search.eps, lam_max, search.n_re)
    # conjugate symmetry: D(conj(lam)) = conj(D(lam)), scan Im >= 0 only
    im = np.linspace(0.0, om_max, search.n_im // 2)
    L = re[:, None] + 1j * im[None, :]
    D = np.abs(char_residual(L.ravel(), kernel)).reshape(L.shape)
    # polish from the most promising grid points
    order = np.argsort(D.ravel())[:25]
    for flat in order:
        lam0 = L.ravel()[flat]
        lam = _polish_zero(kernel, lam0, search.newton_tol)
        if lam is not None and lam.real > search.eps and abs(lam.imag) <= 1.5 * om_max:
            return "unstable"
    return "at_least_neutrally_stable"


# ---------------------------------------------------------------------------
# reduced-field integrator


@dataclass
class OAField:
    """Closure coefficient a(K, t) sampled on a fixed quadrature grid."""

    K: np.ndarray
    w: np.ndarray       # weights incl. g(K); sum(w) ~ 1
    a: np.ndarray       # complex coefficients
    t: float = 0.0


def incoherent_field(spec, min_nodes=400, perturbation=0.0, seed=None):
    """Uniformly incoherent field a = 0, optionally with a small kick."""
    K, w = spec.quad_nodes(min_nodes=min_nodes)
    a = np.zeros(len(K), dtype=complex)
    if perturbation:
        rng = np.random.default_rng(seed)
        a = perturbation * np.exp(1j * rng.uniform(0, 2 * np.pi, len(K)))
    return OAField(K, w, a, 0.0)


def field_from_kernel(kernel):
    """Field initialized at the stationary coefficient of a locked state."""
    return OAField(kernel.K.copy(), kernel.w.copy(), kernel.a0.copy(), 0.0)


def oa_evolve(spec, c0, beta, omega, init, run):
    """Integrate the reduced field and return (t, r(t), final field).

    da/dt = -i(omega + K c0) a + (K/2)[conj(z) e^{i beta} - z e^{-i beta} a^2],
    z = sum w conj(a).  Raises if the closure constraint |a| <= 1 breaks.
    """
    K, w = init.K, init.w
    a = init.a.astype(complex).copy()
    eb = np.exp(1j * beta)

    def deriv(a):
        z = np.sum(w * np.conj(a))
        return -1j * (omega + K * c0) * a + 0.5 * K * (np.conj(z) * eb - z * np.conj(eb) * a * a)

    n_steps = int(round(run.duration / run.dt))
    stride = run.record_stride
    ts, rs = [], []
    for step in range(n_steps + 1):
        if step % stride == 0:
            z = np.sum(w * np.conj(a))
            ts.append(init.t + step * run.dt)
            rs.append(abs(z))
        if step == n_steps:
            break
        k1 = deriv(a)
        k2 = deriv(a + 0.5 * run.dt * k1)
        k3 = deriv(a + 0.5 * run.dt * k2)
        k4 = deriv(a + run.dt * k3)
        a = a + (run.dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        mag = np.abs(a)
        if np.any(mag > 1.0 + 1e-6):
            raise NumericalError("closure constraint |a| <= 1 violated")
        over = mag > 1.0
        if np.any(over):
            a[over] /= mag[over]
    return np.array(ts), np.array(rs), OAField(K, w, a, init.t + n_steps * run.dt)
