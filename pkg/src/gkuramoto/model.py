"""Direct integration of the N-oscillator model and order-parameter measurement.

Mean-field form:   dtheta_i/dt = omega + (K_i/N) sum_j [c0 + sin(theta_j - theta_i - beta)]
Network form:      dtheta_i/dt = omega + sum_j W_ij [c0 + sin(theta_j - theta_i - beta)]

The mean-field right-hand side is evaluated in O(N) through the complex
order parameter, which is algebraically identical to the double sum.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from .errors import UsageError, NumericalError
from . import _kernels

TWO_PI = 2.0 * np.pi

__all__ = [
    "PhaseState", "CouplingParams", "MeanField", "Network", "OrderParameter",
    "RunConfig", "SimResult", "order_parameter", "mean_field_rhs",
    "network_rhs", "rk4_step", "simulate", "random_phases",
]


@dataclass
class CouplingParams:
    """Coupling-function parameters: intrinsic frequency, offset, phase lag."""

    omega: float = np.pi
    c0: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.c0 < 0:
            raise UsageError(f"c0 must be >= 0, got {self.c0}")
        if not 0 <= self.beta < np.pi / 2:
            raise UsageError(f"beta must be in [0, pi/2), got {self.beta}")


@dataclass
class PhaseState:
    """N oscillator phases (wrapped to [0, 2*pi)) and the simulation clock."""

    phases: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        if self.phases.ndim != 1 or len(self.phases) < 2:
            raise UsageError("need a 1-D phase vector with N >= 2")
        if not np.all(np.isfinite(self.phases)):
            raise UsageError("phases must be finite")
        self.phases = np.mod(self.phases, TWO_PI)

    @property
    def n(self):
        return len(self.phases)


class OrderParameter(NamedTuple):
    r: float
    theta_big: float


@dataclass
class MeanField:
    """All-to-all ensemble with per-oscillator total strengths K_i."""

    K: np.ndarray

    def __post_init__(self):
        self.K = np.asarray(self.K, dtype=float)
        if np.any(self.K <= 0):
            raise UsageError("all strengths K_i must be positive")

    @property
    def n(self):
        return len(self.K)

    @property
    def strengths(self):
        return self.K


@dataclass
class Network:
    """Sparse weighted ensemble; row sums give the total strengths K_i."""

    W: sp.spmatrix

    def __post_init__(self):
        W = sp.csr_matrix(self.W)
        if W.shape[0] != W.shape[1]:
            raise UsageError("weight matrix must be square")
        if W.diagonal().any():
            raise UsageError("self-weights W_ii must be zero")
        if (W.data < 0).any():
            raise UsageError("weights must be nonnegative")
        self.W = W

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def strengths(self):
        return np.asarray(self.W.sum(axis=1)).ravel()


@dataclass
class RunConfig:
    """Integration parameters for a single run."""

    duration: float
    dt: float = 0.01
    transient: float = 0.0
    seed: Optional[int] = None
    record_stride: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise UsageError("dt must be positive")
        if not self.duration > self.transient >= 0:
            raise UsageError("need duration > transient >= 0")
        if self.record_stride < 1:
            raise UsageError("record_stride must be >= 1")


class SimResult(NamedTuple):
    t: np.ndarray          # recorded sample times
    r: np.ndarray          # r(t) at the sample times
    theta_big: np.ndarray  # Theta(t) at the sample times
    final_state: "PhaseState"
    R: float               # time average of r over [transient, duration]
    r_std: float           # std of r over the same window


def order_parameter(phases):
    """Magnitude and mean phase of the complex average of unit phasors."""
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise UsageError("empty phase vector")
    if not np.all(np.isfinite(phases)):
        raise UsageError("phases must be finite")
    z = np.exp(1j * phases).mean()
    return OrderParameter(min(abs(z), 1.0), float(np.angle(z)))


def mean_field_rhs(state, params, K):
    """O(N) derivative of the mean-field model via the order parameter."""
    phases = state.phases if isinstance(state, PhaseState) else np.asarray(state, float)
    K = np.asarray(K, dtype=float)
    if len(K) != len(phases):
        raise UsageError("K and phases must have equal length")
    r, big = order_parameter(phases)
    return params.omega + K * (params.c0 + r * np.sin(big - phases - params.beta))


def network_rhs(state, params, W):
    """Derivative of the network model; cost proportional to the nonzeros of W."""
    phases = state.phases if isinstance(state, PhaseState) else np.asarray(state, float)
    W = sp.csr_matrix(W)
    if W.shape != (len(phases), len(phases)):
        raise UsageError("W must be N x N for N phases")
    u = W @ np.exp(1j * phases)
    Krow = np.asarray(W.sum(axis=1)).ravel()
    return params.omega + params.c0 * Krow + np.imag(u * np.exp(-1j * (phases + params.beta)))


def rk4_step(state, rhs, dt):
    """One classic Runge-Kutta step; wraps phases and advances the clock."""
    if dt <= 0:
        raise UsageError("dt must be positive")
    th = state.phases
    k1 = rhs(th)
    k2 = rhs(th + 0.5 * dt * k1)
    k3 = rhs(th + 0.5 * dt * k2)
    k4 = rhs(th + dt * k3)
    new = th + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(new)):
        raise NumericalError(f"non-finite derivative in rk4_step at t={state.t:g}")
    return PhaseState(np.mod(new, TWO_PI), state.t + dt)


def random_phases(n, seed=None):
    """Incoherent initial condition: i.i.d. uniform phases on [0, 2*pi)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return PhaseState(rng.uniform(0.0, TWO_PI, n), 0.0)


def _run_reference(ensemble, params, init, run, n_steps):
    """Pure-numpy integration loop (reference path, used for cross-checks)."""
    if isinstance(ensemble, MeanField):
        rhs = lambda th: mean_field_rhs(th, params, ensemble.K)
    else:
        W = ensemble.W
        Krow = ensemble.strengths
        eb = np.exp(-1j * params.beta)

        def rhs(th):
            u = W @ np.exp(1j * th)
            return params.omega + params.c0 * Krow + np.imag(u * eb * np.exp(-1j * th))

    state = init
    rs, bigs = [], []
    for step in range(n_steps + 1):
        if step % run.record_stride == 0:
            r, big = order_parameter(state.phases)
            rs.append(r)
            bigs.append(big)
        if step == n_steps:
            break
        state = rk4_step(state, rhs, run.dt)
    return np.array(rs), np.array(bigs), state.phases, True


def simulate(ensemble, params, init, run, fast=True):
    """Integrate and time-average the order parameter.

    Returns a SimResult with the recorded r(t) series, the final phase
    state, and the mean/std of r over the averaging window
    [transient, duration].
    """
    if ensemble.n != init.n:
        raise UsageError("ensemble size and initial state size differ")
    n_steps = int(round(run.duration / run.dt))
    if fast:
        if isinstance(ensemble, MeanField):
            r_rec, th_rec, final, ok = _kernels.mean_field_run(
                init.phases.copy(), ensemble.K, params.omega, params.c0,
                params.beta, run.dt, n_steps, run.record_stride)
        else:
            W = ensemble.W
            r_rec, th_rec, final, ok = _kernels.network_run(
                init.phases.copy(), W.data, W.indices, W.indptr,
                ensemble.strengths, params.omega, params.c0, params.beta,
                run.dt, n_steps, run.record_stride)
    else:
        r_rec, th_rec, final, ok = _run_reference(ensemble, params, init, run, n_steps)
    if not ok:
        raise NumericalError("non-finite order parameter during integration")
    t_rec = init.t + run.dt * run.record_stride * np.arange(len(r_rec))
    window = t_rec >= init.t + run.transient
    R = float(r_rec[window].mean())
    r_std = float(r_rec[window].std())
    final_state = PhaseState(final, init.t + n_steps * run.dt)
    return SimResult(t_rec, r_rec, th_rec, final_state, R, r_std)
