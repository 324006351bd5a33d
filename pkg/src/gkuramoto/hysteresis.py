"""Forward/backward offset sweeps, plane scans, and hysteresis detection.

A sweep gradually increases c0 from 0 to 1.5 and back, carrying the final
phase configuration of each point over as the initial condition of the
next.  The difference between the forward and backward order-parameter
traces maps out hysteresis loops; cells whose time-averaged order
parameter still fluctuates strongly after auto-extension are flagged and
excluded from detection.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from .errors import UsageError, NumericalError
from .model import (CouplingParams, MeanField, Network, PhaseState, RunConfig,
                    random_phases, simulate)
from .distributions import CouplingDistribution

__all__ = ["SweepConfig", "HysteresisCurve", "PlaneScan", "sweep",
           "plane_scan", "detect_hysteresis"]


def _round_grid(values):
    return np.round(np.asarray(values, dtype=float), 9)


@dataclass
class SweepConfig:
    """Protocol parameters for one forward/backward sweep."""

    beta: float
    per_point: RunConfig
    omega: float = np.pi
    c0_start: float = 0.0
    c0_stop: float = 1.5
    c0_step: float = 0.1
    realizations: int = 5
    master_seed: Optional[int] = None
    std_flag_threshold: float = 0.1
    # adjacent-point |R| jump that triggers a step/5 re-run of the interval;
    # None disables refinement (plane scans use a fixed grid)
    refine_threshold: Optional[float] = 0.15
    # total per-point integration time grown to this when the averaging
    # window std exceeds the flag threshold
    max_duration: float = 15000.0

    def __post_init__(self):
        if not 0 <= self.beta < np.pi / 2:
            raise UsageError("beta must be in [0, pi/2)")
        if not self.c0_stop > self.c0_start >= 0:
            raise UsageError("need c0_stop > c0_start >= 0")
        if self.c0_step <= 0:
            raise UsageError("c0_step must be positive")
        if self.realizations < 1:
            raise UsageError("realizations must be >= 1")

    def base_grid(self):
        n = int(round((self.c0_stop - self.c0_start) / self.c0_step))
        return _round_grid(self.c0_start + self.c0_step * np.arange(n + 1))


@dataclass
class HysteresisCurve:
    """Forward and backward R(c0) traces on one shared grid."""

    c0: np.ndarray
    R_forward: np.ndarray
    R_backward: np.ndarray
    r_std_forward: np.ndarray
    r_std_backward: np.ndarray
    flag_forward: np.ndarray
    flag_backward: np.ndarray

    def __post_init__(self):
        n = len(self.c0)
        for name in ("R_forward", "R_backward", "r_std_forward",
                     "r_std_backward", "flag_forward", "flag_backward"):
            if len(getattr(self, name)) != n:
                raise UsageError(f"{name} length does not match the c0 grid")

    @property
    def delta_R(self):
        return self.R_forward - self.R_backward

    @property
    def flagged(self):
        return self.flag_forward | self.flag_backward

    def value_at(self, c0, direction="forward"):
        idx = int(np.argmin(np.abs(self.c0 - c0)))
        if abs(self.c0[idx] - c0) > 1e-6:
            raise UsageError(f"c0={c0} is not a grid point")
        return (self.R_forward if direction == "forward" else self.R_backward)[idx]


@dataclass
class PlaneScan:
    """Realization-averaged R maps over a (beta, c0) grid."""

    betas: np.ndarray
    c0: np.ndarray
    R_forward: np.ndarray   # shape (n_beta, n_c0)
    R_backward: np.ndarray
    xflag: np.ndarray       # sticky: std above threshold in any realization

    def __post_init__(self):
        shape = (len(self.betas), len(self.c0))
        for name in ("R_forward", "R_backward", "xflag"):
            if getattr(self, name).shape != shape:
                raise UsageError(f"{name} shape does not match the grids")

    @property
    def delta_R(self):
        return self.R_forward - self.R_backward


def _measure_point(ensemble, params, state, run, config):
    """Integrate one sweep point, auto-extending when r(t) fluctuates.

    Returns (R, r_std, flag, final_state): flag marks points whose
    averaging-window std still exceeds the threshold after the total
    integration time was grown to config.max_duration.
    """
    try:
        res = simulate(ensemble, params, state, run)
    except NumericalError as exc:
        raise NumericalError(
            f"integration failed at c0={params.c0:g} (beta={params.beta:g}): {exc}"
        ) from exc
    total = run.duration
    while res.r_std > config.std_flag_threshold and total < config.max_duration:
        extra = min(config.max_duration - total, max(run.duration, 4 * run.transient))
        ext = replace(run, duration=extra, transient=min(run.transient, 0.5 * extra))
        res = simulate(ensemble, params, res.final_state, ext)
        total += extra
    flag = res.r_std > config.std_flag_threshold
    return res.R, res.r_std, flag, res.final_state


def _leg(ensemble, config, grid, state, store):
    """Run one direction of a sweep over `grid`, chaining states.

    `store` maps c0 -> (R, r_std, flag); returns per-point final states for
    refinement restarts.
    """
    snapshots = {}
    for c0 in grid:
        params = CouplingParams(omega=config.omega, c0=float(c0), beta=config.beta)
        R, std, flag, state = _measure_point(ensemble, params, state, config.per_point, config)
        store[c0] = (R, std, flag)
        snapshots[c0] = state
    return snapshots, state


def sweep(ensemble, config, init=None):
    """Forward/backward hysteresis sweep of one ensemble.

    The forward leg starts from uniform-random phases (or `init`) at the
    lowest offset; every subsequent point starts from the previous final
    state, and the backward leg continues from the state at the top.  Base
    intervals where R jumps by more than the refinement threshold are
    re-run at a fifth of the step, restarting from the stored entry state,
    so both directions share one final grid.
    """
    base = config.base_grid()
    if init is None:
        seed = np.random.SeedSequence(config.master_seed).generate_state(1)[0]
        init = random_phases(ensemble.n, int(seed))
    fwd, bwd = {}, {}
    snap_f, top_state = _leg(ensemble, config, base, init, fwd)
    snap_b, _ = _leg(ensemble, config, base[::-1], top_state, bwd)

    grid = set(base)
    if config.refine_threshold is not None:
        refine = []
        for a, b in zip(base[:-1], base[1:]):
            jump = max(abs(fwd[b][0] - fwd[a][0]), abs(bwd[b][0] - bwd[a][0]))
            if jump > config.refine_threshold:
                refine.append((a, b))
        for a, b in refine:
            inner = _round_grid(np.linspace(a, b, 6)[1:-1])
            _leg(ensemble, config, inner, snap_f[a], fwd)
            _leg(ensemble, config, inner[::-1], snap_b[b], bwd)
            grid.update(inner)

    c0 = _round_grid(sorted(grid))
    return HysteresisCurve(
        c0=c0,
        R_forward=np.array([fwd[c][0] for c in c0]),
        R_backward=np.array([bwd[c][0] for c in c0]),
        r_std_forward=np.array([fwd[c][1] for c in c0]),
        r_std_backward=np.array([bwd[c][1] for c in c0]),
        flag_forward=np.array([fwd[c][2] for c in c0], dtype=bool),
        flag_backward=np.array([bwd[c][2] for c in c0], dtype=bool),
    )


def _realization_ensemble(source, n, rng):
    if isinstance(source, (MeanField, Network)):
        return source
    if isinstance(source, CouplingDistribution):
        return MeanField(source.sample(n, rng))
    if callable(source):
        return source(rng)
    raise UsageError("source must be an ensemble, a strength distribution, "
                     "or a callable(rng) -> ensemble")


def plane_scan(source, betas, c0s, config, n=1000):
    """Realization-averaged sweep over a (beta, c0) plane.

    One sweep per beta per realization, each with its own strengths (or
    network) and initial phases drawn from an independent derived RNG
    stream, so results do not depend on execution order.  R maps hold the
    mean over realizations; a cell is flagged when any realization exceeds
    the std threshold in either direction.
    """
    betas = _round_grid(betas)
    c0s = _round_grid(c0s)
    if len(c0s) < 2:
        raise UsageError("need at least two c0 grid points")
    Rf = np.zeros((len(betas), len(c0s)))
    Rb = np.zeros_like(Rf)
    xflag = np.zeros(Rf.shape, dtype=bool)
    for ib, beta in enumerate(betas):
        for rlz in range(config.realizations):
            ss = np.random.SeedSequence(config.master_seed,
                                        spawn_key=(ib, rlz))
            rng = np.random.default_rng(ss)
            ens = _realization_ensemble(source, n, rng)
            init = random_phases(ens.n, rng)
            cfg = replace(config, beta=float(beta),
                          c0_start=float(c0s[0]), c0_stop=float(c0s[-1]),
                          c0_step=float(c0s[1] - c0s[0]),
                          refine_threshold=None)
            curve = sweep(ens, cfg, init=init)
            if not np.allclose(curve.c0, c0s):
                raise NumericalError("sweep grid does not match the requested c0 grid")
            Rf[ib] += curve.R_forward
            Rb[ib] += curve.R_backward
            xflag[ib] |= curve.flagged
    Rf /= config.realizations
    Rb /= config.realizations
    return PlaneScan(betas, c0s, Rf, Rb, xflag)


def detect_hysteresis(curve, threshold=0.1):
    """Maximal c0 intervals with |R_forward - R_backward| above threshold.

    Flagged points never participate.  Returns a list of (c0_lo, c0_hi)
    pairs; single-point excursions give zero-length intervals.
    """
    mask = (np.abs(curve.delta_R) > threshold) & ~curve.flagged
    intervals = []
    i = 0
    n = len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            intervals.append((float(curve.c0[i]), float(curve.c0[j])))
            i = j + 1
        else:
            i += 1
    return intervals
