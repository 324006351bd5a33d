"""Command-line entry points and result serialization.

Subcommands: simulate, sweep, plane, branches, critical-curve, net-gen,
shuffle.  Experiments are described by a single JSON config (see
DEFAULT_CONFIG); command-line flags override file fields.  Every output
file starts with a comment header embedding the resolved config and its
hash, so identical configs and seeds produce identical files.

Exit codes: 0 ok, 2 config/usage error, 3 numerical failure.
"""

import argparse
import copy
import hashlib
import json
import os
import sys
from importlib import metadata

import numpy as np

from .errors import UsageError, NumericalError, ConfigError
from .distributions import distribution_from_dict
from .model import (CouplingParams, MeanField, Network, PhaseState, RunConfig,
                    random_phases, simulate, mean_field_rhs, network_rhs)
from .selfconsistency import find_states
from .stability import classify_stability, critical_c0
from .hysteresis import SweepConfig, sweep, plane_scan
from . import networks as net

OUTPUT_DIR_ENV = "GKURAMOTO_OUTPUT_DIR"

DEFAULT_CONFIG = {
    "model": {"kind": "mean_field"},
    "distribution": {"kind": "trunc_gaussian", "s": 1.0},
    "n": 1000,
    "omega": np.pi,
    "beta": 0.0,
    "c0": 0.0,
    "seed": 0,
    "run": {"duration": 100.0, "dt": 0.01, "transient": 50.0, "record_stride": 10},
    "sweep": {"c0_start": 0.0, "c0_stop": 1.5, "c0_step": 0.1,
              "realizations": 5, "std_flag_threshold": 0.1,
              "refine_threshold": 0.15, "max_duration": 15000.0},
    "plane": {"beta_start": 0.0, "beta_stop": 0.49 * np.pi,
              "beta_step": 0.01 * np.pi, "c0_step": 0.02},
    "branches": {"c0_start": 0.0, "c0_stop": 1.5, "c0_step": 0.05},
    "critical": {"beta_start": 0.0, "beta_stop": 0.49 * np.pi,
                 "beta_step": 0.01 * np.pi, "c0_max": 10.0},
    "network": {"source": {"kind": "er", "p": 0.08}, "weighting": "I"},
    "output_dir": None,
}


# ---------------------------------------------------------------------------
# config handling


def _deep_update(base, patch):
    for key, value in patch.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def _apply_set(cfg, assignment):
    """Apply one --set dotted.key=json-value override."""
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, _, raw = assignment.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.strip().split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def load_config(path=None, sets=(), **overrides):
    """Defaults <- config file <- --set overrides <- explicit flags."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        try:
            with open(path) as fh:
                patch = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(patch, dict):
            raise ConfigError(f"config root must be a JSON object in {path}")
        _deep_update(cfg, patch)
    for assignment in sets:
        _apply_set(cfg, assignment)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if cfg["output_dir"] is None:
        cfg["output_dir"] = os.environ.get(OUTPUT_DIR_ENV, ".")
    if not 0 <= cfg["beta"] < np.pi / 2:
        raise ConfigError(f"beta={cfg['beta']} outside [0, pi/2) at field 'beta'")
    if cfg["c0"] < 0:
        raise ConfigError(f"c0={cfg['c0']} must be >= 0 at field 'c0'")
    if cfg["n"] < 2:
        raise ConfigError(f"n={cfg['n']} must be >= 2 at field 'n'")
    return cfg


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _build_id():
    try:
        return f"gkuramoto-{metadata.version('gkuramoto')}"
    except metadata.PackageNotFoundError:
        return "gkuramoto-unknown"


# ---------------------------------------------------------------------------
# CSV with embedded config header


def write_csv(path, columns, rows, cfg):
    """CSV whose first lines carry the build id, config hash, and config."""
    with open(path, "w") as fh:
        fh.write(f"# build {_build_id()}\n")
        fh.write(f"# config_hash {config_hash(cfg)}\n")
        fh.write(f"# config {json.dumps(cfg, sort_keys=True, default=str)}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def read_csv(path):
    """Round-trip reader for this module's CSVs -> (meta, columns, rows)."""
    meta = {}
    rows = []
    columns = None
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("#"):
                key, _, rest = line[1:].strip().partition(" ")
                meta[key] = json.loads(rest) if key == "config" else rest
                continue
            if columns is None:
                columns = line.split(",")
                continue
            parts = line.split(",")
            if len(parts) != len(columns):
                raise UsageError(f"{path}: row width does not match header")
            row = []
            for cell in parts:
                try:
                    row.append(float(cell) if ("." in cell or "e" in cell or
                                               "inf" in cell or "nan" in cell)
                               else int(cell))
                except ValueError:
                    row.append(cell)
            rows.append(row)
    if columns is None:
        raise UsageError(f"{path}: no header row found")
    return meta, columns, rows


# ---------------------------------------------------------------------------
# ensemble construction


def _build_mean_field(cfg, rng):
    spec = distribution_from_dict(cfg["distribution"])
    return MeanField(spec.sample(cfg["n"], rng)), spec


def _build_graph(cfg, rng):
    src = cfg["network"]["source"]
    kind = src.get("kind")
    if kind == "er":
        return net.er_generate(cfg["n"], src.get("p", 0.08), rng)
    if kind == "edge_list":
        return net.load_edge_list(src["path"])
    if kind == "shuffled":
        base = net.load_edge_list(src["path"])
        return net.degree_preserving_shuffle(
            base, seed=src.get("seed", 0),
            swaps_per_edge=src.get("swaps_per_edge", 10))
    raise ConfigError(f"unknown network source kind {kind!r} "
                      "at field 'network.source.kind'")


def build_ensemble(cfg, rng):
    """Returns (ensemble, distribution-or-None) for the configured model."""
    kind = cfg["model"].get("kind", "mean_field")
    if kind == "mean_field":
        return _build_mean_field(cfg, rng)
    if kind != "network":
        raise ConfigError(f"unknown model kind {kind!r} at field 'model.kind'")
    graph = _build_graph(cfg, rng)
    dist = cfg["distribution"]
    if dist.get("kind") == "degree_derived":
        K = net.degree_to_strength(graph, dist.get("Km", 2.0))
        spec = None
    else:
        spec = distribution_from_dict(dist)
        K = spec.sample(graph.n, rng)
    scheme = cfg["network"].get("weighting", "I")
    if scheme == "I":
        return net.weight_scheme_I(graph, K), spec
    if scheme == "II":
        return net.weight_scheme_II(graph, K, rng), spec
    raise ConfigError(f"unknown weighting {scheme!r} at field 'network.weighting'")


def _run_config(cfg):
    r = cfg["run"]
    return RunConfig(duration=r["duration"], dt=r.get("dt", 0.01),
                     transient=r.get("transient", 0.0),
                     record_stride=r.get("record_stride", 10))


def _sweep_config(cfg, refine=True):
    s = cfg["sweep"]
    return SweepConfig(
        beta=cfg["beta"], per_point=_run_config(cfg), omega=cfg["omega"],
        c0_start=s["c0_start"], c0_stop=s["c0_stop"], c0_step=s["c0_step"],
        realizations=s.get("realizations", 5), master_seed=cfg["seed"],
        std_flag_threshold=s.get("std_flag_threshold", 0.1),
        refine_threshold=s.get("refine_threshold", 0.15) if refine else None,
        max_duration=s.get("max_duration", 15000.0))


# ---------------------------------------------------------------------------
# snapshot classification


def measure_velocities(ensemble, params, state, duration=10.0, dt=0.01):
    """Per-oscillator mean phase velocity over `duration` (unwrapped)."""
    if isinstance(ensemble, MeanField):
        rhs = lambda th: mean_field_rhs(th, params, ensemble.K)
    else:
        rhs = lambda th: network_rhs(th, params, ensemble.W)
    th = state.phases.copy()
    disp = np.zeros_like(th)
    n_steps = int(round(duration / dt))
    for _ in range(n_steps):
        k1 = rhs(th)
        k2 = rhs(th + 0.5 * dt * k1)
        k3 = rhs(th + 0.5 * dt * k2)
        k4 = rhs(th + dt * k3)
        step = (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        disp += step
        th = np.mod(th + step, 2 * np.pi)
    return disp / duration


def classify_locked(velocities, tol=1e-2):
    """Locked flags: |v_i - Omega| < tol, Omega = median ensemble velocity."""
    omega_common = np.median(velocities)
    return np.abs(velocities - omega_common) < tol, omega_common


# ---------------------------------------------------------------------------
# subcommands


def _outpath(cfg, name):
    os.makedirs(cfg["output_dir"], exist_ok=True)
    return os.path.join(cfg["output_dir"], name)


def cmd_simulate(cfg):
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    ensemble, _ = build_ensemble(cfg, rng)
    params = CouplingParams(omega=cfg["omega"], c0=cfg["c0"], beta=cfg["beta"])
    init = random_phases(ensemble.n, rng)
    res = simulate(ensemble, params, init, _run_config(cfg))
    rows = list(zip(res.t, res.r, res.theta_big))
    write_csv(_outpath(cfg, "r_t.csv"), ["t", "r", "Theta"], rows, cfg)

    vel = measure_velocities(ensemble, params, res.final_state)
    locked, omega_common = classify_locked(vel)
    snap_rows = [(i, K, th, v, bool(l)) for i, (K, th, v, l) in enumerate(
        zip(ensemble.strengths, res.final_state.phases, vel, locked))]
    snap_path = _outpath(cfg, "snapshot.csv")
    write_csv(snap_path, ["i", "K", "phase", "velocity", "locked"], snap_rows, cfg)

    summary = {"R": res.R, "r_std": res.r_std, "Omega": float(omega_common),
               "n_locked": int(locked.sum()), "snapshot": snap_path,
               "config_hash": config_hash(cfg)}
    with open(_outpath(cfg, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return 0


def cmd_sweep(cfg):
    config = _sweep_config(cfg)
    rows = []
    for rlz in range(config.realizations):
        ss = np.random.SeedSequence(cfg["seed"], spawn_key=(rlz,))
        rng = np.random.default_rng(ss)
        ensemble, _ = build_ensemble(cfg, rng)
        init = random_phases(ensemble.n, rng)
        curve = sweep(ensemble, config, init=init)
        for i, c0 in enumerate(curve.c0):
            rows.append((c0, "F", curve.R_forward[i], curve.r_std_forward[i],
                         bool(curve.flag_forward[i]), rlz))
            rows.append((c0, "B", curve.R_backward[i], curve.r_std_backward[i],
                         bool(curve.flag_backward[i]), rlz))
    write_csv(_outpath(cfg, "curve.csv"),
              ["c0", "direction", "R", "r_std", "flag", "realization"], rows, cfg)
    return 0


def cmd_plane(cfg):
    p = cfg["plane"]
    betas = np.arange(p["beta_start"], p["beta_stop"] + 0.5 * p["beta_step"],
                      p["beta_step"])
    s = cfg["sweep"]
    c0s = np.arange(s["c0_start"], s["c0_stop"] + 0.5 * p["c0_step"], p["c0_step"])
    config = _sweep_config(cfg, refine=False)

    def source(rng):
        ensemble, _ = build_ensemble(cfg, rng)
        return ensemble

    scan = plane_scan(source, betas, c0s, config, n=cfg["n"])
    rows = []
    for ib, beta in enumerate(scan.betas):
        for ic, c0 in enumerate(scan.c0):
            rows.append((beta, c0, scan.R_forward[ib, ic], scan.R_backward[ib, ic],
                         scan.delta_R[ib, ic], bool(scan.xflag[ib, ic])))
    write_csv(_outpath(cfg, "plane.csv"),
              ["beta", "c0", "R_fwd", "R_bwd", "dR", "xflag"], rows, cfg)
    return 0


def cmd_branches(cfg):
    spec = distribution_from_dict(cfg["distribution"])
    b = cfg["branches"]
    c0s = np.arange(b["c0_start"], b["c0_stop"] + 0.5 * b["c0_step"], b["c0_step"])
    rows = []
    for c0 in c0s:
        if c0 <= 0:
            continue
        for state in find_states(spec, float(c0), cfg["beta"]):
            verdict = classify_stability(state, spec)
            rows.append((float(c0), state.r, state.delta, state.classification,
                         verdict))
    write_csv(_outpath(cfg, "branches.csv"),
              ["c0", "r", "delta", "classification", "stability"], rows, cfg)
    return 0


def cmd_critical_curve(cfg):
    spec = distribution_from_dict(cfg["distribution"])
    c = cfg["critical"]
    betas = np.arange(c["beta_start"], c["beta_stop"] + 0.5 * c["beta_step"],
                      c["beta_step"])
    rows = []
    for beta in betas:
        c0_star = critical_c0(spec, float(beta), bracket=(0.0, c.get("c0_max", 10.0)))
        rows.append((float(beta), "" if c0_star is None else c0_star))
    write_csv(_outpath(cfg, "critical_curve.csv"), ["beta", "c0_star"], rows, cfg)
    return 0


def cmd_net_gen(cfg):
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    graph = _build_graph(cfg, rng)
    net.save_edge_list(graph, _outpath(cfg, "network.edges"),
                       header=f"config_hash {config_hash(cfg)}")
    with open(_outpath(cfg, "network.json"), "w") as fh:
        json.dump(net.graph_summary(graph), fh, indent=2, sort_keys=True)
    return 0


def cmd_shuffle(cfg):
    src = cfg["network"]["source"]
    if "path" not in src:
        raise ConfigError("shuffle needs network.source.path")
    graph = net.load_edge_list(src["path"])
    shuffled = net.degree_preserving_shuffle(
        graph, seed=cfg["seed"], swaps_per_edge=src.get("swaps_per_edge", 10))
    net.save_edge_list(shuffled, _outpath(cfg, "shuffled.edges"),
                       header=f"config_hash {config_hash(cfg)}")
    with open(_outpath(cfg, "shuffled.json"), "w") as fh:
        json.dump(net.graph_summary(shuffled), fh, indent=2, sort_keys=True)
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch

_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "plane": cmd_plane,
    "branches": cmd_branches,
    "critical-curve": cmd_critical_curve,
    "net-gen": cmd_net_gen,
    "shuffle": cmd_shuffle,
}


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field (dotted path, JSON value)")
    parser.add_argument("--beta", type=float, help="phase lag in [0, pi/2)")
    parser.add_argument("--c0", type=float, help="coupling offset")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--n", type=int, help="oscillator count")
    parser.add_argument("--output-dir", help=f"output directory "
                        f"(default ${OUTPUT_DIR_ENV} or '.')")
    parser.add_argument("--threads", type=int, default=os.cpu_count(),
                        help="worker thread budget (advisory)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gkuramoto",
        description="Simulation and analysis of coupled phase oscillators "
                    "with offset-plus-sine coupling and heterogeneous strengths.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, sets=args.set, beta=args.beta,
                          c0=args.c0, seed=args.seed, n=args.n,
                          output_dir=args.output_dir)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
