import json
import os

import numpy as np
import pytest

from gkuramoto import cli
from gkuramoto.errors import ConfigError


def run_cli(args):
    return cli.main(list(args))


@pytest.mark.parametrize("command", list(cli._COMMANDS))
def test_help_exits_zero(command, capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli([command, "--help"])
    assert exc.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_invalid_beta_is_config_error(tmp_path, capsys):
    code = run_cli(["simulate", "--beta", "2.0", "--output-dir", str(tmp_path)])
    assert code == 2
    assert "beta" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert run_cli(["simulate", "--config", str(tmp_path / "none.json")]) == 2


def test_bad_json_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    assert run_cli(["simulate", "--config", str(path)]) == 2


def test_config_precedence(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"beta": 0.1, "c0": 0.5, "n": 64}))
    cfg = cli.load_config(str(path), sets=["c0=0.9", "run.duration=7"], beta=0.2)
    assert cfg["beta"] == 0.2          # flag beats file
    assert cfg["c0"] == 0.9            # --set beats file
    assert cfg["run"]["duration"] == 7  # dotted --set descends
    assert cfg["n"] == 64              # file beats default


def test_set_requires_assignment():
    with pytest.raises(ConfigError):
        cli.load_config(None, sets=["oops"])


def test_output_dir_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    cfg = cli.load_config(None)
    assert cfg["output_dir"] == str(tmp_path)


def test_config_hash_is_stable():
    a = cli.load_config(None)
    b = cli.load_config(None)
    assert cli.config_hash(a) == cli.config_hash(b)
    b["c0"] = 1.0
    assert cli.config_hash(a) != cli.config_hash(b)


SMALL_RUN = 'run={"duration":3,"transient":1,"dt":0.02}'


def _sim_args(outdir, seed="7"):
    return ["simulate", "--n", "64", "--seed", seed, "--beta", "0.9",
            "--c0", "0.5", "--set", SMALL_RUN, "--output-dir", str(outdir)]


def test_simulate_outputs_and_replay(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert run_cli(_sim_args(out1)) == 0
    assert run_cli(_sim_args(out2)) == 0
    for name in ("r_t.csv", "snapshot.csv", "summary.json"):
        assert (out1 / name).exists()
    # identical config and seed -> byte-identical data (headers differ only
    # in the output path baked into the embedded config)
    def body(path):
        return b"".join(l for l in path.read_bytes().splitlines(True)
                        if not l.startswith(b"#"))

    assert body(out1 / "r_t.csv") == body(out2 / "r_t.csv")
    assert body(out1 / "snapshot.csv") == body(out2 / "snapshot.csv")
    summary = json.loads((out1 / "summary.json").read_text())
    assert 0.0 <= summary["R"] <= 1.0 and summary["r_std"] >= 0


def test_csv_roundtrip(tmp_path):
    out = tmp_path / "c"
    run_cli(_sim_args(out))
    meta, cols, rows = cli.read_csv(out / "r_t.csv")
    assert cols == ["t", "r", "Theta"]
    assert meta["config"]["n"] == 64
    assert all(len(r) == 3 for r in rows)
    rs = np.array([r[1] for r in rows])
    assert np.all((rs >= 0) & (rs <= 1))


def test_sweep_command_realization_column(tmp_path):
    out = tmp_path / "s"
    args = ["sweep", "--n", "48", "--seed", "3", "--beta", "0.3",
            "--set", 'run={"duration":2,"transient":1,"dt":0.05}',
            "--set", 'sweep={"c0_start":0,"c0_stop":0.4,"c0_step":0.2,'
                     '"realizations":2,"std_flag_threshold":1.0,'
                     '"refine_threshold":null,"max_duration":2}',
            "--output-dir", str(out)]
    assert run_cli(args) == 0
    _, cols, rows = cli.read_csv(out / "curve.csv")
    assert cols == ["c0", "direction", "R", "r_std", "flag", "realization"]
    assert {r[5] for r in rows} == {0, 1}
    assert {r[1] for r in rows} == {"F", "B"}


def test_plane_command(tmp_path):
    out = tmp_path / "p"
    args = ["plane", "--n", "32", "--seed", "3", "--beta", "0.0",
            "--set", 'run={"duration":2,"transient":1,"dt":0.05}',
            "--set", 'sweep={"c0_start":0,"c0_stop":0.2,"c0_step":0.2,'
                     '"realizations":1,"std_flag_threshold":1.0,'
                     '"refine_threshold":null,"max_duration":2}',
            "--set", 'plane={"beta_start":0.1,"beta_stop":0.2,"beta_step":0.1,'
                     '"c0_step":0.2}',
            "--output-dir", str(out)]
    assert run_cli(args) == 0
    _, cols, rows = cli.read_csv(out / "plane.csv")
    assert cols == ["beta", "c0", "R_fwd", "R_bwd", "dR", "xflag"]
    for row in rows:
        assert row[4] == pytest.approx(row[2] - row[3])


def test_critical_curve_command_uniform(tmp_path):
    out = tmp_path / "cc"
    args = ["critical-curve",
            "--set", 'distribution={"kind":"uniform","w":0.8}',
            "--set", f'critical={{"beta_start":{0.47 * np.pi},'
                     f'"beta_stop":{0.47 * np.pi},"beta_step":1.0,"c0_max":10}}',
            "--output-dir", str(out)]
    assert run_cli(args) == 0
    _, cols, rows = cli.read_csv(out / "critical_curve.csv")
    assert rows[0][0] == pytest.approx(0.47 * np.pi)
    assert rows[0][1] == pytest.approx(2.09, abs=0.05)


def test_branches_command_topology(tmp_path):
    out = tmp_path / "br"
    args = ["branches", "--beta", str(0.45 * np.pi),
            "--set", 'distribution={"kind":"trunc_gaussian","s":1.0}',
            "--set", 'branches={"c0_start":0.8,"c0_stop":0.8,"c0_step":0.1}',
            "--output-dir", str(out)]
    assert run_cli(args) == 0
    _, cols, rows = cli.read_csv(out / "branches.csv")
    by_r = sorted(rows, key=lambda r: r[1])
    verdicts = [r[4] for r in by_r]
    # incoherent + middle + upper: stable / unstable / stable
    assert verdicts == ["at_least_neutrally_stable", "unstable",
                        "at_least_neutrally_stable"]


def test_net_gen_and_shuffle_commands(tmp_path):
    out = tmp_path / "ng"
    args = ["net-gen", "--n", "60", "--seed", "5",
            "--set", 'network={"source":{"kind":"er","p":0.2},"weighting":"I"}',
            "--output-dir", str(out)]
    assert run_cli(args) == 0
    summary = json.loads((out / "network.json").read_text())
    assert summary["n"] == 60
    source = json.dumps({"kind": "edge_list", "path": str(out / "network.edges"),
                         "swaps_per_edge": 3})
    shuffle_args = ["shuffle", "--seed", "6", "--set", f"network.source={source}",
                    "--output-dir", str(out)]
    assert run_cli(shuffle_args) == 0
    shuffled = json.loads((out / "shuffled.json").read_text())
    assert shuffled["degree_histogram"] == summary["degree_histogram"]


def test_classify_locked_median_reference():
    vel = np.array([1.0, 1.0, 1.0, 1.005, 2.0])
    locked, omega = cli.classify_locked(vel)
    assert omega == 1.0
    assert locked.tolist() == [True, True, True, True, False]


def test_shuffle_requires_path(tmp_path):
    assert run_cli(["shuffle", "--output-dir", str(tmp_path)]) == 2
