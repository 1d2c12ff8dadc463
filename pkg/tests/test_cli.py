"""Command-line interface: subcommands, merging, exit codes, artifacts."""

import json

import pytest

from poisson_csi.causal import causal_capacity, no_csi_capacity
from poisson_csi.channel import ChannelParams
from poisson_csi.cli import main

FAST = ["--A", "1", "--lambda", "0.1", "--delta", "0.05", "--nu", "0.5",
        "--alpha", "0.1", "--eps", "0.2", "--T", "40", "--trials", "3",
        "--m-bits", "2", "--k-bits", "4"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_capacity_default(capsys):
    code, out, _ = run_cli(capsys, "capacity")
    assert code == 0
    assert out.splitlines() == ["C = 0.53074 bits/sec", "p* = 0.36788"]


def test_capacity_nats(capsys):
    code, out, _ = run_cli(capsys, "capacity", "--units", "nats")
    assert code == 0
    assert out.splitlines() == ["C = 0.36788 nats/sec", "p* = 0.36788"]


def test_capacity_bad_peak_is_config_error(capsys):
    code, _, err = run_cli(capsys, "capacity", "--A", "-1")
    assert code == 2
    assert "config error" in err


def test_unknown_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["capacity", "--tilt", "3"])
    assert exc.value.code == 2


def test_missing_subcommand_exits_two():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_simulate_reports_and_writes_json(capsys, tmp_path):
    out_path = tmp_path / "res.json"
    code, out, _ = run_cli(capsys, "simulate", *FAST, "--seed", "7",
                           "--out", str(out_path))
    assert code == 0
    assert "error_rate=" in out and "m=2 k=4" in out
    loaded = json.loads(out_path.read_text(encoding="utf-8"))
    assert loaded["config"]["seed"] == 7
    assert loaded["config"]["T"] == 40.0
    assert sum(loaded["counts"].values()) == 3


def test_simulate_dumps_tracks(capsys, tmp_path):
    tracks = tmp_path / "tracks"
    code, _, _ = run_cli(capsys, "simulate", *FAST, "--dump-tracks",
                         str(tracks))
    assert code == 0
    assert (tracks / "x_info.txt").exists()
    assert (tracks / "y_info.rle").exists()


def test_env_seed_overrides_flag(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("POISSON_CSI_SEED", "123")
    out_path = tmp_path / "res.json"
    code, _, _ = run_cli(capsys, "simulate", *FAST, "--seed", "7",
                         "--out", str(out_path))
    assert code == 0
    loaded = json.loads(out_path.read_text(encoding="utf-8"))
    assert loaded["config"]["seed"] == 123


def test_env_seed_must_be_integer(capsys, monkeypatch):
    monkeypatch.setenv("POISSON_CSI_SEED", "lucky")
    code, _, err = run_cli(capsys, "simulate", *FAST)
    assert code == 2
    assert "POISSON_CSI_SEED" in err


def test_config_file_merges_under_flags(capsys, tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "A": 1.0, "lambda": 0.1, "delta": 0.05, "nu": 0.5, "alpha": 0.1,
        "eps": 0.2, "T": 30.0, "trials": 4, "seed": 9, "m_bits": 2,
        "k_bits": 4}), encoding="utf-8")
    out_path = tmp_path / "res.json"
    code, _, _ = run_cli(capsys, "simulate", "--config", str(cfg_file),
                         "--T", "40", "--out", str(out_path))
    assert code == 0
    loaded = json.loads(out_path.read_text(encoding="utf-8"))
    assert loaded["config"]["T"] == 40.0      # flag beats file
    assert loaded["config"]["trials"] == 4    # file beats default
    assert loaded["config"]["seed"] == 9


def test_config_file_random_state_law(capsys, tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "A": 1.0, "lambda": 0.1, "delta": 0.05, "nu": 0.5, "alpha": 0.1,
        "eps": 0.2, "T": 40.0, "trials": 3, "m_bits": 2, "k_bits": 4,
        "adversary": {"kind": "homogeneous_poisson", "rate": 0.003}}),
        encoding="utf-8")
    out_path = tmp_path / "res.json"
    code, _, _ = run_cli(capsys, "simulate", "--config", str(cfg_file),
                         "--out", str(out_path))
    assert code == 0
    loaded = json.loads(out_path.read_text(encoding="utf-8"))
    assert loaded["config"]["adversary"]["kind"] == "homogeneous_poisson"
    assert "decomposition" in loaded


def test_config_file_errors(capsys, tmp_path):
    code, _, err = run_cli(capsys, "simulate", "--config",
                           str(tmp_path / "absent.json"))
    assert code == 2 and "not found" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{nope", encoding="utf-8")
    assert run_cli(capsys, "simulate", "--config", str(bad))[0] == 2
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]", encoding="utf-8")
    assert run_cli(capsys, "simulate", "--config", str(arr))[0] == 2


def test_state_law_flags_go_together(capsys):
    code, _, err = run_cli(capsys, "simulate", *FAST, "--state-law",
                           "homogeneous_poisson")
    assert code == 2
    assert "go together" in err


def test_causal_reports_both_capacities(capsys):
    code, out, _ = run_cli(capsys, "causal", "--mu", "5", "--delta", "0.01")
    assert code == 0
    params = ChannelParams(A=1.0, lam=0.1, delta=0.01)
    with_csi = causal_capacity(params, 5.0)
    without = no_csi_capacity(params, 5.0)
    lines = out.splitlines()
    assert lines[0] == (f"causal-CSI capacity = {with_csi.capacity:.9f} "
                        f"bits/slot (duty {with_csi.p_star:.5f})")
    assert lines[1] == f"no-CSI capacity     = {without.capacity:.9f} bits/slot"
    diff = abs(with_csi.capacity - without.capacity)
    assert lines[2] == f"difference          = {diff:.3e} bits/slot"
    assert with_csi.capacity >= without.capacity - 1e-9


def test_causal_rejects_negative_mu(capsys):
    code, _, err = run_cli(capsys, "causal", "--mu", "-1")
    assert code == 2
    assert "config error" in err


def test_sanov_prints_bound_check(capsys):
    code, out, _ = run_cli(capsys, "sanov", "--n", "100", "--p", "0.3",
                           "--q", "0.5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("P[Bin(100, 0.3) >= ceil(qn)] = ")
    assert lines[1].startswith("divergence = ")
    assert lines[3] == "bound holds: True"


def test_sanov_bad_target_is_config_error(capsys):
    code, _, err = run_cli(capsys, "sanov", "--n", "100", "--p", "0.5",
                           "--q", "0.3")
    assert code == 2
    assert "config error" in err


def test_sanov_underflow_is_runtime_error(capsys):
    code, _, err = run_cli(capsys, "sanov", "--n", "100000", "--p", "0.1",
                           "--q", "0.9")
    assert code == 3
    assert "runtime error" in err


def test_sweep_writes_table_and_figures(capsys, tmp_path):
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(capsys, "sweep", *FAST, "--axis", "T",
                           "--values", "30,40", "--out-dir", str(out_dir))
    assert code == 0
    assert (out_dir / "point_0.json").exists()
    assert (out_dir / "point_1.json").exists()
    assert (out_dir / "sweep.csv").exists()
    assert (out_dir / "error_rate.png").exists()
    assert (out_dir / "outcomes.png").exists()
    assert "wrote" in out and "error_rate.png" in out


def test_sweep_no_figures(capsys, tmp_path):
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(capsys, "sweep", *FAST, "--axis", "T",
                           "--values", "30,40", "--out-dir", str(out_dir),
                           "--no-figures")
    assert code == 0
    assert (out_dir / "sweep.csv").exists()
    assert not (out_dir / "error_rate.png").exists()
    assert "png" not in out


def test_sweep_bad_values_list(capsys, tmp_path):
    code, _, err = run_cli(capsys, "sweep", *FAST, "--axis", "T",
                           "--values", "a,b", "--out-dir", str(tmp_path))
    assert code == 2
    assert "bad --values" in err
