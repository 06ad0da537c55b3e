import numpy as np
import pytest

from qtrack.cli import main
from qtrack.config import default_config, load_config
from qtrack.qubo import Qubo, save_qubo


def test_default_config_is_valid():
    config = default_config()
    assert config.geometry.n_layers == 4
    assert config.size_sweep.solver == "anneal"
    assert config.vqe_sweep.shots == 1024


def test_load_config_overrides(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(
        "[run]\n"
        "master_seed = 99\n"
        "output_dir = results\n"
        "[detector]\n"
        "layer_radii = 0.05, 0.1, 0.2\n"
        "b_field = 1.5\n"
        "smearing_sigma = 1e-4\n"
        "[seeding]\n"
        "max_dphi = 0.2\n"
        "[qubo]\n"
        "w_conflict = 2.0\n"
        "[vqe]\n"
        "alphas = 0.25\n"
        "noise = both\n"
    )
    config = load_config(path)
    assert config.master_seed == 99
    assert config.output_dir == "results"
    assert config.geometry.layer_radii == (0.05, 0.1, 0.2)
    assert config.geometry.magnetic_field == 1.5
    assert config.smearing_sigma == 1e-4
    assert config.cuts.max_dphi == 0.2
    assert config.weights.w_conflict == 2.0
    assert config.vqe_sweep.alphas == (0.25,)
    assert config.vqe_sweep.noise == (False, True)


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[detector]\nwarp_factor = 9\n")
    with pytest.raises(ValueError, match="warp_factor"):
        load_config(path)
    path.write_text("[thrusters]\npower = 1\n")
    with pytest.raises(ValueError, match="thrusters"):
        load_config(path)


def test_load_config_missing_file():
    with pytest.raises(FileNotFoundError):
        load_config("/no/such/config.ini")


def test_readme_example_config_parses(tmp_path):
    import re
    from pathlib import Path

    text = Path(__file__).resolve().parents[1].joinpath("README.md").read_text()
    block = re.search(r"```ini\n(.*?)```", text, re.DOTALL).group(1)
    path = tmp_path / "readme.ini"
    path.write_text(block)
    config = load_config(path)
    assert config.master_seed == 7
    assert config.vqe_sweep.noise == (False,)
    assert config.vqe_sweep.layer_style == "full"


def test_cli_generate_build_solve_pipeline(tmp_path, capsys):
    hits = tmp_path / "hits.csv"
    qubo_path = tmp_path / "qubo.txt"
    assert main(["generate", "--density", "4", "--seed", "2", "--out", str(hits)]) == 0
    assert main(["build-qubo", "--hits", str(hits), "--out", str(qubo_path)]) == 0
    assert main(["solve", "--qubo", str(qubo_path), "--solver", "anneal", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "bits " in out and "energy " in out


def test_cli_solve_brute_two_variable_example(tmp_path, capsys):
    path = tmp_path / "ex.txt"
    save_qubo(Qubo(2, [1.0, -2.0], {(0, 1): 3.0}), path)
    assert main(["solve", "--qubo", str(path), "--solver", "brute"]) == 0
    out = capsys.readouterr().out
    assert "bits 01" in out
    assert "energy -2.0" in out


def test_cli_solve_vqe_writes_trace(tmp_path, capsys):
    path = tmp_path / "ex.txt"
    save_qubo(Qubo(2, [1.0, -2.0], {(0, 1): 3.0}), path)
    trace = tmp_path / "trace.csv"
    rc = main([
        "solve", "--qubo", str(path), "--solver", "vqe", "--seed", "4",
        "--shots", "128", "--reps", "0", "--trace-out", str(trace),
    ])
    assert rc == 0
    assert "bits 01" in capsys.readouterr().out
    assert trace.exists()


def test_cli_usage_errors(capsys):
    assert main(["solve", "--qubo", "x", "--solver", "laplace"]) == 1
    assert main(["solve", "--nope"]) == 1
    assert main(["sweep-vqe"]) == 1  # --seed is mandatory
    assert main(["frobnicate"]) == 1
    capsys.readouterr()


def test_cli_missing_config_names_path(tmp_path, capsys):
    rc = main(["sweep-size", "--config", "/absent/exp.ini", "--seed", "1",
               "--out", str(tmp_path)])
    assert rc == 1
    assert "/absent/exp.ini" in capsys.readouterr().err


def test_cli_missing_qubo_file(capsys):
    rc = main(["solve", "--qubo", "/absent/q.txt", "--solver", "brute"])
    assert rc == 1
    assert "/absent/q.txt" in capsys.readouterr().err


def test_cli_capacity_exit_code(tmp_path, capsys):
    path = tmp_path / "big.txt"
    save_qubo(Qubo(30, np.zeros(30), {}), path)
    assert main(["solve", "--qubo", str(path), "--solver", "brute"]) == 2
    capsys.readouterr()
