import json

import pytest

from floquet_coe.cli import main
from floquet_coe.config import ExperimentConfig, parse_config_text
from floquet_coe.errors import ConfigError

SMALL = """
# small driven chain
model = ising
L = 4
realizations = 3
M_list = 1, 2, 5:30:5
plateau_M = 100:110
times = 1000:1100:10
coe_reference_samples = 100
coe_reference_N = 16
master_seed = 12345
"""


def write_cfg(tmp_path, experiment, extra="", name="run.cfg"):
    p = tmp_path / name
    p.write_text(f"experiment = {experiment}\n{SMALL}{extra}")
    return p


def read_all(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_parse_lists_and_overrides():
    cfg = parse_config_text("experiment = pt_convergence\nM_list = 1, 3:6\ntimes = 0:1:0.25\n",
                            {"master_seed": 9, "threads": None})
    assert cfg.M_list == [1, 3, 4, 5]
    assert cfg.times == [0.0, 0.25, 0.5, 0.75]
    assert cfg.master_seed == 9 and cfg.threads == 1
    assert cfg.dim == 256 and ExperimentConfig("level_spacing", model="bose_hubbard", L=8).dim == 330


@pytest.mark.parametrize("text", [
    "model = ising",  # missing experiment
    "experiment = nope",
    "experiment = level_spacing\nmodel = qcd",
    "experiment = level_spacing\nW = -1",
    "experiment = level_spacing\nF = nan",
    "experiment = level_spacing\nrealizations = 0",
    "experiment = level_spacing\nL = abc",
    "experiment = level_spacing\nbogus = 1",
    "experiment = level_spacing\njust words",
    "experiment = level_spacing\nmodel = coe",  # coe without N
    "experiment = level_spacing\nstart_steps = 15",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_cli_usage_errors(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("experiment = level_spacing\nW = -2\n")
    assert main(["--config", str(p), "--output", str(tmp_path / "o")]) == 2
    assert "invalid configuration" in capsys.readouterr().err
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2
    assert main([]) == 2
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize("experiment,extra,files", [
    ("level_spacing", "", {"r_hist_M1.csv", "r_hist_M25.csv"}),
    ("eigenstate_dist", "", {"d_hist.csv"}),
    ("pt_convergence", "", {"pt_convergence.csv"}),
    ("anti_concentration", "model = coe\nN = 32\nM_list = 50\n", {"scaled_p_hist.csv"}),
    ("undriven_compare", "", {"undriven_pt.csv"}),
    ("verify_ising_map", "realizations = 5\nmax_qubits = 3\nmax_layers = 3\nM_list = 1, 2\n", {"ising_map_cases.csv"}),
    ("rmt_baseline", "model = coe\nN = 32\n", {"component_hist.csv"}),
    ("eigenstate_dist", "model = bose_hubbard\nL = 4\nn_particles = 2\n", {"d_hist.csv"}),
])
def test_every_experiment_writes_artifacts(tmp_path, experiment, extra, files):
    if experiment == "level_spacing":
        extra = "M_list = 1, 25\n"
    out = tmp_path / "out"
    assert main(["--config", str(write_cfg(tmp_path, experiment, extra)), "--output", str(out)]) == 0
    names = set(p.name for p in out.iterdir())
    assert files | {"summary.json"} <= names
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["experiment"] == experiment
    assert "results" in summary
    if experiment != "verify_ising_map":
        assert "binning" in summary or experiment == "rmt_baseline"
        assert "residuals" in summary and "seeds" in summary
    for f in files:
        lines = (out / f).read_text().splitlines()
        assert len(lines) >= 2 and "," in lines[0]
        assert all(len(l.split(",")) == len(lines[0].split(",")) for l in lines)


def test_cli_numerical_failure_exit_code(tmp_path, capsys):
    # 25 repetitions of even the shortest circuit exceed the free-spin guard
    cfg = write_cfg(tmp_path, "verify_ising_map", "realizations = 1\nM_list = 25\n")
    assert main(["--config", str(cfg), "--output", str(tmp_path / "o")]) == 1
    assert "numerical failure" in capsys.readouterr().err


def test_summary_records_provenance(tmp_path):
    out = tmp_path / "out"
    main(["--config", str(write_cfg(tmp_path, "pt_convergence")), "--output", str(out)])
    s = json.loads((out / "summary.json").read_text())
    assert s["config"]["master_seed"] == 12345
    assert s["pooling"]
    assert s["integrator"]["steps"] and s["integrator"]["scheme"] == "bm4"
    res = s["residuals"]
    assert res["max_unitarity_residual"] < 1e-9 and res["max_symmetry_residual"] < 1e-9
    assert res["max_convergence_residual"] < 1e-8
    assert res["max_reconstruction_residual"] < 1e-8 and res["max_eigen_residual"] < 1e-8
    assert len(s["seeds"]) == 3
    text = (out / "summary.json").read_text()
    assert text == json.dumps(s, sort_keys=True, indent=2) + "\n"
    # 17 significant digits in CSV
    row = (out / "pt_convergence.csv").read_text().splitlines()[2].split(",")
    assert float(row[1]) == s["results"]["curve"][1][1]


def test_seed_override_changes_results(tmp_path):
    cfg = write_cfg(tmp_path, "pt_convergence")
    main(["--config", str(cfg), "--output", str(tmp_path / "a")])
    main(["--config", str(cfg), "--output", str(tmp_path / "b"), "--seed", "7"])
    a = json.loads((tmp_path / "a" / "summary.json").read_text())
    b = json.loads((tmp_path / "b" / "summary.json").read_text())
    assert b["config"]["master_seed"] == 7
    assert a["results"]["curve"] != b["results"]["curve"]


@pytest.mark.parametrize("experiment", ["pt_convergence", "level_spacing"])
def test_bit_identical_serial_and_parallel(tmp_path, experiment):
    cfg = write_cfg(tmp_path, experiment)
    main(["--config", str(cfg), "--output", str(tmp_path / "s1")])
    main(["--config", str(cfg), "--output", str(tmp_path / "s2")])
    main(["--config", str(cfg), "--output", str(tmp_path / "p"), "--threads", "2"])
    s1, s2, p = (read_all(tmp_path / d) for d in ("s1", "s2", "p"))
    assert s1 == s2 == p
