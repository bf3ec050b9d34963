import json

import pytest

from cqedsim.cli import main


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


FOCK_DOC = {
    "params": {"omega0": 1.25, "omega_lambda": 1.25, "g_re": 1.0},
    "initial": {"kind": "basis", "n": 0, "atom": "excited"},
    "time": {"t_end": 3.0, "sample_interval": 0.05},
    "truncation": {"n_max": 25},
}


def test_seed_config_flag(capsys):
    assert main(["--seed-config"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["model"] == "fock"


def test_fock_run_writes_artifacts(tmp_path, capsys):
    cfg = write_config(tmp_path, FOCK_DOC)
    out = tmp_path / "out"
    assert main(["fock", "--config", cfg, "--out", str(out)]) == 0
    for name in ("resolved_config.json", "trajectory.csv", "trajectory.json",
                 "summary.json"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["norm_defect_max"] < 1e-8
    assert summary["n_max_used"] == 25
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t,pe,nbar,norm2,energy,alpha_re,alpha_im")


def test_svg_flag_emits_figures(tmp_path):
    cfg = write_config(tmp_path, FOCK_DOC)
    out = tmp_path / "out"
    assert main(["fock", "--config", cfg, "--out", str(out), "--svg"]) == 0
    assert (out / "fig_pe.svg").exists()
    assert (out / "fig_nbar.svg").exists()


def test_unknown_config_key_exits_2(tmp_path, capsys):
    doc = dict(FOCK_DOC)
    doc["gama"] = 1.0
    cfg = write_config(tmp_path, doc)
    assert main(["fock", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "gama" in capsys.readouterr().err


def test_missing_config_file_exits_1(tmp_path, capsys):
    assert main(["fock", "--config", str(tmp_path / "absent.json")]) == 1


def test_undersized_coherent_cutoff_exits_3(tmp_path, capsys):
    doc = {"params": {"omega0": 100.0, "omega_lambda": 100.0, "g_re": 1.0},
           "initial": {"kind": "coherent", "alpha_re": 3.0},
           "time": {"t_end": 1.0},
           "truncation": {"n_max": 5}}
    cfg = write_config(tmp_path, doc)
    assert main(["fock", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    assert "n_max" in capsys.readouterr().err


def test_unwritable_output_exits_1(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("file, not a directory")
    cfg = write_config(tmp_path, FOCK_DOC)
    status = main(["fock", "--config", cfg, "--out",
                   str(blocker / "nested")])
    assert status == 1


def test_meanfield_run(tmp_path):
    doc = {"params": {"omega0": 10.0, "omega_lambda": 10.0, "g_re": 0.1},
           "time": {"t_end": 10.0}}
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "mf"
    assert main(["meanfield", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["norm_defect_max"] < 1e-8
    assert summary["tail_mass_max"] is None


def test_compare_rejects_meanfield_config(tmp_path, capsys):
    doc = {"model": "meanfield",
           "params": {"omega0": 10.0, "omega_lambda": 10.0, "g_re": 0.1}}
    cfg = write_config(tmp_path, doc)
    assert main(["compare", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_compare_artifacts(tmp_path):
    cfg = write_config(tmp_path, FOCK_DOC)
    out = tmp_path / "cmp"
    assert main(["compare", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "compare.json").read_text())
    assert doc["deltas"]["fock_vs_oracle_amp_max"] < 1e-6
    for name in ("fock.csv", "oracle.csv", "rwa.csv"):
        assert (out / name).exists()


def test_sweep_single_point_matches_run(tmp_path):
    template = {"model": "meanfield",
                "params": {"omega0": 10.0, "omega_lambda": 10.0, "g_re": 0.1},
                "time": {"t_end": 10.0}}
    sweep_doc = {"grid": {}, "template": template}
    cfg = write_config(tmp_path, sweep_doc, "sweep.json")
    out = tmp_path / "sw"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = json.loads((out / "sweep.json").read_text())["rows"]
    assert len(rows) == 1 and rows[0]["status"] == "ok"

    run_cfg = write_config(tmp_path, template, "single.json")
    run_out = tmp_path / "single"
    assert main(["meanfield", "--config", run_cfg, "--out", str(run_out)]) == 0
    summary = json.loads((run_out / "summary.json").read_text())
    assert rows[0]["deviation_score"] == summary["deviation_score"]
    assert rows[0]["norm_defect_max"] == summary["norm_defect_max"]
    assert rows[0]["dominant_omega"] == summary["dominant_omega"]


def test_sweep_isolates_failing_point(tmp_path):
    template = {"model": "fock",
                "params": {"omega0": 1.25, "omega_lambda": 1.25, "g_re": 0.1},
                "time": {"t_end": 3.0},
                "truncation": {"n_max": 6, "tail_tol": 1e-6}}
    sweep_doc = {"grid": {"g_abs": [0.1, 4.0]}, "template": template}
    cfg = write_config(tmp_path, sweep_doc, "sweep.json")
    out = tmp_path / "sw"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--jobs", "2"]) == 0
    rows = json.loads((out / "sweep.json").read_text())["rows"]
    assert rows[0]["status"] == "ok"
    assert rows[1]["status"].startswith("failed:")
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3


def test_sweep_deterministic_across_jobs(tmp_path):
    template = {"model": "meanfield",
                "params": {"omega0": 10.0, "omega_lambda": 10.0, "g_re": 0.1},
                "time": {"t_end": 5.0}}
    sweep_doc = {"grid": {"g_abs": [0.05, 0.1, 0.5]}, "template": template}
    cfg = write_config(tmp_path, sweep_doc, "sweep.json")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--config", cfg, "--out", str(out1), "--jobs", "1"]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(out2), "--jobs", "3"]) == 0
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
