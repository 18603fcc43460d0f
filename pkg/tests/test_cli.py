import csv
import json

import numpy as np
import pytest

import spinwitness as sw
from spinwitness.cli import main


def run_cli(args, tmp_path, name="out"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_xi_specific_csv_matches_library(tmp_path):
    code, text = run_cli(["xi-specific", "--n-atoms", "12", "--gamma", "0.5",
                          "--chi-prime", "3e-3"], tmp_path)
    assert code == 0
    header, row = [line.split(",") for line in text.strip().splitlines()]
    record = dict(zip(header, row))
    s = sw.make_system(12)
    ref = sw.xi_specific(sw.dicke_superposition(s, 0.5), 3e-3, s)
    assert float(record["xi"]) == pytest.approx(ref.xi, rel=1e-12)
    assert float(record["numerator"]) == pytest.approx(ref.numerator_variance, rel=1e-12)
    assert record["singular"] == "0"


def test_small_system_exits_with_config_code(tmp_path):
    code, _ = run_cli(["xi-specific", "--n-atoms", "3"], tmp_path)
    assert code == 2


def test_singular_exit_code(tmp_path):
    code, text = run_cli(["xi-specific", "--n-atoms", "8", "--gamma", "0.5",
                          "--chi-prime", "1e-12"], tmp_path)
    assert code == 3
    row = text.strip().splitlines()[1].split(",")
    assert "inf" in row


def test_json_report_embeds_config_and_reruns(tmp_path):
    code, text = run_cli(["xi-specific", "--n-atoms", "10", "--gamma", "0.4",
                          "--chi-prime", "4e-3", "--format", "json"], tmp_path, "a.json")
    assert code == 0
    report = json.loads(text)
    assert report["config"]["n_atoms"] == 10
    assert report["config"]["gamma"] == 0.4

    # rerun from the embedded config: identical output
    cfg = tmp_path / "a.json"
    code2, text2 = run_cli(["xi-specific", "--config", str(cfg), "--format", "json"],
                           tmp_path, "b.json")
    assert code2 == 0
    a, b = json.loads(text), json.loads(text2)
    assert a["result"] == b["result"]


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_atoms": 10, "gamma": 0.3, "chi_prime": 4e-3}))
    code, text = run_cli(["xi-specific", "--config", str(cfg), "--gamma", "0.6"],
                         tmp_path)
    assert code == 0
    header, row = [line.split(",") for line in text.strip().splitlines()]
    record = dict(zip(header, row))
    assert float(record["gamma"]) == 0.6
    assert float(record["n_atoms"]) == 10


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_atom": 10}))
    code, _ = run_cli(["xi-specific", "--config", str(cfg)], tmp_path)
    assert code == 2


def test_sweep_chi_single_point_matches_xi_specific(tmp_path):
    code, text = run_cli(["sweep-chi", "--n-atoms", "10", "--gamma", "0.5",
                          "--chi-prime-min", "3e-3", "--chi-prime-max", "3.0001e-3",
                          "--chi-prime-points", "1"], tmp_path)
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 1
    s = sw.make_system(10)
    ref = sw.xi_specific(sw.dicke_superposition(s, 0.5), 3e-3, s)
    assert float(rows[0]["xi"]) == pytest.approx(ref.xi, rel=1e-12)


def test_sweep_chi_rectangular_with_inf(tmp_path):
    code, text = run_cli(["sweep-chi", "--n-atoms", "8", "--gamma", "0.5",
                          "--chi-prime-min", "1e-12", "--chi-prime-max", "1e-2",
                          "--chi-prime-points", "4"], tmp_path)
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 4
    assert rows[0]["xi"] == "inf"
    assert all(len(r) == 5 for r in rows)


def test_sweep_gamma_endpoints_not_witnessed(tmp_path):
    code, text = run_cli(["sweep-gamma", "--n-atoms", "10", "--chi-prime", "4e-3",
                          "--gamma-step", "0.25"], tmp_path)
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert float(rows[0]["gamma"]) == 0.0
    assert float(rows[-1]["gamma"]) == 1.0
    assert float(rows[0]["xi"]) >= 0.98
    assert float(rows[-1]["xi"]) >= 0.98
    assert not any(np.isnan(float(r["xi"])) for r in rows)


def test_sweep_gamma_deterministic_across_threads(tmp_path):
    args = ["sweep-gamma", "--n-atoms", "8", "--chi-prime", "5e-3",
            "--gamma-step", "0.2"]
    _, a = run_cli(args + ["--threads", "1"], tmp_path, "a.csv")
    _, b = run_cli(args + ["--threads", "2"], tmp_path, "b.csv")
    assert a == b


def test_sweep_n_includes_infinity_row(tmp_path):
    code, text = run_cli(["sweep-n", "--n-list", "4,6", "--cutoff", "120",
                          "--chi-points", "13"], tmp_path)
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert [r["n_atoms"] for r in rows] == ["4", "6", "inf"]
    assert float(rows[0]["xi"]) <= float(rows[1]["xi"]) <= float(rows[2]["xi"])


def test_sweep_n_rejects_small_entries(tmp_path):
    code, _ = run_cli(["sweep-n", "--n-list", "3,8"], tmp_path)
    assert code == 2


def test_husimi_grid_output(tmp_path):
    code, text = run_cli(["husimi", "--n-atoms", "4", "--gamma", "0.5",
                          "--theta-points", "16", "--phi-points", "32"], tmp_path)
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 16 * 32
    q = np.array([float(r["q"]) for r in rows])
    assert q.min() >= 0

    code2, _ = run_cli(["husimi", "--n-atoms", "4", "--theta-points", "8",
                        "--phi-points", "32"], tmp_path)
    assert code2 == 2


def test_husimi_witness_ground_source(tmp_path):
    code, text = run_cli(["husimi", "--n-atoms", "4", "--source", "witness-ground",
                          "--chi-prime", "0.1", "--theta-points", "16",
                          "--phi-points", "32"], tmp_path, "w.csv")
    assert code == 0
    _, text2 = run_cli(["husimi", "--n-atoms", "4", "--gamma", "0.5",
                        "--theta-points", "16", "--phi-points", "32"], tmp_path, "t.csv")
    assert text != text2


def test_repeat_runs_bit_identical(tmp_path):
    args = ["sweep-chi", "--n-atoms", "8", "--gamma", "0.5",
            "--chi-prime-min", "1e-3", "--chi-prime-max", "1e-2",
            "--chi-prime-points", "5"]
    _, a = run_cli(args, tmp_path, "a.csv")
    _, b = run_cli(args, tmp_path, "b.csv")
    assert a == b


def test_json_sweep_contains_columns(tmp_path):
    code, text = run_cli(["sweep-chi", "--n-atoms", "8", "--gamma", "0.5",
                          "--chi-prime-min", "2e-3", "--chi-prime-max", "8e-3",
                          "--chi-prime-points", "3", "--format", "json"], tmp_path)
    assert code == 0
    report = json.loads(text)
    assert report["result"]["columns"] == ["chi_prime", "numerator", "denominator",
                                           "xi", "xi_db"]
    assert len(report["result"]["rows"]) == 3
