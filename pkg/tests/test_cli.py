"""Command-line front end: exit codes, schemas, determinism, atomic output."""

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hetflow import cli
from hetflow import homothety as ht


def _run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _read_csv(text):
    rows = list(csv.reader(text.strip().splitlines()))
    return rows[0], rows[1:]


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------


def test_soliton_check_constructor_passes(capsys):
    code, out, _ = _run(capsys, ["soliton-check", "--algebra", "heisenberg", "--kappa", "1.0"])
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "soliton-check"
    assert payload["schema_version"] == 1
    assert payload["meta"]["f"] == pytest.approx(1.0, rel=1e-14)
    assert all(entry["pass"] for entry in payload["equations"].values())


def test_soliton_check_failure_exits_3(capsys):
    code, out, _ = _run(
        capsys,
        [
            "soliton-check",
            "--algebra",
            "su2",
            "--kappa",
            "1.0",
            "--f",
            "1.0",
            "--metric-diag",
            "1",
            "1",
            "1",
        ],
    )
    assert code == 3
    payload = json.loads(out)
    assert not payload["equations"]["einstein_sym"]["pass"]


def test_unknown_suite_exits_1(capsys):
    code, _, err = _run(capsys, ["verify", "--suite", "nonsense"])
    assert code == 1
    assert "configuration error" in err or "nonsense" in err


def test_bad_numeric_flag_exits_1(capsys):
    code, _, err = _run(capsys, ["homothety", "--kappa", "not-a-number"])
    assert code == 1
    assert "configuration error" in err


def test_flow_non_spd_metric_exits_2(capsys):
    code, _, err = _run(
        capsys,
        ["flow", "--algebra", "r3", "--kappa", "1.0", "--metric-diag", "1", "-1", "1"],
    )
    assert code == 2
    assert "numerical-domain error" in err


def test_homothety_domain_error_exits_1(capsys):
    # su2 case requires a positive coupling: rejected at problem construction
    code, _, err = _run(capsys, ["homothety", "--case", "su2", "--kappa", "0.0"])
    assert code == 1
    assert "configuration error" in err


# ---------------------------------------------------------------------------
# verify command
# ---------------------------------------------------------------------------


def test_verify_identities_small_run(capsys):
    code, out, _ = _run(
        capsys, ["verify", "--suite", "identities", "--trials", "6", "--seed", "7"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["all_pass"] is True
    assert payload["suite"] == "identities"
    assert payload["trials"] == 6
    names = {check["name"] for check in payload["checks"]}
    assert names == {
        "curvature_reconstruction",
        "curvature_square_expansion",
        "curvature_norm_expansion",
        "twisted_square_expansion",
        "twisted_norm_expansion",
    }
    for check in payload["checks"]:
        assert check["pass"] is True
        assert check["worst"] <= check["tol"]


def test_verify_solitons_suite(capsys):
    code, out, _ = _run(
        capsys, ["verify", "--suite", "solitons", "--trials", "5", "--seed", "3"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["all_pass"] is True


# ---------------------------------------------------------------------------
# homothety command
# ---------------------------------------------------------------------------


def test_homothety_static_flat_profile(capsys, tmp_path):
    out_path = tmp_path / "static.csv"
    code, _, _ = _run(
        capsys,
        [
            "homothety",
            "--case",
            "flat",
            "--kappa",
            "4.0",
            "--mu",
            "1.0",
            "--t-max",
            "2.0",
            "--n-points",
            "9",
            "--output",
            str(out_path),
        ],
    )
    assert code == 0
    header, rows = _read_csv(out_path.read_text())
    assert header == ["t", "sigma", "f", "sigma_closed"]
    for row in rows:
        assert float(row[1]) == pytest.approx(1.0, abs=1e-12)
        assert float(row[2]) == pytest.approx(1.0, abs=1e-12)


def test_homothety_flat_closed_form_column(capsys):
    code, out, _ = _run(
        capsys,
        [
            "homothety",
            "--case",
            "flat",
            "--kappa",
            "1.0",
            "--mu",
            "0.9",
            "--t-max",
            "1.0",
            "--n-points",
            "11",
        ],
    )
    assert code == 0
    header, rows = _read_csv(out)
    assert header[-1] == "sigma_closed"
    for row in rows:
        if row[3]:
            assert float(row[1]) == pytest.approx(float(row[3]), abs=1e-6)


def test_homothety_su2_reports_collapse_event(capsys):
    kappa = 1.0
    code, out, _ = _run(
        capsys,
        [
            "homothety",
            "--case",
            "su2",
            "--kappa",
            str(kappa),
            "--t-max",
            "1.0",
            "--n-points",
            "11",
        ],
    )
    assert code == 0
    header, rows = _read_csv(out)
    t_max = ht.su2_collapse_time(kappa)
    assert float(rows[-1][0]) == pytest.approx(t_max, abs=1e-6)
    assert float(rows[-1][1]) <= 1e-6


# ---------------------------------------------------------------------------
# flow command and scale extraction
# ---------------------------------------------------------------------------


def test_flow_soliton_start_is_constant(capsys):
    code, out, _ = _run(
        capsys,
        [
            "flow",
            "--algebra",
            "heisenberg",
            "--kappa",
            "1.0",
            "--f",
            "1.0",
            "--metric-diag",
            "1",
            "1",
            "1",
            "--t-max",
            "1.0",
            "--n-points",
            "5",
        ],
    )
    assert code == 0
    header, rows = _read_csv(out)
    assert header == ["t", "g11", "g12", "g13", "g22", "g23", "g33", "f"]
    for row in rows:
        for col, expected in zip(row[1:], (1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0)):
            assert float(col) == pytest.approx(expected, abs=1e-9)


def test_flow_scale_extraction_matches_homothety(capsys):
    # flat-base conformal family: the tensor flow and the scalar reduction
    # describe the same trajectory, so g11 from `flow` must reproduce the
    # sigma column from `homothety`.
    kappa, mu = 1.0, 0.9
    args_common = ["--t-max", "1.5", "--n-points", "13"]
    code, flow_out, _ = _run(
        capsys,
        ["flow", "--algebra", "r3", "--kappa", str(kappa), "--f", str(mu)] + args_common,
    )
    assert code == 0
    code, sigma_out, _ = _run(
        capsys,
        ["homothety", "--case", "flat", "--kappa", str(kappa), "--mu", str(mu)]
        + args_common,
    )
    assert code == 0
    _, flow_rows = _read_csv(flow_out)
    _, sigma_rows = _read_csv(sigma_out)
    assert len(flow_rows) == 13
    for frow, srow in zip(flow_rows, sigma_rows):
        assert float(frow[0]) == pytest.approx(float(srow[0]), abs=1e-12)
        assert float(frow[1]) == pytest.approx(float(srow[1]), abs=1e-6)  # sigma
        assert float(frow[7]) == pytest.approx(float(srow[2]), abs=1e-6)  # f
        # conformal family: off-diagonal zero, diagonal equal
        assert float(frow[2]) == pytest.approx(0.0, abs=1e-10)
        assert float(frow[4]) == pytest.approx(float(frow[1]), abs=1e-9)


# ---------------------------------------------------------------------------
# sweep command
# ---------------------------------------------------------------------------

SWEEP_ARGS = [
    "sweep",
    "--case",
    "negative",
    "--kappa-min",
    "0.0",
    "--kappa-max",
    "1.0",
    "--kappa-steps",
    "3",
    "--mu-min",
    "0.0",
    "--mu-max",
    "2.0",
    "--mu-steps",
    "3",
]


def test_sweep_schema_and_grid_order(capsys):
    code, out, _ = _run(capsys, SWEEP_ARGS)
    assert code == 0
    header, rows = _read_csv(out)
    assert header == ["i", "j", "kappa", "mu", "tag"]
    assert len(rows) == 9
    kappas = np.linspace(0.0, 1.0, 3)
    mus = np.linspace(0.0, 2.0, 3)
    for row in rows:
        i, j = int(row[0]), int(row[1])
        assert float(row[2]) == pytest.approx(kappas[i], abs=1e-15)
        assert float(row[3]) == pytest.approx(mus[j], abs=1e-15)
        assert row[4]  # tag is a nonempty enum value
    assert [(int(r[0]), int(r[1])) for r in rows] == [
        (i, j) for i in range(3) for j in range(3)
    ]


def test_sweep_deterministic_across_thread_counts(capsys, tmp_path, monkeypatch):
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("HETFLOW_THREADS", threads)
        path = tmp_path / f"sweep_{threads}.csv"
        code, _, _ = _run(capsys, SWEEP_ARGS + ["--output", str(path)])
        assert code == 0
        outputs.append(path.read_bytes())
    monkeypatch.delenv("HETFLOW_THREADS")
    path = tmp_path / "sweep_default.csv"
    code, _, _ = _run(capsys, SWEEP_ARGS + ["--output", str(path)])
    assert code == 0
    outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_bad_thread_env_rejected(capsys, monkeypatch):
    monkeypatch.setenv("HETFLOW_THREADS", "zero")
    code, _, err = _run(capsys, SWEEP_ARGS)
    assert code == 1
    assert "configuration error" in err


# ---------------------------------------------------------------------------
# config files and atomic output
# ---------------------------------------------------------------------------


def test_config_file_with_flag_override(capsys, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"case": "flat", "kappa": 4.0, "mu": 2.0, "n_points": 5}))
    # flag --mu 1.0 overrides config mu=2.0: kappa mu^2 = 4 is static
    code, out, _ = _run(
        capsys, ["homothety", "--config", str(config), "--mu", "1.0", "--t-max", "1.0"]
    )
    assert code == 0
    _, rows = _read_csv(out)
    assert len(rows) == 5
    for row in rows:
        assert float(row[1]) == pytest.approx(1.0, abs=1e-12)


def test_malformed_config_exits_1_without_output(capsys, tmp_path):
    config = tmp_path / "broken.json"
    config.write_text("{not json")
    out_path = tmp_path / "never.csv"
    code, _, err = _run(
        capsys, ["homothety", "--config", str(config), "--output", str(out_path)]
    )
    assert code == 1
    assert "configuration error" in err
    assert not out_path.exists()


def test_unknown_config_key_rejected(capsys, tmp_path):
    config = tmp_path / "extra.json"
    config.write_text(json.dumps({"case": "flat", "quux": 1}))
    code, _, err = _run(capsys, ["homothety", "--config", str(config)])
    assert code == 1
    assert "quux" in err


def test_output_reruns_are_byte_identical(capsys, tmp_path):
    args = ["homothety", "--case", "negative", "--kappa", "0.5", "--mu", "0.3"]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        code, _, _ = _run(capsys, args + ["--output", str(path)])
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_failed_command_leaves_no_partial_file(capsys, tmp_path):
    out_path = tmp_path / "missing.csv"
    code, _, _ = _run(
        capsys,
        [
            "flow",
            "--algebra",
            "r3",
            "--kappa",
            "1.0",
            "--metric-diag",
            "1",
            "-1",
            "1",
            "--output",
            str(out_path),
        ],
    )
    assert code == 2
    assert not out_path.exists()


# ---------------------------------------------------------------------------
# console entry point
# ---------------------------------------------------------------------------


def test_console_script_roundtrip():
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "hetflow.cli",
            "verify",
            "--suite",
            "divergence",
            "--trials",
            "3",
            "--seed",
            "1",
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(proc.stdout)
    assert payload["all_pass"] is True
    assert payload["checks"][0]["name"].startswith("div_")
