import csv
import hashlib
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from expflow.cli import ExperimentReport, bms_chain, main
from expflow.lorentz_sphere import matrix_to_json


def invoke(*args):
    result = CliRunner().invoke(main, list(args))
    return result.exit_code, result.output


def report(*args):
    code, out = invoke(*args)
    return code, json.loads(out)


def check(rep, name):
    return next(c for c in rep["checks"] if c["name"] == name)


COMMANDS = [
    ["classify", "sqrt2"],
    ["classify", "22/7"],
    ["relation", "1/2", "1/3", "--bound", "4"],
    ["discrepancy", "sqrt2", "500"],
    ["torus", "--theta", "phi", "-K", "16"],
    ["torus", "--theta", "sqrt2", "--theta", "sqrt3", "-K", "6", "--N", "2"],
    ["line", "--bumps", "2"],
    ["circle", "--T", "20", "--dt", "0.05"],
    ["sphere", "--pairs", "20", "--orbits", "4"],
    ["expmap", "--flow", "torus", "-K", "4"],
    ["expmap", "--flow", "line", "--h", "0.01"],
    ["singular-times", "--T", "1", "--n-max", "3"],
    ["bms-witness", "--samples", "100", "--n-max", "3"],
]


@pytest.mark.parametrize("args", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_commands_pass_and_are_deterministic(args):
    code1, out1 = invoke("--seed", "7", *args)
    code2, out2 = invoke("--seed", "7", *args)
    assert code1 == 0, out1
    assert out1 == out2
    rep = json.loads(out1)
    assert rep["schema"] == "expflow/1"
    assert rep["passed"] is True
    assert rep["config"]["seed"] == 7
    assert all(c["status"] in {"pass", "fail", "report-only"} for c in rep["checks"])
    assert "wall_time_s" not in rep


def test_pass_status_recomputes():
    _, rep = report("sphere", "--pairs", "10", "--orbits", "3")
    for c in rep["checks"]:
        if c["status"] == "pass" and isinstance(c["tolerance"], float):
            assert c["value"] <= c["tolerance"]


def test_config_hash_covers_seed_and_params():
    _, a = report("--seed", "1", "discrepancy", "phi", "100")
    _, b = report("--seed", "2", "discrepancy", "phi", "100")
    _, c = report("--seed", "1", "discrepancy", "phi", "101")
    assert len({a["config_hash"], b["config_hash"], c["config_hash"]}) == 3
    body = json.dumps({"command": a["command"], "config": a["config"]}, sort_keys=True)
    assert a["config_hash"] == hashlib.sha256(body.encode()).hexdigest()


def test_classify_sqrt2_report():
    code, rep = report("classify", "sqrt2")
    assert code == 0
    assert check(rep, "classification")["value"] == "non-liouville-certified"
    assert abs(check(rep, "exponent_estimate")["value"] - 2) < 0.2


def test_torus_phi_invertible_empty_kernel():
    code, rep = report("torus", "--theta", "phi", "--ell", "1", "-K", "16")
    assert code == 0
    assert check(rep, "kernel")["value"] == []
    assert check(rep, "roundtrip_relative")["status"] == "pass"


def test_torus_resonant_reports_k():
    code, rep = report("torus", "--theta", "1/2", "-K", "4")
    assert code == 0
    assert check(rep, "resonance_detected")["value"] == [2]


def test_jordan_rotation(tmp_path):
    path = tmp_path / "rot.json"
    path.write_text(matrix_to_json(np.array([[0.0, -1.0], [1.0, 0.0]])))
    code, rep = report("jordan", str(path))
    assert code == 0
    assert np.allclose(rep["results"]["decomposition"]["A_e"], [[0, -1], [1, 0]], atol=1e-9)


def test_line_coarse_grid_fails_quadrature_check():
    # the 5e-6 preimage tolerance is calibrated for h = 1e-3
    code, rep = report("line", "--bumps", "2", "--h", "0.01")
    assert code == 1
    assert check(rep, "beta_preimage_roundtrip")["status"] == "fail"
    assert check(rep, "delta_preimage_roundtrip")["status"] == "pass"


def test_jordan_failing_check_exits_one(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(matrix_to_json(np.array([[0.0, 1.0], [1e-12, 0.0]])))
    code, rep = report("jordan", str(path))
    assert code == 1
    assert rep["passed"] is False
    assert any(c["status"] == "fail" for c in rep["checks"])


@pytest.mark.parametrize(
    "args",
    [
        ["jordan", "/nonexistent/matrix.json"],
        ["classify", "not-a-number"],
        ["--seed", "-1", "classify", "sqrt2"],
        ["--precision", "20", "classify", "sqrt2"],
        ["discrepancy", "sqrt2", "0"],
    ],
)
def test_usage_errors_exit_two(args):
    code, _ = invoke(*args)
    assert code == 2


def test_csv_format_and_output_file(tmp_path):
    out = tmp_path / "rep.csv"
    code, text = invoke("-o", str(out), "--format", "csv", "discrepancy", "sqrt2", "200")
    assert code == 0 and text == ""
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["name", "status", "value", "tolerance"]
    assert all(r[1] in {"pass", "fail", "report-only"} for r in rows[1:])


def test_plot_data(tmp_path):
    plot = tmp_path / "series.csv"
    code, _ = invoke("--plot-data", str(plot), "circle", "--T", "20", "--dt", "0.05")
    assert code == 0
    rows = list(csv.reader(io.StringIO(plot.read_text())))
    assert len(rows[0]) == 2 and len(rows) > 100
    float(rows[1][0]), float(rows[1][1])


def test_timing_is_opt_in():
    _, rep = report("--timing", "discrepancy", "phi", "50")
    assert rep["wall_time_s"] >= 0


def test_seed_changes_random_inputs():
    _, a = report("--seed", "1", "sphere", "--pairs", "5", "--orbits", "2")
    _, b = report("--seed", "2", "sphere", "--pairs", "5", "--orbits", "2")
    assert a["checks"] != b["checks"]


def test_bms_chain_function():
    rep = bms_chain(2, samples=200, n_max=5)
    assert isinstance(rep, ExperimentReport)
    assert rep.ok
    names = [c.name for c in rep.checks]
    assert {"rotation_is_case2", "conformal_factor_is_one", "eigen_phase"} <= set(names)
