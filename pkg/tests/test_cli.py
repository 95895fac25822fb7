"""End-to-end checks of the ``wavebound`` command-line interface.

Every test drives ``cli.main`` in-process and inspects stdout/stderr plus
whatever lands in ``--out``.

Proves:
 1. ``bound scalar`` prints the variational result as JSON, exits 0, and
    drops a manifest recording the command line, resolved model, library
    versions, output files, and wall clock.
 2. ``bound fisher-stefan`` and ``bound two-species`` print their payloads;
    the two-species payload embeds the weak-coupling report.
 3. ``criterion`` classifies models on the correct side of the
    pushed/pulled boundary.
 4. Model, config, and expression-syntax errors exit 2 with an ``error:``
    line on stderr (the parse position survives into the message).
 5. ``simulate scalar`` writes profiles.csv and front.csv and reports the
    fitted speed; a run whose profile never crosses the tracking level
    exits 5 without creating the output directory.
 6. ``figure`` sweeps write one CSV per curve with the documented header,
    rerun byte-identically, exit 6 when some points fail (listing each
    failure in the JSON payload), and exit 0 otherwise.
 7. Figure CSVs agree with the library: the decoupled two-species column
    solves to c = 2, and a small porous-Fisher sweep lands the simulated
    speed on top of the bound.
 8. Worker-pool sizing honours WAVEBOUND_THREADS and never exceeds the
    number of sweep points.
"""

import json
import math
import os

import pytest

from wavebound import cli
from wavebound.varbound import fisher_stefan_bound


def _run(capsys, args):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _manifest(out_dir, name):
    path = os.path.join(str(out_dir), name)
    assert os.path.isfile(path), f"missing manifest {name}"
    with open(path) as fh:
        return json.load(fh)


# ----------------------------------------------------------------------
# bound / criterion
# ----------------------------------------------------------------------


def test_bound_scalar_porous_json_and_manifest(tmp_path, capsys):
    args = [
        "bound", "scalar", "--preset", "porous_fisher",
        "--param", "m=1", "--param", "n=1", "--out", str(tmp_path),
    ]
    code, out, err = _run(capsys, args)
    assert code == 0
    assert err == ""
    payload = json.loads(out)
    assert payload["c_lb"] == pytest.approx(2.0 ** -0.5, rel=1e-9)
    assert payload["beta_star"] == pytest.approx(1.0, abs=1e-6)
    assert payload["c_linear"] == 0.0
    assert payload["selection"] == "pushed"
    assert payload["attained_at_boundary"] is False

    manifest = _manifest(tmp_path, "bound-scalar_manifest.json")
    assert set(manifest) == {
        "command_line", "resolved_config", "versions", "outputs",
        "wall_clock_seconds",
    }
    assert manifest["command_line"] == args
    assert manifest["resolved_config"]["model"]["params"] == {"m": 1.0, "n": 1.0}
    assert set(manifest["versions"]) == {"wavebound", "numpy", "scipy", "python"}
    assert manifest["outputs"] == []
    assert manifest["wall_clock_seconds"] >= 0.0


def test_bound_scalar_custom_expressions(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "bound", "scalar", "--D", "1", "--f", "u*(1 - u)", "--out", str(tmp_path),
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["c_lb"] == pytest.approx(2.0, abs=1e-6)
    assert payload["c_linear"] == pytest.approx(2.0, rel=1e-12)
    assert payload["selection"] == "pulled"
    assert payload["attained_at_boundary"] is True


def test_bound_fisher_stefan_value(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "bound", "fisher-stefan", "--kappa", "50", "--out", str(tmp_path),
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["kappa"] == 50.0
    assert payload["c_lb"] == pytest.approx(math.sqrt(0.96), rel=1e-12)
    manifest = _manifest(tmp_path, "bound-fisher-stefan_manifest.json")
    assert manifest["resolved_config"] == {"kappa": 50.0}


def test_bound_two_species_payload(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "bound", "two-species", "--preset", "landman",
        "--param", "lambda=0.25", "--param", "K=2.0", "--out", str(tmp_path),
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"] is True
    assert payload["c_linear"] == pytest.approx(2.0 * math.sqrt(0.75), rel=1e-12)
    assert payload["c"] >= payload["c_linear"] - 1e-9
    # kappa = lambda K = 0.5 and nu = 1 for this preset
    assert payload["epsilon"] == pytest.approx(0.5 / payload["c"], rel=1e-12)
    report = payload["weak_coupling"]
    assert set(report) == {"epsilon", "crowding_ratio", "valid"}
    assert report["valid"] is True
    _manifest(tmp_path, "bound-two-species_manifest.json")


@pytest.mark.parametrize(
    "delta, want",
    [(0.2, "pushed"), (0.8, "pulled_candidate")],
)
def test_criterion_classification_sides(tmp_path, capsys, delta, want):
    code, out, _ = _run(capsys, [
        "criterion", "--preset", "linear_shift",
        "--param", f"delta={delta}", "--out", str(tmp_path),
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["classification"] == want
    assert payload["lhs"] == pytest.approx(0.25 - delta / 3.0, abs=1e-9)
    assert payload["rhs"] == pytest.approx(delta / 6.0, abs=1e-12)
    _manifest(tmp_path, "criterion_manifest.json")


# ----------------------------------------------------------------------
# error exits
# ----------------------------------------------------------------------


def test_missing_model_flags_exit_2(tmp_path, capsys):
    code, _, err = _run(capsys, ["bound", "scalar", "--out", str(tmp_path)])
    assert code == 2
    assert err.startswith("error:")
    assert "--preset" in err


def test_bad_preset_parameter_exit_2(tmp_path, capsys):
    code, _, err = _run(capsys, [
        "bound", "scalar", "--preset", "porous_fisher",
        "--param", "m=-1", "--out", str(tmp_path),
    ])
    assert code == 2
    assert err.startswith("error:")


def test_param_not_a_number_exit_2(tmp_path, capsys):
    code, _, err = _run(capsys, [
        "bound", "scalar", "--preset", "porous_fisher",
        "--param", "m=abc", "--out", str(tmp_path),
    ])
    assert code == 2
    assert "not a number" in err


def test_syntax_error_position_exit_2(tmp_path, capsys):
    code, _, err = _run(capsys, [
        "bound", "scalar", "--D", "1", "--f", "u*(1 -", "--out", str(tmp_path),
    ])
    assert code == 2
    assert "syntax error at position" in err


def test_two_species_needs_kappa_and_nu(tmp_path, capsys):
    code, _, err = _run(capsys, [
        "bound", "two-species", "--D", "1", "--f", "u1*(1 - u1)",
        "--out", str(tmp_path),
    ])
    assert code == 2
    assert "--kappa" in err and "--nu" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["--version"])
    assert excinfo.value.code == 0
    assert "wavebound" in capsys.readouterr().out


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------


def test_simulate_scalar_writes_outputs(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "simulate", "scalar", "--preset", "fisher_kpp",
        "--L", "80", "--dx", "0.2", "--T", "25", "--out", str(tmp_path),
    ])
    assert code == 0
    payload = json.loads(out)
    # short horizon: the front is still accelerating toward 2
    assert 1.7 <= payload["fitted_speed"] <= 2.1
    assert payload["fit_residual"] >= 0.0
    assert payload["stability_report"] <= 0.2 + 1e-12
    assert payload["min_density"] >= 0.0
    assert payload["max_density"] <= 1.0 + 1e-9

    profiles = tmp_path / "profiles.csv"
    front = tmp_path / "front.csv"
    assert profiles.is_file() and front.is_file()
    assert profiles.read_text().splitlines()[0].startswith("x,rho_t")
    assert front.read_text().splitlines()[0] == "t,X"

    manifest = _manifest(tmp_path, "simulate-scalar_manifest.json")
    assert manifest["outputs"] == sorted([str(profiles), str(front)])
    assert manifest["resolved_config"]["sim"]["L"] == 80.0
    assert manifest["resolved_config"]["model"]["f"] == "u*(1 - u)"


def test_simulate_without_front_exits_5(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code, _, err = _run(capsys, [
        "simulate", "scalar", "--preset", "fisher_kpp",
        "--ic", "uniform", "--ic-value", "0.4",
        "--L", "40", "--dx", "0.2", "--T", "5", "--out", str(out_dir),
    ])
    assert code == 5
    assert "no trackable front" in err
    # the failure is detected before any file is written
    assert not out_dir.exists()


# ----------------------------------------------------------------------
# figure sweeps
# ----------------------------------------------------------------------

_FIG5_HEADER = "lambda,c_lb,c_linear,epsilon,valid,simulated,fit_residual"


def _read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def test_figure5_no_sim_decoupled_row(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("WAVEBOUND_THREADS", "2")
    out_dir = tmp_path / "a"
    code, out, _ = _run(capsys, [
        "figure", "5", "--no-sim", "--K-list", "0.5",
        "--lambda-list", "0,0.4", "--out", str(out_dir),
    ])
    assert code == 0
    payload = json.loads(out)
    assert payload["failures"] == []
    assert payload["csvs"] == [str(out_dir / "figure5_K0.5.csv")]

    header, rows = _read_csv(out_dir / "figure5_K0.5.csv")
    assert header == _FIG5_HEADER
    assert len(rows) == 2
    by_lambda = {float(r[0]): r for r in rows}
    # lambda = 0 decouples the system entirely: c = c_linear = 2, eps = 0
    decoupled = by_lambda[0.0]
    assert float(decoupled[1]) == pytest.approx(2.0, abs=1e-6)
    assert float(decoupled[2]) == pytest.approx(2.0, rel=1e-12)
    assert float(decoupled[3]) == 0.0
    assert decoupled[4] == "True"
    assert decoupled[5] == "nan" and decoupled[6] == "nan"
    coupled = by_lambda[0.4]
    assert float(coupled[1]) >= float(coupled[2]) - 1e-9

    manifest = _manifest(out_dir, "figure5_manifest.json")
    assert manifest["outputs"] == payload["csvs"]

    # identical invocation reruns byte-for-byte
    out_dir2 = tmp_path / "b"
    code2, _, _ = _run(capsys, [
        "figure", "5", "--no-sim", "--K-list", "0.5",
        "--lambda-list", "0,0.4", "--out", str(out_dir2),
    ])
    assert code2 == 0
    assert (out_dir / "figure5_K0.5.csv").read_bytes() == (
        out_dir2 / "figure5_K0.5.csv"
    ).read_bytes()


def test_figure3_partial_failure_exits_6(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "figure", "3", "--no-sim", "--kappa-list", "1,-1",
        "--out", str(tmp_path),
    ])
    assert code == 6
    payload = json.loads(out)
    assert len(payload["failures"]) == 1
    assert "-1" in payload["failures"][0]["point"]
    assert payload["failures"][0]["error"]

    header, rows = _read_csv(tmp_path / "figure3.csv")
    assert header == "kappa,c_lb,c_linear,simulated,fit_residual"
    assert len(rows) == 1
    assert float(rows[0][0]) == 1.0
    assert float(rows[0][1]) == pytest.approx(fisher_stefan_bound(1.0), rel=1e-9)
    assert float(rows[0][2]) == 2.0


def test_figure1_small_sweep_with_simulation(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "figure", "1", "--m-list", "1", "--n-list", "1",
        "--sim-L", "50", "--sim-dx", "0.2", "--sim-T", "30",
        "--out", str(tmp_path),
    ])
    assert code == 0
    assert json.loads(out)["failures"] == []
    header, rows = _read_csv(tmp_path / "figure1_m1.csv")
    assert header == "n,c_lb,c_linear,simulated,fit_residual"
    assert len(rows) == 1
    n, c_lb, c_linear, simulated, _resid = (float(v) for v in rows[0])
    assert n == 1.0
    assert c_lb == pytest.approx(2.0 ** -0.5, rel=1e-9)
    assert c_linear == 0.0
    assert simulated == pytest.approx(2.0 ** -0.5, abs=0.03)
    assert simulated >= c_lb - 0.03


# ----------------------------------------------------------------------
# worker pool sizing
# ----------------------------------------------------------------------


def test_pool_size_env_override(monkeypatch):
    monkeypatch.setenv("WAVEBOUND_THREADS", "3")
    assert cli._pool_size(8) == 3
    monkeypatch.setenv("WAVEBOUND_THREADS", "100")
    assert cli._pool_size(8) == 8
    monkeypatch.delenv("WAVEBOUND_THREADS")
    assert 1 <= cli._pool_size(8) <= 4
    assert cli._pool_size(1) == 1
