import json

import pytest

from echotomo.cli import build_config, make_parser, parse_config_file, run
from echotomo.dataio import fixture_path
from echotomo.pipeline import PipelineConfig


def test_parse_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        """
        # comment line
        seed = 3
        trials = 10   # trailing comment
        visibility = 0.8
        memory = true
        """
    )
    values = parse_config_file(cfg)
    assert values == {"seed": "3", "trials": "10", "visibility": "0.8", "memory": "true"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_file(bad)


def test_build_config_flags_override_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 3\ntrials = 10\nvisibility = 0.8\n")
    args = make_parser().parse_args(
        ["simulate", "--config", str(cfg), "--seed", "9"]
    )
    config = build_config(args)
    assert config.seed == 9  # flag wins
    assert config.trials == 10
    assert config.visibility == 0.8
    assert isinstance(config, PipelineConfig)


def test_build_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("wibble = 1\n")
    args = make_parser().parse_args(["simulate", "--config", str(cfg)])
    with pytest.raises(ValueError, match="wibble"):
        build_config(args)


def test_cli_afc(tmp_path, capsys):
    echo_csv = tmp_path / "echo.csv"
    comb_csv = tmp_path / "comb.csv"
    code = run(["afc", "--echo-csv", str(echo_csv), "--comb-csv", str(comb_csv)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["storage_time_s"] == pytest.approx(5e-9)
    assert abs(out["echo_peak_s"] - 5e-9) <= out["grid"]["dt_s"]
    assert echo_csv.read_text().startswith("t_seconds,re,im,abs2")
    assert comb_csv.read_text().startswith("detuning_hz,optical_depth")


def test_cli_simulate_and_tomo(tmp_path, capsys):
    ds_path = tmp_path / "synthetic.json"
    assert run(["simulate", "--exact", "--out", str(ds_path)]) == 0
    capsys.readouterr()
    doc = json.loads(ds_path.read_text())
    assert doc["format"] == "counts"
    assert len(doc["records"]) == 9

    out_path = tmp_path / "tomo.json"
    code = run(
        ["tomo", "--dataset", str(ds_path), "--trials", "3", "--out", str(out_path)]
    )
    assert code == 0
    report = json.loads(out_path.read_text())
    # the synthetic default-visibility state reproduces its fidelity target
    assert report["metrics"]["fidelity_phi_plus"] == pytest.approx(0.825, abs=0.01)
    assert report["uncertainties"]["trials"] == 3


def test_cli_bell(capsys):
    code = run(["bell", "--dataset", str(fixture_path("table_s2_in")), "--trials", "5"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["s_measured"] == pytest.approx(2.382)
    assert set(out["correlations"]) == {"ab", "abp", "apb", "apbp"}


def test_cli_report(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code = run(["report", "--trials", "2", "--out", str(out_path)])
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["schema_version"] == "1"
    assert report["bell"]["in"]["s_measured"] == pytest.approx(2.382)
    assert report["tomography"]["in"]["metrics"]["fidelity_phi_plus"] == pytest.approx(
        0.825, abs=0.02
    )
    assert set(report["provenance"]["fixtures"]) == {
        "bell_in",
        "bell_out",
        "tomo_in",
        "tomo_out",
    }


def test_cli_error_is_json_on_stderr(capsys):
    code = run(["tomo", "--dataset", "/nonexistent.json"])
    assert code == 1
    captured = capsys.readouterr()
    err = json.loads(captured.err)
    assert err["command"] == "tomo"
    assert "error" in err and "message" in err
