import subprocess
import sys

import pytest

from chirasim import cli
from chirasim.validation import Check


def _write(tmp_path, text, name="c.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_run_writes_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "scenario: sensitivity\n")
    out = tmp_path / "o"
    assert cli.main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "points.csv").exists() and (out / "report.json").exists()


def test_run_scenario_and_seed_override(tmp_path):
    cfg = _write(tmp_path, "scenario: sensitivity\ndsp: {rbw_hz: 1000, vbw_hz: 100}\nrepetitions: 1\n"
                 "angles_deg: [0.5]\n")
    out = tmp_path / "o"
    assert cli.main(["run", "--config", str(cfg), "--scenario", "snr-vs-angle", "--seed", "7", "--out", str(out)]) == 0
    assert "snr-vs-angle" in (out / "report.json").read_text()
    assert '"seed": 7' in (out / "report.json").read_text()


def test_config_error_exit_1(tmp_path, capsys):
    cfg = _write(tmp_path, "scenario: sensitivity\ntypo_key: 3\n")
    assert cli.main(["run", "--config", str(cfg)]) == 1
    assert "typo_key" in capsys.readouterr().err


def test_missing_config_exit_1(tmp_path):
    assert cli.main(["run", "--config", str(tmp_path / "none.yaml")]) == 1


def test_degenerate_exit_2(tmp_path, capsys):
    cfg = _write(tmp_path, "scenario: snr-vs-angle\nrepetitions: 1\nangles_deg: [22.5]\n"
                 "dsp: {rbw_hz: 1000, vbw_hz: 1000}\noutput: {dir: " + str(tmp_path / "o") + "}\n")
    assert cli.main(["run", "--config", str(cfg)]) == 2
    assert "slope" in capsys.readouterr().err


def test_validate_quick_exit_0(capsys):
    assert cli.main(["validate", "--quick"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_validation_failure_exit_3(monkeypatch, capsys):
    import chirasim.validation as v

    monkeypatch.setattr(v, "run_checks", lambda **kw: [Check("broken", False, "forced")])
    assert cli.main(["validate", "--quick"]) == 3
    assert "FAIL  broken" in capsys.readouterr().out


def test_spectrum_command(tmp_path):
    cfg = _write(tmp_path, "dsp: {rbw_hz: 1000, vbw_hz: 100}\n")
    out = tmp_path / "s" / "spec.csv"
    assert cli.main(["spectrum", "--config", str(cfg), "--out", str(out), "--probe", "coherent"]) == 0
    assert out.read_text().startswith("freq_hz,power_db\n")


def test_bad_seed_rejected():
    with pytest.raises(SystemExit):
        cli.main(["run", "--config", "x.yaml", "--seed", "-1"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "chirasim", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "chirasim" in r.stdout
