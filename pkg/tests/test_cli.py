"""Command-line behavior: exit codes, printed reports, artifact files."""
import json
import subprocess
import sys

import pytest

from zerowrench.cli import EXIT_CONFIG, EXIT_OK, EXIT_SAFETY, main
from zerowrench.harness import preset_scenario, save_config


@pytest.fixture
def short_config(tmp_path):
    def make(controller, duration=0.3, **kw):
        path = tmp_path / f"{controller.lower()}.json"
        save_config(preset_scenario(controller, duration=duration, **kw), path)
        return str(path)
    return make


def test_validate_accepts_a_good_config(short_config, capsys):
    assert main(["validate", "--config", short_config("PD_l")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "config ok" in out
    assert "pd_l_nominal" in out
    assert "seed 2024" in out


def test_validate_rejects_missing_and_broken_files(tmp_path, capsys):
    assert main(["validate", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    broken = tmp_path / "broken.json"
    broken.write_text("{]")
    assert main(["validate", "--config", str(broken)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "config error" in err


def test_validate_rejects_tampered_gains(short_config, tmp_path, capsys):
    path = short_config("PD_l")
    doc = json.loads(open(path).read())
    doc["gains"]["kp"] = [9.0, 9.0, 9.0]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc))
    assert main(["validate", "--config", str(tampered)]) == EXIT_CONFIG


def test_run_clean_scenario_exits_zero_and_writes_artifacts(short_config, tmp_path,
                                                            capsys):
    out_dir = tmp_path / "run_out"
    code = main(["run", "--config", short_config("PD_l"), "--out", str(out_dir)])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "scenario pd_l_nominal (PD_l)" in text
    assert "stop: none" in text
    assert (out_dir / "pd_l_nominal_trace.csv").exists()
    assert (out_dir / "pd_l_nominal_summary.json").exists()


def test_run_reports_safety_stop_with_exit_two(short_config, capsys):
    # the aggressive conventional observer trips the force guard early on
    code = main(["run", "--config", short_config("CWDOB", duration=0.5)])
    assert code == EXIT_SAFETY
    assert "stop: force" in capsys.readouterr().out


def test_run_seed_override_lands_in_the_summary(short_config, tmp_path, capsys):
    out_dir = tmp_path / "seeded"
    code = main(["run", "--config", short_config("PD_l"), "--seed", "31",
                 "--out", str(out_dir)])
    assert code == EXIT_OK
    summary = json.loads((out_dir / "pd_l_nominal_summary.json").read_text())
    assert summary["seed"] == 31


def test_run_rejects_negative_seed(short_config, capsys):
    code = main(["run", "--config", short_config("PD_l"), "--seed", "-3"])
    assert code == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_compare_prints_rankings_and_flags_stops(short_config, tmp_path, capsys):
    # the base config pins world + duration; all four controllers inherit it
    out_dir = tmp_path / "cmp"
    code = main(["compare", "--config", short_config("PD_l", duration=0.25),
                 "--out", str(out_dir)])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "ranking by final depth: " in text
    assert "ranking by peak regulated wrench: " in text
    assert "safety stops: cwdob_nominal" in text
    for name in ("pd_l_nominal", "pd_h_nominal", "cwdob_nominal", "dwdob_nominal"):
        assert name in text
    assert (out_dir / "compare.csv").exists()
    summary = json.loads((out_dir / "compare_summary.json").read_text())
    assert len(summary["runs"]) == 4


def test_sweep_prints_per_trial_lines_and_totals(short_config, tmp_path, capsys):
    out_dir = tmp_path / "swp"
    code = main(["sweep", "--config", short_config("DWDOB", duration=0.4),
                 "--trials", "3", "--workers", "1", "--out", str(out_dir)])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert sum(1 for ln in lines if ln.startswith("tilt ")) == 3
    assert lines[-1].startswith("successes: ")
    rows = (out_dir / "sweep.csv").read_text().splitlines()
    assert len(rows) == 4


def test_usage_errors_map_to_the_config_exit_code(capsys):
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main(["run", "--preset", "bogus"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG
    capsys.readouterr()   # swallow argparse chatter


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "run" in capsys.readouterr().out


def test_console_script_is_wired_up(short_config):
    proc = subprocess.run([sys.executable, "-m", "zerowrench.cli", "validate",
                           "--config", short_config("DWDOB")],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert "config ok" in proc.stdout
