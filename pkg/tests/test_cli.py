import json

import pytest

from pipediff import TRACE_HEADER
from pipediff.cli import main

from conftest import REFERENCE_SCN


def write_scenario(tmp_path, text, name="case.scn"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture()
def bad_scenario(tmp_path, reference_text):
    return write_scenario(
        tmp_path, reference_text.replace("sweep_angle = 180.0", "sweep_angle = 270.0")
    )


@pytest.fixture()
def no_fit_scenario(tmp_path, reference_text):
    # a 200 mm body needs ~19.9 mm of compression in the elbow
    text = reference_text.replace("length = 61.0", "length = 200.0")
    text = text.replace("max_tilt_deg = 10.0", "max_tilt_deg = 30.0")
    return write_scenario(tmp_path, text)


class TestValidate:
    def test_good_scenario_exits_zero(self, capsys):
        assert main(["validate", str(REFERENCE_SCN)]) == 0
        out = capsys.readouterr().out
        assert "OK" in out and "4 segments" in out

    def test_bad_scenario_exits_one_with_diagnostics(self, bad_scenario, capsys):
        assert main(["validate", bad_scenario]) == 1
        err = capsys.readouterr().err
        assert "sweep_angle" in err and "line" in err

    def test_missing_file_exits_one(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.scn")]) == 1
        assert "cannot read" in capsys.readouterr().err


class TestRun:
    def test_writes_trace_and_report(self, tmp_path, capsys):
        trace = tmp_path / "out.csv"
        report = tmp_path / "report.txt"
        code = main([
            "run", str(REFERENCE_SCN),
            "--trace", str(trace),
            "--report", str(report),
        ])
        assert code == 0
        lines = trace.read_text().splitlines()
        assert lines[0] == TRACE_HEADER
        assert len(lines) > 6000
        assert "run completed" in report.read_text()
        assert capsys.readouterr().out == ""

    def test_json_report_to_stdout(self, capsys):
        assert main(["run", str(REFERENCE_SCN), "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["run"]["completed"] is True

    def test_theta_override_changes_the_inner_track(self, capsys):
        assert main(["run", str(REFERENCE_SCN), "--format", "json", "--theta", "120"]) == 0
        payload = json.loads(capsys.readouterr().out)
        elbow = payload["segments"][1]["tracks"]
        # at theta = 120 deg module C faces the bend center
        assert elbow["C"]["mean_speed_mm_s"] < elbow["A"]["mean_speed_mm_s"]

    def test_no_fit_exits_two_with_partial_trace(self, no_fit_scenario, tmp_path, capsys):
        trace = tmp_path / "partial.csv"
        code = main(["run", no_fit_scenario, "--trace", str(trace)])
        assert code == 2
        captured = capsys.readouterr()
        assert "compression" in captured.err
        assert len(trace.read_text().splitlines()) > 1  # header plus partial rows

    def test_seed_flag_and_env_fallback(self, tmp_path, reference_text, capsys, monkeypatch):
        noisy = write_scenario(
            tmp_path,
            reference_text.replace(
                "disturbance_amplitude = 0.0", "disturbance_amplitude = 0.025"
            ),
        )
        assert main(["run", noisy, "--format", "json", "--seed", "7"]) == 0
        by_flag = json.loads(capsys.readouterr().out)
        assert by_flag["run"]["disturbance_seed"] == 7

        monkeypatch.setenv("PIPEDIFF_SEED", "7")
        assert main(["run", noisy, "--format", "json"]) == 0
        by_env = json.loads(capsys.readouterr().out)
        assert by_env == by_flag

        monkeypatch.setenv("PIPEDIFF_SEED", "not-a-number")
        assert main(["run", noisy]) == 1
        assert "PIPEDIFF_SEED" in capsys.readouterr().err


class TestSweep:
    def test_three_orientations(self, capsys):
        assert main(["sweep", str(REFERENCE_SCN), "--theta-steps", "3"]) == 0
        out = capsys.readouterr().out
        assert "3 runs" in out
        for theta in ("0.0", "120.0", "240.0"):
            assert theta in out

    def test_json_aggregate(self, capsys):
        assert main([
            "sweep", str(REFERENCE_SCN), "--theta-steps", "2", "--format", "json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        thetas = [entry["theta_deg"] for entry in payload["orientations"]]
        assert thetas == [0.0, 180.0]

    def test_zero_steps_is_a_usage_error(self, capsys):
        assert main(["sweep", str(REFERENCE_SCN), "--theta-steps", "0"]) == 1

    def test_sweep_with_no_fit_exits_two(self, no_fit_scenario, capsys):
        assert main(["sweep", no_fit_scenario, "--theta-steps", "2"]) == 2
        assert "compression" in capsys.readouterr().err
