"""Tests for the command line entry point."""

import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

import cli
from analysis.errors import RankMismatch
from reports.generator import strip_timings


def _json_stdout(capsys: pytest.CaptureFixture[str]) -> dict:
    return json.loads(capsys.readouterr().out)


def _error(capsys: pytest.CaptureFixture[str]) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_analyze_example_json(capsys: pytest.CaptureFixture[str]) -> None:
    """Test analyzing S3 by name."""
    code = cli.main(["analyze", "--example", "s3", "--format", "json"])
    report = _json_stdout(capsys)

    assert code == 0
    assert report["canonical"]["L"] == 2
    assert report["algebra"]["automorphism_order"] == 2


def test_analyze_defaults_to_text(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the default report format is text."""
    code = cli.main(["analyze", "--example", "footnote"])

    assert code == 0
    assert capsys.readouterr().out.startswith("Stochastic matrix analysis")


def test_analyze_footnote_file(footnote_csv: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test the footnote matrix from CSV reproduces B_00 and gap 1/3."""
    code = cli.main(["analyze", str(footnote_csv), "--format", "json"])
    report = _json_stdout(capsys)

    assert code == 0
    np.testing.assert_allclose(
        report["canonical"]["transient_block"], [[0.5, 0.25], [0.0, 2 / 3]], atol=1e-9
    )
    assert report["spectral"]["gap_estimate"] == pytest.approx(1 / 3, abs=1e-3)


def test_analyze_output_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test --output writes the report instead of printing it."""
    output = tmp_path / "report.json"
    code = cli.main(["analyze", "--example", "two-state", "--format", "json", "-o", str(output)])

    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(output.read_text())["spectral"]["decoherence_time"] == 11


def test_repeated_runs_are_identical(tmp_path: Path) -> None:
    """Test two runs produce the same report apart from timings."""
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        cli.main(["analyze", "--example", "cycle-2-3", "--format", "json", "-o", str(path)])

    first, second = (strip_timings(json.loads(p.read_text())) for p in paths)
    assert first == second


def test_flags_reach_settings(capsys: pytest.CaptureFixture[str]) -> None:
    """Test tolerance flags end up in the recorded settings."""
    argv = ["analyze", "--example", "s3", "--format", "json", "--tol", "1e-7", "--epsilon", "0.01"]
    cli.main(argv)
    settings = _json_stdout(capsys)["input"]["settings"]

    assert settings["proj_tol"] == 1e-7
    assert settings["alg_tol"] == 1e-7
    assert settings["epsilon"] == 0.01


def test_missing_file_exit_code(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test an unreadable file exits with the input code."""
    code = cli.main(["analyze", str(tmp_path / "missing.csv")])

    assert code == 2
    assert _error(capsys)["type"] == "MatrixFileError"


def test_ragged_csv_exit_code(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test a malformed CSV exits with the input code."""
    path = tmp_path / "ragged.csv"
    path.write_text("0.5,0.25,0.25\n0.5,0.5\n")

    assert cli.main(["analyze", str(path)]) == 2
    assert _error(capsys)["type"] == "ParseError"


def test_negative_entry_exit_code(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test a negative entry exits with the input code."""
    path = tmp_path / "negative.csv"
    path.write_text("1.5,-0.5\n0,1\n")

    assert cli.main(["analyze", str(path)]) == 2
    assert _error(capsys)["type"] == "NegativeEntry"


def test_no_convergence_exit_code(capsys: pytest.CaptureFixture[str]) -> None:
    """Test an exhausted squaring budget exits with code 3."""
    code = cli.main(["analyze", "--example", "two-state", "--max-squarings", "1"])

    assert code == 3
    assert _error(capsys)["type"] == "NoConvergence"


def test_decoherence_timeout_exit_code(capsys: pytest.CaptureFixture[str]) -> None:
    """Test a decoherence scan past --t-max exits with code 3."""
    code = cli.main(["analyze", "--example", "two-state", "--t-max", "5"])

    assert code == 3
    assert _error(capsys)["type"] == "DecoherenceTimeout"


def test_verification_error_exit_code(capsys: pytest.CaptureFixture[str]) -> None:
    """Test a verification exception exits with code 4."""
    with patch.object(cli, "tool_analyze_matrix", side_effect=RankMismatch("rank 3, expected 2")):
        code = cli.main(["analyze", "--example", "s3"])

    assert code == 4
    assert _error(capsys) == {"error": "rank 3, expected 2", "type": "RankMismatch"}


def test_failed_checks_still_write_report(capsys: pytest.CaptureFixture[str]) -> None:
    """Test a completed analysis with failing checks prints its report and exits 4."""
    with patch.object(cli, "report_passed", return_value=False):
        code = cli.main(["analyze", "--example", "s3", "--format", "json"])

    assert code == 4
    assert _json_stdout(capsys)["canonical"]["L"] == 2


def test_bad_epsilon_is_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
    """Test epsilon outside (0, 1) exits with the usage code."""
    assert cli.main(["analyze", "--example", "s3", "--epsilon", "2"]) == 1
    assert _error(capsys)["type"] == "ValueError"


def test_usage_errors() -> None:
    """Test argument errors exit with code 1."""
    for argv in ([], ["analyze", "--example", "nope"], ["analyze", "--tol", "-1", "x.csv"]):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(argv)
        assert excinfo.value.code == 1


def test_analyze_needs_input(footnote_csv: Path) -> None:
    """Test analyze requires exactly one kind of input."""
    assert cli.main(["analyze"]) == 1
    assert cli.main(["analyze", str(footnote_csv), "--example", "s3"]) == 1


def test_batch_reports_in_input_order(
    footnote_csv: Path, identity_json: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Test several files are analyzed and reported in the order given."""
    code = cli.main(["analyze", str(footnote_csv), str(identity_json), "--format", "json"])
    reports = json.loads(capsys.readouterr().out)

    assert code == 0
    assert [r["input"]["source"] for r in reports] == [str(footnote_csv), str(identity_json)]


def test_batch_with_bad_file(
    footnote_csv: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Test a bad file in a batch is reported while the rest still succeed."""
    missing = tmp_path / "missing.csv"
    code = cli.main(["analyze", str(missing), str(footnote_csv), "--format", "json"])
    captured = capsys.readouterr()

    assert code == 2
    assert len(json.loads(captured.out)) == 1
    assert json.loads(captured.err.strip().splitlines()[-1])["source"] == str(missing)


def test_lift_phase_damping(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the phase-damping lift at pi/4 has a one-dimensional persistent system."""
    code = cli.main(
        [
            "lift",
            "phase-damping",
            "--alpha",
            "0.7853981634",
            "--beta",
            "0.7853981634",
            "--format",
            "json",
        ]
    )
    report = _json_stdout(capsys)

    assert code == 0
    assert report["lift"]["iso"]["holds"] is True
    assert report["lift"]["rank"] == 1


def test_lift_phase_damping_identity(capsys: pytest.CaptureFixture[str]) -> None:
    """Test alpha = 0, beta = pi/2 embeds the identity."""
    argv = ["lift", "phase-damping", "--alpha", "0", "--beta", "1.5707963268", "--format", "json"]
    code = cli.main(argv)
    report = _json_stdout(capsys)

    assert code == 0
    assert report["lift"]["embedded_stochastic"] == [[1.0, 0.0], [0.0, 1.0]]
    assert report["lift"]["rank"] == 2


def test_lift_pullover(identity_json: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test the pullover of the 2 x 2 identity from a file."""
    code = cli.main(["lift", "pullover", str(identity_json), "--format", "json"])

    assert code == 0
    assert _json_stdout(capsys)["lift"]["rank"] == 2


def test_lift_pullover_text(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the lift text report by example name."""
    assert cli.main(["lift", "pullover", "--example", "cycle-3"]) == 0
    assert "Unital lift analysis (pullover)" in capsys.readouterr().out


def test_lift_pullover_needs_input() -> None:
    """Test pullover requires a file or an example."""
    assert cli.main(["lift", "pullover"]) == 1
