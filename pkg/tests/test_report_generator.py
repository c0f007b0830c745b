"""Tests for JSON and text report rendering."""

import json
from pathlib import Path

import numpy as np
import pytest

from analysis.errors import MatrixFileError
from reports.generator import (
    fmt_complex,
    fmt_float,
    render,
    render_json,
    render_text,
    strip_timings,
    write_report,
)
from tools.analysis_tools import tool_analyze_matrix, tool_lift_phase_damping


@pytest.fixture(scope="module")
def footnote_report() -> dict:
    """Analysis report of the footnote matrix."""
    return tool_analyze_matrix(example="footnote")


def test_render_json_sorts_keys() -> None:
    """Test keys are sorted and nested dicts follow."""
    text = render_json({"b": 1, "a": {"d": 2, "c": 3}})

    assert text.index('"a"') < text.index('"b"')
    assert text.index('"c"') < text.index('"d"')
    assert text.endswith("}\n")


def test_render_json_floats_use_seventeen_digits() -> None:
    """Test floats are written with 17 significant digits and reload exactly."""
    value = 2 / 3
    text = render_json({"x": value, "y": 0.1, "z": [1.0, np.float64(1e-7)], "n": 3, "ok": True})

    assert json.loads(text) == {"x": value, "y": 0.1, "z": [1.0, 1e-7], "n": 3, "ok": True}
    assert '"x": 0.66666666666666663' in text
    assert '"y": 0.10000000000000001' in text
    assert "1.0000000000000000," in text
    assert '"n": 3' in text
    assert '"ok": true' in text


def test_render_json_numpy_values() -> None:
    """Test numpy scalars and arrays serialize as plain JSON."""
    text = render_json({"n": np.int64(3), "v": np.array([1.0, 2.0]), "ok": np.bool_(True)})

    assert json.loads(text) == {"n": 3, "v": [1.0, 2.0], "ok": True}


def test_render_json_rejects_unknown_objects() -> None:
    """Test unsupported objects still fail loudly."""
    with pytest.raises(TypeError):
        render_json({"x": object()})


def test_strip_timings(footnote_report: dict) -> None:
    """Test only the timings section is removed."""
    stripped = strip_timings(footnote_report)

    assert "timings" not in stripped
    assert set(stripped) == {"input", "canonical", "spectral", "algebra"}
    assert "timings" in footnote_report


def test_render_text_analysis(footnote_report: dict) -> None:
    """Test the text report shows the reduced form and the verdict."""
    text = render_text(footnote_report)

    assert text.startswith("Stochastic matrix analysis")
    assert "transient:     0 1" in text
    assert "B_00:" in text
    assert "[0.5, 0.25]" in text
    assert "gap estimate:  0.333" in text
    assert "verdict:       PASSED" in text


def test_render_text_lift() -> None:
    """Test lift reports use their own template."""
    text = render_text(tool_lift_phase_damping(0.7853981634, 0.7853981634))

    assert text.startswith("Unital lift analysis (phase-damping)")
    assert "isomorphism:   holds" in text
    assert "rank P_phi:    1" in text


def test_render_dispatches_on_format(footnote_report: dict) -> None:
    """Test render picks JSON or text and handles lists."""
    assert json.loads(render(footnote_report, "json"))["canonical"]["L"] == 1
    assert render([footnote_report, footnote_report], "text").count("Canonical form") == 2

    with pytest.raises(ValueError):
        render(footnote_report, "xml")


def test_fmt_helpers() -> None:
    """Test number formatting used by the templates."""
    assert fmt_float(None) == "-"
    assert fmt_float(1 / 3) == "0.333333"
    assert fmt_complex({"re": -1.0, "im": 0.0}) == "-1"
    assert fmt_complex({"re": -0.5, "im": -0.866}) == "-0.5-0.866i"


def test_write_report(tmp_path: Path) -> None:
    """Test reports are written, creating parent directories."""
    output = tmp_path / "out" / "report.json"

    assert write_report("{}\n", output) == str(output)
    assert output.read_text() == "{}\n"


def test_write_report_failure(tmp_path: Path) -> None:
    """Test an unwritable destination raises MatrixFileError."""
    blocker = tmp_path / "file"
    blocker.write_text("")

    with pytest.raises(MatrixFileError):
        write_report("{}", blocker / "report.json")
