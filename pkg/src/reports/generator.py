"""Report rendering: sorted-key JSON and Jinja2 text templates."""

import json
import logging
import math
import re
from pathlib import Path
from typing import Any

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from analysis.errors import MatrixFileError
from config import TEMPLATE_DIR

logger = logging.getLogger(__name__)

FORMATS = ("json", "text")
FLOAT_DIGITS = 17

_FLOAT_MARK = "\x00float:"
# json escapes the NUL of the mark as \u0000
_FLOAT_TOKEN = re.compile(r'"\\u0000float:([^"]+)"')


def fmt_float(value: Any, digits: int = 6) -> str:
    """Compact fixed-significance rendering for the text report."""
    if value is None:
        return "-"
    return f"{float(value):.{digits}g}"


def fmt_complex(pair: dict[str, float]) -> str:
    re, im = pair["re"], pair["im"]
    if im == 0:
        return fmt_float(re)
    sign = "-" if im < 0 else "+"
    return f"{fmt_float(re)}{sign}{fmt_float(abs(im))}i"


def fmt_row(row: list[float]) -> str:
    return "[" + ", ".join(fmt_float(v, 4) for v in row) + "]"


env = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    autoescape=select_autoescape(["html", "xml"]),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)

env.filters["fmt"] = fmt_float
env.filters["cpx"] = fmt_complex
env.filters["row"] = fmt_row


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def strip_timings(report: dict[str, Any]) -> dict[str, Any]:
    """Copy of the report without its timings, the only nondeterministic section."""
    return {k: v for k, v in report.items() if k != "timings"}


def _fixed_digits(value: Any) -> Any:
    """Replace finite floats with marked strings carrying FLOAT_DIGITS significant digits."""
    if isinstance(value, dict):
        return {k: _fixed_digits(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return _fixed_digits(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_fixed_digits(v) for v in value]
    if isinstance(value, (float, np.floating)) and math.isfinite(value):
        return f"{_FLOAT_MARK}{float(value):#.{FLOAT_DIGITS}g}"
    return value


def render_json(report: dict[str, Any] | list[dict[str, Any]]) -> str:
    """
    Sorted keys, two-space indent, finite floats with FLOAT_DIGITS significant digits.
    """
    text = json.dumps(_fixed_digits(report), sort_keys=True, indent=2, default=_jsonable)
    return _FLOAT_TOKEN.sub(r"\1", text) + "\n"


def render_text(report: dict[str, Any]) -> str:
    """Human-readable summary; lift reports get their own template."""
    name = "lift_report.txt.j2" if "lift" in report else "analysis_report.txt.j2"
    template = env.get_template(name)
    return template.render(report=report)


def render(report: dict[str, Any] | list[dict[str, Any]], format: str = "text") -> str:
    if format not in FORMATS:
        raise ValueError(f"unknown report format {format!r}; expected one of {FORMATS}")
    if format == "json":
        return render_json(report)
    reports = report if isinstance(report, list) else [report]
    return "\n".join(render_text(r) for r in reports)


def write_report(content: str, path: str | Path) -> str:
    """
    Write the rendered report to path.

    Returns:
        The path written, as a string

    Raises:
        MatrixFileError: The output file cannot be written
    """
    output_file = Path(path)
    try:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        output_file.write_text(content, encoding="utf-8")
    except OSError as e:
        raise MatrixFileError(f"cannot write {output_file}: {e.strerror or e}") from e
    logger.info("report written to %s", output_file)
    return str(output_file)
