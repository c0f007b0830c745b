"""Reading stochastic matrices from CSV and JSON files."""

import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from analysis.errors import MatrixFileError, ParseError
from analysis.matrix_core import DEFAULT_VALIDATION_TOL, StochasticMatrix, make_stochastic

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")
EXTENSIONS = {".csv": "csv", ".json": "json"}


@dataclass(frozen=True)
class LoadedMatrix:
    """A validated matrix together with where it came from."""

    matrix: StochasticMatrix
    source: str
    name: str | None
    digest: str


def detect_format(path: Path, format: str | None = None) -> str:
    """Explicit format if given, else guessed from the file extension (default csv)."""
    if format is not None:
        if format not in FORMATS:
            raise ParseError(f"unknown matrix format {format!r}; expected one of {FORMATS}")
        return format
    return EXTENSIONS.get(path.suffix.lower(), "csv")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def rows_digest(rows: list[list[float]]) -> str:
    """Digest of a matrix given in memory, over its canonical JSON encoding."""
    return sha256_hex(json.dumps(rows, separators=(",", ":")).encode("utf-8"))


def parse_csv_rows(text: str) -> list[list[float]]:
    """
    One row per line, comma-separated decimal literals, no header.

    Raises:
        ParseError: A field is not a number or the rows have unequal lengths
    """
    rows: list[list[float]] = []
    for lineno, record in enumerate(csv.reader(io.StringIO(text)), start=1):
        fields = [f.strip() for f in record]
        if not any(fields):
            continue
        try:
            rows.append([float(f) for f in fields])
        except ValueError as e:
            raise ParseError(f"line {lineno}: {e}") from e

    if not rows:
        raise ParseError("no matrix rows found")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError(f"rows have unequal lengths {sorted(widths)}")
    return rows


def parse_json_document(text: str) -> tuple[list[list[float]], str | None]:
    """
    Parse {"matrix": [[...], ...], "name": optional text}.

    Raises:
        ParseError: Malformed JSON, missing "matrix" or ragged rows
    """
    try:
        doc: Any = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e

    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ParseError('JSON input must be an object with a "matrix" key')
    rows = doc["matrix"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError('"matrix" must be a list of rows')
    if len({len(r) for r in rows}) > 1:
        raise ParseError("rows have unequal lengths")
    try:
        values = [[float(v) for v in r] for r in rows]
    except (TypeError, ValueError) as e:
        raise ParseError(f"non-numeric matrix entry: {e}") from e

    name = doc.get("name")
    return values, name if isinstance(name, str) else None


def load_matrix(
    path: str | Path,
    format: str | None = None,
    validation_tol: float = DEFAULT_VALIDATION_TOL,
) -> LoadedMatrix:
    """
    Read, parse and validate a matrix file.

    Args:
        path: CSV or JSON file
        format: "csv" or "json"; guessed from the extension when None
        validation_tol: Passed on to make_stochastic

    Raises:
        MatrixFileError: The file cannot be read
        ParseError: The contents are not a matrix
        InputError: The matrix is not stochastic
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise MatrixFileError(f"cannot read {path}: {e.strerror or e}") from e

    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 text") from e

    fmt = detect_format(path, format)
    name = None
    if fmt == "json":
        rows, name = parse_json_document(text)
    else:
        rows = parse_csv_rows(text)

    logger.debug("parsed %d rows from %s as %s", len(rows), path, fmt)
    return LoadedMatrix(
        matrix=make_stochastic(rows, validation_tol),
        source=str(path),
        name=name,
        digest=sha256_hex(raw),
    )


def parse_matrix(path: str | Path, format: str | None = None) -> StochasticMatrix:
    """The validated matrix stored at path."""
    return load_matrix(path, format).matrix
