"""
Report rendering and atomic file output
"""

import csv
import io
import json
import logging
import os
import tempfile
from fractions import Fraction
from typing import Any, Dict, Iterable, List

logger = logging.getLogger(__name__)

UNDEFINED = "undefined"


def render_value(value: Any, for_csv: bool = False) -> Any:
    """Rationals as "num/den", floats with six decimals, None as undefined in CSV."""
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return f"{value:.6f}"
    if value is None:
        return UNDEFINED if for_csv else None
    if isinstance(value, dict):
        return {k: render_value(v, for_csv) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render_value(v, for_csv) for v in value]
    return value


def csv_text(rows: List[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: render_value(v, for_csv=True) for k, v in row.items()})
    return buffer.getvalue()


def json_text(data: Any) -> str:
    return json.dumps(render_value(data), indent=2, sort_keys=True) + "\n"


def jsonl_text(rows: Iterable[Dict[str, Any]]) -> str:
    return "".join(json.dumps(render_value(row), sort_keys=True) + "\n" for row in rows)


def _atomic_write(text: str, path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def save_csv_file(rows: List[Dict[str, Any]], path: str) -> Dict[str, Any]:
    """
    Write rows to a CSV file atomically.

    Args:
        rows: Dictionaries sharing the same keys; the first row fixes the header.
        path: Destination file.

    Returns:
        Status dict with the path and row count.
    """
    try:
        _atomic_write(csv_text(rows), path)
        logger.info("Wrote %d rows to %s", len(rows), path)
        return {"status": "success", "path": path, "rows": len(rows)}
    except Exception as e:
        return {"status": "error", "error": str(e)}


def save_json_file(data: Any, path: str) -> Dict[str, Any]:
    try:
        _atomic_write(json_text(data), path)
        logger.info("Wrote JSON report to %s", path)
        return {"status": "success", "path": path}
    except Exception as e:
        return {"status": "error", "error": str(e)}


def save_jsonl_file(rows: List[Dict[str, Any]], path: str) -> Dict[str, Any]:
    try:
        _atomic_write(jsonl_text(rows), path)
        logger.info("Wrote %d JSON lines to %s", len(rows), path)
        return {"status": "success", "path": path, "rows": len(rows)}
    except Exception as e:
        return {"status": "error", "error": str(e)}
