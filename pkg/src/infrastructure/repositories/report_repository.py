"""
File implementation of the report repository.

JSON reports are written with sorted keys and a fixed indent so two runs
with the same content produce byte-identical files.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence

from ...core.interfaces.report_repository import ReportRepositoryInterface, ReportWriteError

logger = logging.getLogger(__name__)


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


class FileReportRepository(ReportRepositoryInterface):
    """Writes JSON and CSV reports to the local filesystem."""

    def write_json(self, payload: Dict[str, Any], path: Path) -> None:
        """
        Write ``payload`` as indented JSON; non-finite floats become null.

        Raises:
            ReportWriteError: If the file cannot be written
        """
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            text = json.dumps(_json_safe(payload), indent=2, sort_keys=True, allow_nan=False)
            path.write_text(text + "\n", encoding="utf-8")
        except (OSError, TypeError, ValueError) as e:
            error_msg = f"Failed to write report {path}: {e}"
            logger.error(error_msg)
            raise ReportWriteError(error_msg, cause=e)
        logger.info(f"Wrote {path}")

    def write_csv(self, rows: List[Dict[str, Any]], columns: Sequence[str], path: Path) -> None:
        """
        Write rows as CSV; missing values are left empty.

        Raises:
            ReportWriteError: If the file cannot be written
        """
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="") as handle:
                writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore")
                writer.writeheader()
                for row in rows:
                    writer.writerow({key: _csv_cell(row.get(key)) for key in columns})
        except OSError as e:
            error_msg = f"Failed to write report {path}: {e}"
            logger.error(error_msg)
            raise ReportWriteError(error_msg, cause=e)
        logger.info(f"Wrote {path} ({len(rows)} rows)")


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return value
