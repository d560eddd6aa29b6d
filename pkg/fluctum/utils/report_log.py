"""
Report Log - row collection and CSV export for verification runs

Every command appends one row per grid point to a named report
(verify / bounds / sweep). Rows are written with a fixed column order
and round-trip safe float formatting.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from fluctum.config.settings import settings

logger = logging.getLogger(__name__)


class ReportLog:
    """
    Collects report rows and failure records for one CLI run.

    Log structure:
    - report: report kind (verify / bounds / sweep)
    - rows: list of flat dictionaries, one per grid point
    - failures: machine-parseable failure records
    """

    def __init__(self, columns: Dict[str, Sequence[str]]):
        """
        Args:
            columns: Fixed column order for every report kind
        """
        self.columns = {kind: list(cols) for kind, cols in columns.items()}
        self.rows: Dict[str, List[Dict[str, Any]]] = {kind: [] for kind in columns}
        self.failures: List[Dict[str, Any]] = []

    def log(self, report: str, row: Dict[str, Any]) -> None:
        if report not in self.rows:
            raise KeyError(f"Unknown report kind: {report}")
        missing = set(self.columns[report]) - set(row)
        if missing:
            raise KeyError(f"Row for '{report}' is missing columns {sorted(missing)}")
        self.rows[report].append(row)
        logger.debug("%s row %s", report, row.get("channel_id"))

    def fail(self, failure: Dict[str, Any]) -> None:
        self.failures.append(failure)
        logger.warning("Check failed: %s", failure.get("message"))

    def frame(self, report: str) -> pd.DataFrame:
        return pd.DataFrame(self.rows[report], columns=self.columns[report])

    def save(self, report: str, path: Path, float_format: Optional[str] = None) -> Path:
        """Write one report to CSV; creates parent directories."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.frame(report).to_csv(
            path,
            index=False,
            float_format=float_format or settings.csv_float_format,
        )
        logger.info("Saved %d %s rows to %s", len(self.rows[report]), report, path)
        return path

    def get_summary(self) -> Dict[str, Any]:
        return {
            "rows": {kind: len(rows) for kind, rows in self.rows.items()},
            "failures": len(self.failures),
            "failure_kinds": sorted({f.get("kind", "error") for f in self.failures}),
        }
