"""Result records and their CSV/JSON files.

The CSV body never contains the timestamp, so re-running a config writes
byte-identical CSV files. Floats are written with 17 significant digits.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..statistics.estimators import EstimatorReport

logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "0.1.0"
HASH_COLUMN = "config_hash"

ESTIMATOR_HEADER = (
    "experiment",
    "quantity",
    "n_samples",
    "seed",
    "estimate",
    "std_error",
    "ci_low",
    "ci_high",
    "bound",
    "bound_satisfied",
    "n_degenerate",
)


@dataclass(frozen=True)
class ResultTable:
    name: str
    header: Tuple[str, ...]
    rows: Tuple[Tuple[Any, ...], ...]

    def __post_init__(self) -> None:
        for index, row in enumerate(self.rows):
            if len(row) != len(self.header):
                raise ValueError(
                    f"Row {index} of table '{self.name}' has {len(row)} cells, "
                    f"header has {len(self.header)}"
                )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "header": list(self.header),
            "rows": [[_plain(cell) for cell in row] for row in self.rows],
        }


@dataclass
class ResultRecord:
    """One experiment run: reports, plot-ready tables and the verdicts.

    ``tables`` is ordered; the first table is the primary CSV file.
    ``violations`` names every proven statement the run contradicted.
    """

    experiment: str
    config_hash: str
    seed: int
    tables: List[ResultTable]
    reports: List[EstimatorReport] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    artifact_version: str = ARTIFACT_VERSION
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(
            timespec="seconds"
        )
    )

    def table(self, name: str) -> ResultTable:
        for table in self.tables:
            if table.name == name:
                return table
        raise KeyError(f"No table '{name}' in the {self.experiment} record")

    def body(self) -> Dict[str, Any]:
        """Everything except the timestamp."""
        return {
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "reports": [report_dict(report) for report in self.reports],
            "summary": {key: _plain(v) for key, v in sorted(self.summary.items())},
            "violations": list(self.violations),
            "tables": {table.name: table.to_dict() for table in self.tables},
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"timestamp": self.timestamp, **self.body()}


def report_dict(report: EstimatorReport) -> Dict[str, Any]:
    return {
        "quantity": report.quantity,
        "estimate": report.estimate,
        "std_error": report.std_error,
        "ci_low": report.ci_low,
        "ci_high": report.ci_high,
        "n_samples": report.n_samples,
        "n_degenerate_flagged": report.n_degenerate_flagged,
        "bound": report.bound,
        "bound_kind": report.bound_kind,
        "bound_satisfied": report.bound_satisfied,
        "violated": report.violated,
        "seed": report.seed,
    }


def estimator_table(experiment: str, reports: Sequence[EstimatorReport]) -> ResultTable:
    rows = tuple(
        (
            experiment,
            r.quantity,
            r.n_samples,
            r.seed,
            r.estimate,
            r.std_error,
            r.ci_low,
            r.ci_high,
            r.bound,
            r.bound_satisfied,
            r.n_degenerate_flagged,
        )
        for r in reports
    )
    return ResultTable("estimates", ESTIMATOR_HEADER, rows)


def _plain(value: Any) -> Any:
    """numpy scalars to Python scalars for JSON."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _finite(value: Any) -> Any:
    """NaN and infinities become null; bare NaN is not JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def format_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def write_table(table: ResultTable, path: Path, config_hash: str) -> Path:
    """One CSV file; every row ends with the config hash that produced it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow((*table.header, HASH_COLUMN))
        for row in table.rows:
            writer.writerow([*(format_cell(cell) for cell in row), config_hash])
    return path


def emit_csv(record: ResultRecord, path: Path) -> List[Path]:
    """Primary table to ``path``, every other table to ``<stem>_<name>.csv``."""
    path = Path(path)
    if not record.tables:
        raise ValueError(f"The {record.experiment} record has no tables to write")
    written = [write_table(record.tables[0], path, record.config_hash)]
    for table in record.tables[1:]:
        sibling = path.with_name(f"{path.stem}_{table.name}{path.suffix or '.csv'}")
        written.append(write_table(table, sibling, record.config_hash))
    logger.info(f"Wrote {len(written)} CSV file(s) next to {path}")
    return written


def emit_json(record: ResultRecord, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(
        _finite(record.to_dict()), sort_keys=True, indent=2, allow_nan=False
    )
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path
