"""Result tables, CSV and JSON emission."""

import json
import math

import numpy as np
import pytest

from levelstat.experiments import (
    ResultRecord,
    ResultTable,
    emit_csv,
    emit_json,
    estimator_table,
    format_cell,
)
from levelstat.statistics import EstimatorReport


def report(estimate=0.25):
    return EstimatorReport(
        quantity="mean_trace",
        estimate=estimate,
        std_error=0.01,
        ci_low=estimate - 0.03,
        ci_high=estimate + 0.03,
        n_samples=100,
        n_degenerate_flagged=0,
        bound=1.6,
        seed=3,
    )


def record(timestamp):
    reports = [report()]
    return ResultRecord(
        experiment="wegner",
        config_hash="ab" * 32,
        seed=3,
        tables=[
            estimator_table("wegner", reports),
            ResultTable("extra", ("x", "y"), ((1, 0.1), (2, math.nan))),
        ],
        reports=reports,
        summary={"bound_satisfied": np.bool_(True)},
        timestamp=timestamp,
    )


def test_format_cell():
    """Floats keep 17 significant digits; booleans and blanks are spelled out."""
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(np.float64(2.5)) == "2.5"
    assert format_cell(True) == "true"
    assert format_cell(np.bool_(False)) == "false"
    assert format_cell(None) == ""
    assert format_cell(math.nan) == "nan"
    assert format_cell(7) == "7"


def test_table_rows_must_match_header():
    """A short row is refused."""
    with pytest.raises(ValueError):
        ResultTable("bad", ("a", "b"), ((1,),))


def test_estimator_table_layout():
    """One row per report in the fixed column order."""
    table = estimator_table("wegner", [report(), report(0.5)])

    assert table.name == "estimates"
    assert table.header[0] == "experiment" and table.header[-1] == "n_degenerate"
    assert table.rows[1][4] == 0.5
    assert table.rows[0][9] is True


def test_csv_is_byte_identical_across_runs(tmp_path):
    """Records differing only in timestamp write identical CSV files."""
    first = emit_csv(record("2024-01-01T00:00:00+00:00"), tmp_path / "a" / "run.csv")
    second = emit_csv(record("2030-06-01T12:00:00+00:00"), tmp_path / "b" / "run.csv")

    assert [p.name for p in first] == ["run.csv", "run_extra.csv"]
    for left, right in zip(first, second):
        assert left.read_bytes() == right.read_bytes()
    lines = first[0].read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("experiment,quantity,n_samples,seed,estimate")
    assert lines[1].startswith("wegner,mean_trace,100,3,0.25,")
    assert lines[0].endswith(",n_degenerate,config_hash")
    assert lines[1].endswith("," + "ab" * 32)
    assert first[1].read_text(encoding="utf-8").endswith("2,nan," + "ab" * 32 + "\n")


def test_json_document(tmp_path):
    """JSON carries the timestamp, sorted keys and plain values."""
    path = emit_json(record("2024-01-01T00:00:00+00:00"), tmp_path / "run.json")
    text = path.read_text(encoding="utf-8")
    document = json.loads(text)

    assert text.endswith("\n")
    assert document["timestamp"] == "2024-01-01T00:00:00+00:00"
    assert document["summary"] == {"bound_satisfied": True}
    assert document["reports"][0]["bound_kind"] == "proven"
    assert document["tables"]["estimates"]["header"][0] == "experiment"
    assert list(document) == sorted(document)


def test_json_has_no_bare_nan(tmp_path):
    """Non-finite floats are written as null so strict parsers accept the file."""
    path = emit_json(record("2024-01-01T00:00:00+00:00"), tmp_path / "run.json")
    text = path.read_text(encoding="utf-8")

    def refuse(constant):
        raise ValueError(constant)

    document = json.loads(text, parse_constant=refuse)
    assert "NaN" not in text
    assert document["tables"]["extra"]["rows"][1] == [2, None]


def test_body_excludes_timestamp():
    """Two records from the same run agree outside the timestamp."""
    first, second = record("t1"), record("t2")
    assert first.body() == second.body()
    assert "timestamp" not in first.body()
    assert first.table("extra").header == ("x", "y")
    with pytest.raises(KeyError):
        first.table("missing")
