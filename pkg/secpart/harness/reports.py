"""Verdict tables."""

import json
import logging
from collections.abc import Iterable
from pathlib import Path

import polars as pl

from secpart.harness.simulation import Verdict

logger = logging.getLogger(__name__)

REPORT_SCHEMA: dict[str, type[pl.DataType]] = {
    "attack": pl.Utf8,
    "stage": pl.Utf8,
    "adversaries": pl.Int64,
    "runs": pl.Int64,
    "passed": pl.Boolean,
    "detail": pl.Utf8,
}


def verdict_frame(verdicts: Iterable[Verdict]) -> pl.DataFrame:
    """One row per verdict."""
    rows = [
        {
            "attack": v.attack,
            "stage": v.stage,
            "adversaries": v.adversaries,
            "runs": v.runs,
            "passed": v.passed,
            "detail": v.detail,
        }
        for v in verdicts
    ]
    return pl.DataFrame(rows, schema=REPORT_SCHEMA)


def summarize(frame: pl.DataFrame) -> pl.DataFrame:
    """Passed and failed verdicts per stage."""
    return (
        frame.group_by("stage", maintain_order=True)
        .agg(
            pl.col("passed").sum().alias("passed"),
            (~pl.col("passed")).sum().alias("failed"),
            pl.col("runs").sum().alias("runs"),
        )
        .sort("stage")
    )


def write_report(verdicts: Iterable[Verdict], path: str | Path) -> Path:
    """Write verdicts to a CSV or JSON file, chosen by the file suffix.

    Raises:
        ValueError: If the suffix is neither `.csv` nor `.json`.

    """
    target = Path(path)
    verdicts = list(verdicts)
    if target.suffix == ".csv":
        verdict_frame(verdicts).write_csv(target)
    elif target.suffix == ".json":
        target.write_text(json.dumps([v.to_dict() for v in verdicts], indent=2) + "\n")
    else:
        raise ValueError(f"Unsupported report format: {target.suffix}. Supported: .csv, .json")
    logger.info("Wrote %d verdicts to %s", len(verdicts), target)
    return target


def all_passed(verdicts: Iterable[Verdict]) -> bool:
    """Whether every verdict passed."""
    return verdict_frame(verdicts)["passed"].all()
