"""Load one numeric column of a comma-separated file into a `Sample`."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DataError
from .ustat import Sample

log = logging.getLogger(__name__)

EXAMPLE_DATASET = "americas_gdp_synthetic.csv"
EXAMPLE_COLUMN = "gdp_per_capita"
EXAMPLE_SCALE = 1e-3  # US dollars to thousands


@dataclass
class DatasetMeta:
    source: str
    column: str | int
    rows: int
    dropped: list[tuple[int, str]] = field(default_factory=list)
    scale: float = 1.0
    header: list[str] | None = None

    @property
    def dropped_count(self) -> int:
        return len(self.dropped)


def _parse_number(text: str) -> float | None:
    try:
        return float(text.strip())
    except ValueError:
        return None


def _resolve_column(column, header: list[str] | None, width: int) -> int:
    if isinstance(column, int):
        index = column
    elif isinstance(column, str) and column.strip().lstrip("-").isdigit():
        index = int(column)
    else:
        if header is None:
            raise DataError(f"column {column!r} given by name but the file has no header row")
        names = [h.strip() for h in header]
        if column not in names:
            raise DataError(f"column {column!r} not found; header has {names}")
        return names.index(column)
    if not 0 <= index < width:
        raise DataError(f"column index {index} out of range for {width} columns")
    return index


def load_csv(path, column: str | int = 0, scale: float = 1.0, policy: str = "fail") -> tuple[Sample, DatasetMeta]:
    """Read ``column`` from a comma-separated file and multiply it by ``scale``.

    The first row is taken as a header when its cell in the target column
    does not parse as a number. ``policy`` is ``"fail"`` (stop at the first
    bad cell, reporting its 1-based line number) or ``"drop"`` (skip and
    record bad rows in the returned metadata).
    """
    if policy not in ("fail", "drop"):
        raise DataError(f"policy must be 'fail' or 'drop', got {policy!r}")
    scale = float(scale)
    if not (math.isfinite(scale) and scale > 0):
        raise DataError(f"scale must be positive, got {scale!r}")
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} has no data rows")

    width = len(rows[0])
    if _is_index(column):
        probe = int(column)
        has_header = 0 <= probe < width and _parse_number(rows[0][probe]) is None
    else:
        has_header = True
    header = rows[0] if has_header else None
    first_line = 2 if has_header else 1
    if has_header:
        rows = rows[1:]
    index = _resolve_column(column, header, width)

    values = []
    dropped = []
    for offset, row in enumerate(rows):
        line = first_line + offset
        reason = None
        if index >= len(row):
            reason = "missing cell"
        else:
            value = _parse_number(row[index])
            if value is None:
                reason = f"not a number: {row[index]!r}"
            elif not math.isfinite(value):
                reason = f"not finite: {row[index]!r}"
            elif value < 0:
                reason = f"negative value: {row[index]!r}"
        if reason is not None:
            if policy == "fail":
                raise DataError(f"{path}:{line}: {reason}")
            log.info("dropping %s:%d (%s)", path, line, reason)
            dropped.append((line, reason))
            continue
        values.append(value * scale)

    if len(values) < 2:
        raise DataError(f"{path}: need at least 2 valid rows, found {len(values)}")
    meta = DatasetMeta(str(path), column, len(values), dropped, scale, header)
    return Sample(values), meta


def _is_index(column) -> bool:
    return isinstance(column, int) or (isinstance(column, str) and column.strip().lstrip("-").isdigit())


def write_csv(sample, path, name: str = "value") -> None:
    """Write one column with a header; values use their round-trip repr."""
    values = sample.values if isinstance(sample, Sample) else sample
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([name])
        for v in values:
            writer.writerow([repr(float(v))])


def example_dataset_path() -> Path:
    """Path of the bundled 34-row synthetic GDP-per-capita file (US dollars)."""
    return Path(str(resources.files("parineq") / "data" / EXAMPLE_DATASET))


def load_example(scale: float = EXAMPLE_SCALE) -> tuple[Sample, DatasetMeta]:
    """Bundled dataset in thousands of dollars by default."""
    return load_csv(example_dataset_path(), EXAMPLE_COLUMN, scale=scale)
