"""Reading species-abundance data.

The input is a CSV file with a header row. Two layouts are accepted::

    species,count        count
    a,2                  2
    b,1                  1

Blank lines are ignored. Every count must be a positive integer.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

from .model import OccupancyVector


class IngestError(ValueError):
    """Base class for problems with an abundance file; ``line`` is 1-based."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = f"{path}:" if path else ""
        where += f"{line}: " if line is not None else (" " if path else "")
        super().__init__(f"{where}{message}")


class MalformedRowError(IngestError):
    """A row (or the header) does not match the expected layout."""


class NonPositiveCountError(IngestError):
    """A count is zero or negative."""


class EmptyFileError(IngestError):
    """The file holds no species rows."""


@dataclass(frozen=True)
class AbundanceDataset:
    """Species counts in file order, with optional labels."""

    counts: Tuple[int, ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not self.counts:
            raise EmptyFileError("at least one species is required")
        if any(c < 1 for c in self.counts):
            raise NonPositiveCountError("every count must be at least 1")
        if self.labels is not None and len(self.labels) != len(self.counts):
            raise ValueError("labels and counts must have the same length")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def occupancy(self) -> OccupancyVector:
        return OccupancyVector(self.counts)


def _parse_count(text: str, line: int, path: str) -> int:
    raw = text.strip()
    try:
        value = int(raw)
    except ValueError:
        raise MalformedRowError(f"count {raw!r} is not an integer", line, path) from None
    if value < 1:
        raise NonPositiveCountError(f"count must be positive, got {value}", line, path)
    return value


def ingest(path: Union[str, Path], format: str = "csv") -> AbundanceDataset:
    """Parse an abundance file into an :class:`AbundanceDataset`.

    Raises :class:`MalformedRowError`, :class:`NonPositiveCountError` or
    :class:`EmptyFileError`, each naming the offending line.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}; only 'csv' is available")
    path = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                if any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyFileError("file is empty", 1, path)

    header_line, header = rows[0]
    header = [h.strip().lower() for h in header]
    if header == ["species", "count"]:
        labelled = True
    elif header == ["count"]:
        labelled = False
    else:
        raise MalformedRowError(
            f"header must be 'species,count' or 'count', got {','.join(header)!r}", header_line, path)

    if len(rows) == 1:
        raise EmptyFileError("no species rows after the header", header_line + 1, path)

    width = 2 if labelled else 1
    labels: List[str] = []
    counts: List[int] = []
    for line, row in rows[1:]:
        if len(row) != width:
            raise MalformedRowError(f"expected {width} field(s), got {len(row)}", line, path)
        if labelled:
            labels.append(row[0].strip())
        counts.append(_parse_count(row[-1], line, path))
    return AbundanceDataset(tuple(counts), tuple(labels) if labelled else None)
