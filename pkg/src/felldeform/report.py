"""Tabular scan results and their CSV serialization."""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

FLOAT_FMT = ".17g"


def format_float(v: float) -> str:
    return format(float(v), FLOAT_FMT)


@dataclass
class ScanReport:
    """Named, equal-length float columns plus run metadata."""

    columns: dict[str, list[float]]
    metadata: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
        self.columns = {k: [float(x) for x in v] for k, v in self.columns.items()}

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def __len__(self):
        return len(next(iter(self.columns.values()), []))

    def __getitem__(self, name: str) -> list[float]:
        return self.columns[name]

    def rows(self):
        return list(zip(*self.columns.values()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k} = {v}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows():
            buf.write(",".join(format_float(x) for x in row) + "\n")
        return buf.getvalue()

    def write(self, path: str | os.PathLike) -> Path:
        return write_atomic(path, self.to_csv())


def write_atomic(path: str | os.PathLike, text: str) -> Path:
    """Write through a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_csv(text: str) -> ScanReport:
    """Parse CSV produced by ``ScanReport.to_csv`` (metadata values come back as strings)."""
    meta: dict[str, object] = {}
    lines = text.splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(" = ")
            meta[key] = val
        elif line.strip():
            body.append(line)
    header = body[0].split(",")
    cols: dict[str, list[float]] = {h: [] for h in header}
    for line in body[1:]:
        for h, v in zip(header, line.split(",")):
            cols[h].append(float(v))
    return ScanReport(cols, meta)


def from_rows(names: Sequence[str], rows: Sequence[Sequence[float]],
              metadata: Mapping | None = None) -> ScanReport:
    cols = {n: [r[i] for r in rows] for i, n in enumerate(names)}
    return ScanReport(cols, dict(metadata or {}))
