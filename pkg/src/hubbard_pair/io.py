"""Flat-file datasets: CSV and JSON with atomic writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

SPECTRUM_COLUMNS = ("K", "E_band_min", "E_band_max", "E_dimer", "E_binding", "alpha")
FORMATS = ("csv", "json")


@dataclass
class Dataset:
    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        n = self.columns.index(name)
        return [row[n] for row in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} cannot be serialized")
        return format(value, ".17g")
    return str(value)


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(dataset.columns)
    for row in dataset.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"non-finite value {value!r} cannot be serialized")
    return value


def to_json(dataset: Dataset) -> str:
    doc = {
        "metadata": dataset.metadata,
        "rows": [{c: _json_value(v) for c, v in zip(dataset.columns, row)} for row in dataset.rows],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str):
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def serialize(dataset: Dataset, fmt: str, path) -> Path:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    atomic_write(path, to_csv(dataset) if fmt == "csv" else to_json(dataset))
    return Path(path)


def read_dataset(path, fmt: Optional[str] = None) -> Dataset:
    """Parse a file written by :func:`serialize`. CSV files carry no metadata."""
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    text = path.read_text()
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text, newline=""))
        header = next(reader)
        return Dataset(tuple(header), [tuple(_parse_cell(c) for c in row) for row in reader])
    if fmt == "json":
        doc = json.loads(text)
        rows = doc["rows"]
        columns = tuple(rows[0]) if rows else tuple(doc.get("metadata", {}).get("columns", ()))
        return Dataset(columns, [tuple(r[c] for c in columns) for r in rows], doc["metadata"])
    raise ValueError(f"unknown format {fmt!r}")
