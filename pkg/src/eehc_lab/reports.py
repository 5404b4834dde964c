"""CSV and JSON writers with a lossless float format."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import IO, Iterable, Sequence


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(float(value))  # shortest string that parses back to the same double
    if hasattr(value, "item"):  # numpy scalar
        return _cell(value.item())
    return str(value)


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(header: Sequence[str], rows: Iterable[Sequence], path: str | Path | IO[str]) -> None:
    """Write RFC-4180 CSV with ``\\n`` line endings."""
    text = format_csv(header, rows)
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _parse(fh) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    reader = csv.reader(fh)
    header = tuple(next(reader))
    rows = [tuple(float(c) if c != "" else math.nan for c in row) for row in reader]
    return header, rows


def read_csv(path: str | Path | IO[str]) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    """Inverse of :func:`write_csv` for numeric tables (empty cells become NaN)."""
    if hasattr(path, "read"):
        return _parse(path)
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse(fh)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(doc: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def sidecar_path(out: str | Path, suffix: str = ".meta.json") -> Path:
    return Path(str(out) + suffix)
