"""CSV / JSON table files written by the command line tool.

CSV files start with ``#`` comment lines echoing the run configuration,
followed by a header row and one row per record.  Floats are written with
17 significant digits so a re-read reproduces every double bit for bit.
JSON files hold ``{"config": ..., "columns": [...], "rows": [{...}, ...]}``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = ["write_table", "read_table", "format_value"]


def format_value(v: Any) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def _jsonable(v: Any):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def write_table(
    path: str | Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config: dict | None = None,
    fmt: str = "csv",
    extra: dict | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    config = config or {}
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
            if extra:
                fh.write("# summary: " + json.dumps(extra, sort_keys=True) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
    elif fmt == "json":
        payload = {
            "config": config,
            "columns": list(columns),
            "rows": [dict(zip(columns, map(_jsonable, row))) for row in rows],
        }
        if extra:
            payload["summary"] = extra
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=1, sort_keys=False)
            fh.write("\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    return path


def read_table(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    """Return ``(config, {column: values})`` for a CSV or JSON table."""
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        cols = payload["columns"]
        data = {c: np.array([r[c] for r in payload["rows"]]) for c in cols}
        return payload.get("config", {}), data
    config: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    body = []
    for line in lines:
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: "):])
        elif line.startswith("#") or not line:
            continue
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    raw = list(reader)
    data = {}
    for i, c in enumerate(header):
        col = [r[i] for r in raw]
        if c in ("m", "k", "fock_index"):
            data[c] = np.array([int(v) for v in col])
        else:
            data[c] = np.array([float(v) for v in col])
    return config, data
