"""Plot-ready output: CSV tables and a JSON summary, byte-deterministic."""

from __future__ import annotations

import json
from pathlib import Path


def format_value(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int,)):
        return str(x)
    return f"{float(x):.9g}"


def write_csv(path, columns: dict):
    """Write named columns of equal length; one header line, 9 significant
    digits per value."""
    path = Path(path)
    names = list(columns)
    n_rows = len(next(iter(columns.values())))
    lines = [",".join(names)]
    for i in range(n_rows):
        lines.append(",".join(format_value(columns[name][i]) for name in names))
    path.write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return obj.item()
    return obj


def write_json(path, payload: dict):
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
