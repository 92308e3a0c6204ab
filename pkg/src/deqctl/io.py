"""Plain-text outputs: ``key=value`` reports and CSV tables."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np


def fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".15e")
    return str(v)


def write_report(path: Path, items: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        for k, v in items.items():
            fh.write(f"{k}={fmt(v)}\n")


def read_report(path: Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            out[k] = v
    return out


def write_csv(path: Path, columns: dict) -> None:
    names = list(columns)
    cols = [np.asarray(columns[k]) if not isinstance(columns[k], list) else columns[k] for k in names]
    n = len(cols[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(c[i]) for c in cols) + "\n")
