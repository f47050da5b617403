"""Deterministic file emission (CSV, JSON, SVG) with atomic writes, plus readers."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np


def _atomic_write(path, text: str):
    path = os.fspath(path)
    folder = os.path.dirname(path) or "."
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def fmt(x) -> str:
    """17 significant digits; empty for None/NaN so readers see a missing value."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return _atomic_write(path, buf.getvalue())


def read_csv(path):
    """Returns (header, rows) with numeric fields parsed and blanks as NaN."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            row = []
            for v in raw:
                if v == "":
                    row.append(math.nan)
                else:
                    try:
                        row.append(float(v))
                    except ValueError:
                        row.append(v)
            rows.append(row)
    return header, rows


def read_csv_columns(path) -> dict:
    header, rows = read_csv(path)
    return {h: [r[i] for r in rows] for i, h in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not math.isfinite(obj) else float(obj)
    if hasattr(obj, "value"):  # enums
        return obj.value
    return obj


def write_json(path, data):
    text = json.dumps(_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + "\n"
    return _atomic_write(path, text)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_svg(path, series, xlabel, ylabel, title):
    """Line plot of [(x, y, label, style), ...] to a reproducible SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "translators", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for x, y, label, style in series:
            ax.plot(x, y, style, label=label, lw=1.2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return _atomic_write(path, buf.getvalue())
