"""CSV ingestion and JSON serialisation.

CSV layout: a header ``group,y,x1,...,xp`` followed by one row per
observation. ``group`` is a positive integer label; rows may come in any
order. Groups are numbered by first appearance, and observations keep their
file order within a group.
"""

from __future__ import annotations

import csv
import json
import math
import os
from collections import Counter
from pathlib import Path

import numpy as np

from .model import GroupedDesign, MixedSolution, MMEError


class ParseError(MMEError, ValueError):
    """Malformed CSV input; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not a number", line) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column!r}: non-finite value {text!r}", line)
    return value


def read_csv(path: str | os.PathLike) -> tuple[GroupedDesign, list[int]]:
    """Parse a design file.

    Returns the design and the list of group labels in index order.
    """
    with open(path, newline="") as fh:
        return parse_csv(fh)


def parse_csv(lines) -> tuple[GroupedDesign, list[int]]:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    header = [h.strip() for h in header]
    if len(header) < 3 or header[0] != "group" or header[1] != "y":
        raise ParseError("header must be 'group,y,x1,...,xp'", 1)
    width = len(header)
    rows: dict[int, list[list[float]]] = {}
    for fields in reader:
        line = reader.line_num
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != width:
            raise ParseError(f"expected {width} fields, found {len(fields)}", line)
        label_text = fields[0].strip()
        try:
            label = int(label_text)
        except ValueError:
            raise ParseError(f"group label {label_text!r} is not an integer", line) from None
        if label < 1:
            raise ParseError(f"group label {label} is not positive", line)
        values = [_parse_float(f, line, header[j + 1]) for j, f in enumerate(fields[1:])]
        rows.setdefault(label, []).append(values)
    if not rows:
        raise ParseError("no data rows", reader.line_num or 1)
    labels = list(rows)
    data = np.array([r for label in labels for r in rows[label]], dtype=np.float64)
    sizes = np.array([len(rows[label]) for label in labels])
    return GroupedDesign(data[:, 1:], data[:, 0], sizes), labels


def write_csv(path: str | os.PathLike, design: GroupedDesign, labels=None) -> None:
    """Write a design with shortest round-trip float formatting."""
    if labels is None:
        labels = range(1, design.n + 1)
    labels = list(labels)
    header = ["group", "y"] + [f"x{j}" for j in range(1, design.p + 1)]
    gidx = design.group_index()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        X, y = design.X.tolist(), design.y.tolist()
        for r in range(design.n_obs):
            writer.writerow([labels[gidx[r]], repr(y[r]), *map(repr, X[r])])


def group_size_summary(design: GroupedDesign) -> dict:
    """``{"m": m}`` for balanced designs, else ``m_i`` and its histogram."""
    if design.is_balanced:
        return {"m": design.m}
    hist = Counter(design.sizes.tolist())
    return {
        "m_i": design.sizes.tolist(),
        "m_histogram": {str(k): hist[k] for k in sorted(hist)},
    }


def solution_record(
    solution: MixedSolution, design: GroupedDesign, lam: float, labels=None
) -> dict:
    if labels is None:
        labels = range(1, design.n + 1)
    record = {
        "beta": solution.beta.tolist(),
        "v": solution.v.tolist(),
        "residual_inf_norm": solution.residual_inf_norm,
        "wall_time_seconds": solution.wall_time_seconds,
        "n": design.n,
        **group_size_summary(design),
        "p": design.p,
        "lambda": float(lam),
        "group_labels": {str(label): i for i, label in enumerate(labels)},
    }
    return record


def write_json(path: str | os.PathLike, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
