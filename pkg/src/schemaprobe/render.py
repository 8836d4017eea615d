"""Relation-matrix renderers: labeled CSV, binary PGM, and SVG heatmaps."""

from __future__ import annotations

import csv
import math
from enum import Enum
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .datamodel import RelationMatrix
from .errors import ValidationError


class RenderFormat(Enum):
    CSV = "csv"
    PGM = "pgm"
    SVG = "svg"


_CELL = 22
_MARGIN_LEFT = 140
_MARGIN_TOP = 110


def _gray_level(value: float) -> int:
    # round-half-up quantization to 8 bits
    return min(255, int(math.floor(value * 255.0 + 0.5)))


def render_matrix(
    matrix: RelationMatrix,
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    fmt: RenderFormat | str,
    path: str | Path,
) -> None:
    """Write a normalized matrix to `path` in the chosen format."""
    fmt = RenderFormat(fmt) if not isinstance(fmt, RenderFormat) else fmt
    if not matrix.normalized:
        raise ValidationError("render_matrix requires a normalized matrix")
    if len(row_labels) != matrix.rows or len(col_labels) != matrix.cols:
        raise ValidationError(
            f"label counts ({len(row_labels)}, {len(col_labels)}) do not match "
            f"matrix shape ({matrix.rows}, {matrix.cols})"
        )
    if fmt is RenderFormat.CSV:
        _write_csv(matrix, row_labels, col_labels, path)
    elif fmt is RenderFormat.PGM:
        _write_pgm(matrix, path)
    else:
        _write_svg(matrix, row_labels, col_labels, path)


def _write_csv(matrix, row_labels, col_labels, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["", *col_labels])
        for label, row in zip(row_labels, matrix.values):
            writer.writerow([label, *(f"{v:.12g}" for v in row)])


def _write_pgm(matrix, path) -> None:
    header = f"P5\n{matrix.cols} {matrix.rows}\n255\n".encode("ascii")
    pixels = bytes(_gray_level(v) for v in matrix.values.ravel())
    Path(path).write_bytes(header + pixels)


def _write_svg(matrix, row_labels, col_labels, path) -> None:
    width = _MARGIN_LEFT + matrix.cols * _CELL
    height = _MARGIN_TOP + matrix.rows * _CELL
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'font-family="monospace" font-size="10">\n',
    ]
    for j, label in enumerate(col_labels):
        x = _MARGIN_LEFT + j * _CELL + _CELL // 2
        parts.append(
            f'<text x="{x}" y="{_MARGIN_TOP - 6}" text-anchor="start" '
            f'transform="rotate(-60 {x} {_MARGIN_TOP - 6})">{escape(str(label))}</text>\n'
        )
    for i, label in enumerate(row_labels):
        y = _MARGIN_TOP + i * _CELL + _CELL // 2 + 4
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{y}" text-anchor="end">{escape(str(label))}</text>\n'
        )
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            level = 255 - _gray_level(float(matrix.values[i, j]))
            parts.append(
                f'<rect x="{_MARGIN_LEFT + j * _CELL}" y="{_MARGIN_TOP + i * _CELL}" '
                f'width="{_CELL}" height="{_CELL}" '
                f'fill="rgb({level},{level},{level})" stroke="white"/>\n'
            )
    parts.append("</svg>\n")
    Path(path).write_text("".join(parts), encoding="utf-8")
