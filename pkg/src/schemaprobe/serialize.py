"""JSON Lines intermediates passed between CLI subcommands.

Matrix records carry example_id, shape, row-major values, a normalized
flag, and optional axis labels; link records carry graph dimensions and
tagged edges. Readers reject malformed lines with their line number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .datamodel import LinkGraph, LinkTag, RelationMatrix
from .errors import FormatError, ValidationError


@dataclass(frozen=True, eq=False)
class MatrixRecord:
    example_id: str
    matrix: RelationMatrix
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        for labels, count, axis in (
            (self.row_labels, self.matrix.rows, "row"),
            (self.col_labels, self.matrix.cols, "col"),
        ):
            if labels and len(labels) != count:
                raise ValidationError(
                    f"{self.example_id}: {len(labels)} {axis} labels for {count} {axis}s"
                )

    def labels(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """Stored labels, or positional q{i}/s{j} fallbacks."""
        rows = self.row_labels or tuple(f"q{i}" for i in range(self.matrix.rows))
        cols = self.col_labels or tuple(f"s{j}" for j in range(self.matrix.cols))
        return rows, cols


@dataclass(frozen=True)
class LinkRecord:
    example_id: str
    graph: LinkGraph


def write_matrices(records: Iterable[MatrixRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for rec in records:
            payload = {
                "example_id": rec.example_id,
                "rows": rec.matrix.rows,
                "cols": rec.matrix.cols,
                "values": rec.matrix.values.ravel().tolist(),
                "normalized": rec.matrix.normalized,
            }
            if rec.row_labels:
                payload["row_labels"] = list(rec.row_labels)
            if rec.col_labels:
                payload["col_labels"] = list(rec.col_labels)
            handle.write(json.dumps(payload, sort_keys=True) + "\n")


def read_matrices(path: str | Path) -> list[MatrixRecord]:
    records = []
    for lineno, record in _read_jsonl(path, ("example_id", "rows", "cols", "values")):
        rows, cols = record["rows"], record["cols"]
        values = np.asarray(record["values"], dtype=np.float64)
        if values.size != rows * cols:
            raise FormatError(
                f"{path}: line {lineno}: {values.size} values for a {rows}x{cols} matrix"
            )
        try:
            matrix = RelationMatrix(
                values.reshape(rows, cols), normalized=bool(record.get("normalized", False))
            )
            records.append(
                MatrixRecord(
                    example_id=record["example_id"],
                    matrix=matrix,
                    row_labels=tuple(record.get("row_labels", ())),
                    col_labels=tuple(record.get("col_labels", ())),
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
    return records


def write_links(records: Iterable[LinkRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for rec in records:
            payload = {
                "example_id": rec.example_id,
                "n_question": rec.graph.n_question,
                "n_schema": rec.graph.n_schema,
                "edges": sorted([q, s, tag.value] for q, s, tag in rec.graph.edges),
            }
            handle.write(json.dumps(payload, sort_keys=True) + "\n")


def read_links(path: str | Path) -> list[LinkRecord]:
    records = []
    for lineno, record in _read_jsonl(path, ("example_id", "n_question", "n_schema", "edges")):
        try:
            edges = frozenset(
                (int(q), int(s), LinkTag(tag)) for q, s, tag in record["edges"]
            )
            graph = LinkGraph(
                n_question=record["n_question"],
                n_schema=record["n_schema"],
                edges=edges,
            )
        except (ValueError, TypeError) as exc:
            kind = ValidationError if isinstance(exc, ValidationError) else FormatError
            raise kind(f"{path}: line {lineno}: {exc}") from exc
        records.append(LinkRecord(example_id=record["example_id"], graph=graph))
    return records


def read_gold_links(path: str | Path) -> dict[str, frozenset[tuple[int, int]]]:
    """Pull gold link pairs straight out of an examples JSONL file.

    Examples without gold_links are omitted; no schema binding happens here.
    """
    gold = {}
    for lineno, record in _read_jsonl(path, ("example_id",)):
        links = record.get("gold_links")
        if links is None:
            continue
        try:
            gold[record["example_id"]] = frozenset((int(q), int(s)) for q, s in links)
        except (ValueError, TypeError) as exc:
            raise FormatError(f"{path}: line {lineno}: bad gold_links: {exc}") from exc
    return gold


def _read_jsonl(path: str | Path, required: tuple[str, ...]):
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: line {lineno}: malformed JSON: {exc.msg}") from exc
            missing = [k for k in required if k not in record]
            if missing:
                raise FormatError(f"{path}: line {lineno}: missing fields {missing}")
            yield lineno, record
