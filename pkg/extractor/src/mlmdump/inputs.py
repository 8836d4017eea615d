"""Corpus readers for the shared schema/example file formats.

Same contracts as the probing package's loaders (Spider-style tables.json,
JSON Lines examples), re-implemented here so the extractor depends only on
the documented formats: names lowercased and split on whitespace and
underscores, the "*" pseudo-column dropped, tables before columns.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InputError

_NAME_SPLIT = re.compile(r"[\s_]+")


def split_name(raw: str) -> tuple[str, ...]:
    return tuple(t for t in _NAME_SPLIT.split(raw.strip().lower()) if t)


@dataclass(frozen=True)
class SchemaItems:
    """Flattened schema: one name-token tuple per item, tables first."""

    db_id: str
    items: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Example:
    example_id: str
    question_tokens: tuple[str, ...]
    schema: SchemaItems


def load_schemas(path: str | Path) -> dict[str, SchemaItems]:
    try:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc.msg}") from exc
    catalog = {}
    for entry in entries:
        db_id = entry["db_id"]
        tables = entry["table_names_original"]
        items = [split_name(name) for name in tables]
        for t_index, name in entry["column_names_original"]:
            if t_index == -1:
                continue
            if not 0 <= t_index < len(tables):
                raise InputError(f"{db_id}: column {name!r} references table {t_index}")
            items.append(split_name(name))
        catalog[db_id] = SchemaItems(db_id=db_id, items=tuple(items))
    return catalog


def load_examples(
    path: str | Path, schemas: Mapping[str, SchemaItems]
) -> list[Example]:
    examples = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: line {lineno}: malformed JSON: {exc.msg}") from exc
            db_id = record["db_id"]
            if db_id not in schemas:
                raise InputError(f"{path}: line {lineno}: unknown db_id {db_id!r}")
            question = tuple(record["question_tokens"])
            if not question:
                raise InputError(f"{path}: line {lineno}: empty question")
            examples.append(
                Example(
                    example_id=record["example_id"],
                    question_tokens=question,
                    schema=schemas[db_id],
                )
            )
    return examples
