"""Domain types for question-to-schema linking, plus file loaders.

A database schema is flattened into one ordered sequence of items
(tables first, then columns). Questions are pre-tokenized word lists;
token and item positions are the indices every other module speaks in.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import FormatError, ValidationError

_NAME_SPLIT = re.compile(r"[\s_]+")


class ItemKind(Enum):
    TABLE = "table"
    COLUMN = "column"


class LinkTag(Enum):
    """Edge provenance in a linking graph."""

    PROBE = "probe"
    EXACT = "exact"
    PARTIAL = "partial"


def split_name(raw: str) -> tuple[str, ...]:
    """Lowercase a schema name and split it on whitespace/underscores."""
    return tuple(t for t in _NAME_SPLIT.split(raw.strip().lower()) if t)


@dataclass(frozen=True)
class SchemaItem:
    """One table or column in the flattened schema sequence.

    seq_index is the item's position in that sequence; parent_table is the
    owning table's index (columns only).
    """

    kind: ItemKind
    name_tokens: tuple[str, ...]
    seq_index: int
    parent_table: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "name_tokens", tuple(self.name_tokens))
        if not self.name_tokens or any(not t.strip() for t in self.name_tokens):
            raise ValidationError(f"schema item has empty name tokens: {self.name_tokens!r}")
        if self.seq_index < 0:
            raise ValidationError(f"negative seq_index {self.seq_index}")
        if self.kind is ItemKind.COLUMN and self.parent_table is None:
            raise ValidationError(f"column {self.name!r} has no parent_table")
        if self.kind is ItemKind.TABLE and self.parent_table is not None:
            raise ValidationError(f"table {self.name!r} must not set parent_table")

    @property
    def name(self) -> str:
        return " ".join(self.name_tokens)


@dataclass(frozen=True)
class Schema:
    """Flattened schema: items ordered by seq_index, all tables before columns."""

    db_id: str
    items: tuple[SchemaItem, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if not self.db_id:
            raise ValidationError("schema db_id must be non-empty")
        kinds = [it.kind for it in self.items]
        if ItemKind.TABLE not in kinds or ItemKind.COLUMN not in kinds:
            raise ValidationError(f"{self.db_id}: schema needs at least one table and one column")
        n_tables = kinds.index(ItemKind.COLUMN)
        if any(k is ItemKind.TABLE for k in kinds[n_tables:]):
            raise ValidationError(f"{self.db_id}: tables must precede all columns")
        for pos, it in enumerate(self.items):
            if it.seq_index != pos:
                raise ValidationError(
                    f"{self.db_id}: seq_index {it.seq_index} at position {pos}; "
                    "items must be a 0..n-1 sequence"
                )
            if it.kind is ItemKind.COLUMN and not 0 <= it.parent_table < n_tables:
                raise ValidationError(
                    f"{self.db_id}: column {it.name!r} references table {it.parent_table} "
                    f"but there are {n_tables} tables"
                )

    @property
    def num_tables(self) -> int:
        return sum(1 for it in self.items if it.kind is ItemKind.TABLE)

    @property
    def num_columns(self) -> int:
        return len(self.items) - self.num_tables

    def __len__(self) -> int:
        return len(self.items)

    def item_label(self, s_index: int) -> str:
        """Human-readable label, columns prefixed by their table name."""
        it = self.items[s_index]
        if it.kind is ItemKind.COLUMN:
            return f"{self.items[it.parent_table].name}.{it.name}"
        return it.name


@dataclass(frozen=True)
class ProbeExample:
    """A tokenized question bound to a schema, optionally with gold links."""

    example_id: str
    question_tokens: tuple[str, ...]
    schema: Schema
    gold_links: frozenset[tuple[int, int]] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "question_tokens", tuple(self.question_tokens))
        if not self.question_tokens:
            raise ValidationError(f"{self.example_id}: question must be non-empty")
        if self.gold_links is not None:
            links = frozenset((int(q), int(s)) for q, s in self.gold_links)
            object.__setattr__(self, "gold_links", links)
            for q, s in links:
                if not 0 <= q < len(self.question_tokens) or not 0 <= s < len(self.schema):
                    raise ValidationError(
                        f"{self.example_id}: gold link ({q}, {s}) out of range for "
                        f"{len(self.question_tokens)} question tokens x {len(self.schema)} items"
                    )


@dataclass(frozen=True, eq=False)
class RelationMatrix:
    """|Q| x |S| grid of non-negative correlation scores.

    `normalized` marks a matrix already min-max scaled into [0, 1].
    """

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 2 or vals.size == 0:
            raise ValidationError(f"relation matrix must be 2-D and non-empty, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("relation matrix contains non-finite values")
        if np.any(vals < 0):
            raise ValidationError("relation matrix contains negative values")
        if self.normalized and np.any(vals > 1.0):
            raise ValidationError("normalized relation matrix has values above 1")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LinkGraph:
    """Typed binary edges between question positions and schema positions."""

    n_question: int
    n_schema: int
    edges: frozenset[tuple[int, int, LinkTag]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset(self.edges))
        if self.n_question < 1 or self.n_schema < 1:
            raise ValidationError("link graph dimensions must be positive")
        for q, s, tag in self.edges:
            if not isinstance(tag, LinkTag):
                raise ValidationError(f"edge tag {tag!r} is not a LinkTag")
            if not 0 <= q < self.n_question or not 0 <= s < self.n_schema:
                raise ValidationError(
                    f"edge ({q}, {s}) out of range for {self.n_question} x {self.n_schema}"
                )

    def pairs(self, tag: LinkTag | None = None) -> frozenset[tuple[int, int]]:
        """Untyped (q, s) pairs, optionally restricted to one tag."""
        return frozenset((q, s) for q, s, t in self.edges if tag is None or t is tag)

    def adjacency(self) -> np.ndarray:
        """Binary |Q| x |S| matrix over the probe-tagged edges."""
        a = np.zeros((self.n_question, self.n_schema), dtype=np.int8)
        for q, s in self.pairs(LinkTag.PROBE):
            a[q, s] = 1
        return a


# ---------------------------------------------------------------------------
# File ingestion
# ---------------------------------------------------------------------------


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def load_spider_schemas(path: str | Path) -> list[Schema]:
    """Load a Spider-style tables.json into Schema objects.

    Names are lowercased and split on whitespace/underscores; the synthetic
    "*" column (table index -1) is dropped.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: malformed JSON at byte offset {_byte_offset(text, exc.pos)}: {exc.msg}"
        ) from exc
    if not isinstance(entries, list):
        raise FormatError(f"{path}: expected a JSON array of schema entries")

    schemas = []
    for pos, entry in enumerate(entries):
        for key in ("db_id", "table_names_original", "column_names_original"):
            if not isinstance(entry, dict) or key not in entry:
                raise FormatError(f"{path}: entry {pos} missing field {key!r}")
        db_id = entry["db_id"]
        tables = entry["table_names_original"]
        items = [
            SchemaItem(ItemKind.TABLE, split_name(name), seq_index=i)
            for i, name in enumerate(tables)
        ]
        for t_index, name in entry["column_names_original"]:
            if t_index == -1:
                continue
            if not 0 <= t_index < len(tables):
                raise ValidationError(
                    f"{db_id}: column {name!r} references table index {t_index} "
                    f"but there are {len(tables)} tables"
                )
            items.append(
                SchemaItem(
                    ItemKind.COLUMN, split_name(name), seq_index=len(items), parent_table=t_index
                )
            )
        schemas.append(Schema(db_id=db_id, items=tuple(items)))
    return schemas


def spider_entry(schema: Schema) -> dict:
    """Serialize a Schema back to the tables.json entry shape."""
    return {
        "db_id": schema.db_id,
        "table_names_original": [
            it.name for it in schema.items if it.kind is ItemKind.TABLE
        ],
        "column_names_original": [
            [it.parent_table, it.name] for it in schema.items if it.kind is ItemKind.COLUMN
        ],
    }


def save_spider_schemas(schemas: Iterable[Schema], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([spider_entry(s) for s in schemas], indent=1, sort_keys=True),
        encoding="utf-8",
    )


def load_examples(
    path: str | Path, schemas: Mapping[str, Schema] | Iterable[Schema]
) -> list[ProbeExample]:
    """Load a JSON Lines examples file and bind each line to its schema by db_id."""
    catalog = schemas if isinstance(schemas, Mapping) else {s.db_id: s for s in schemas}
    examples = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: line {lineno}: malformed JSON: {exc.msg}") from exc
            for key in ("example_id", "db_id", "question_tokens"):
                if key not in record:
                    raise FormatError(f"{path}: line {lineno}: missing field {key!r}")
            db_id = record["db_id"]
            if db_id not in catalog:
                raise ValidationError(f"{path}: line {lineno}: unknown db_id {db_id!r}")
            gold = record.get("gold_links")
            try:
                examples.append(
                    ProbeExample(
                        example_id=record["example_id"],
                        question_tokens=tuple(record["question_tokens"]),
                        schema=catalog[db_id],
                        gold_links=None if gold is None else frozenset(map(tuple, gold)),
                    )
                )
            except ValidationError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
    return examples


def example_record(example: ProbeExample) -> dict:
    """Serialize an example to its JSON Lines record shape."""
    record = {
        "example_id": example.example_id,
        "db_id": example.schema.db_id,
        "question_tokens": list(example.question_tokens),
    }
    if example.gold_links is not None:
        record["gold_links"] = sorted([q, s] for q, s in example.gold_links)
    return record


def save_examples(examples: Iterable[ProbeExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for ex in examples:
            handle.write(json.dumps(example_record(ex), sort_keys=True) + "\n")
