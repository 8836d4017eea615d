"""Deterministic synthetic corpora for the end-to-end selftest and tests.

Three suites:
  recovery     planted-similarity examples for exact-recovery checks
  synonym      question surface forms disjoint from schema names, so the
               lexical baseline finds nothing while the probe recovers all
  exact_match  questions that quote schema names verbatim, which the
               lexical baseline must link perfectly

Schema-name and question vocabularies are disjoint by construction; the
exact-match suite splices name tokens into the question explicitly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .datamodel import ItemKind, ProbeExample, Schema, SchemaItem

_SCHEMA_WORDS = (
    "singer", "concert", "stadium", "pet", "owner", "age", "name", "city",
    "salary", "team", "match", "score", "budget", "course", "grade", "year",
    "price", "brand", "model", "weight", "height", "status", "phone", "email",
    "region", "rank", "title", "genre", "length", "capacity", "district",
    "employee", "airport", "flight", "engine", "maker", "journal", "editor",
)

_QUESTION_WORDS = (
    "which", "what", "show", "find", "list", "many", "much", "oldest",
    "largest", "smallest", "average", "total", "per", "each", "with",
    "above", "below", "from", "into", "across", "recent", "latest",
    "musicians", "category", "state", "participants", "venue", "folks",
    "creature", "cost", "earnings", "label", "ordered", "grouped",
)


@dataclass(frozen=True)
class SyntheticCase:
    example: ProbeExample
    planted: dict[tuple[int, int], float]


def _make_schema(rnd: random.Random, db_id: str, max_items: int) -> Schema:
    n_tables = rnd.randint(1, 3)
    n_columns = rnd.randint(2, max_items - n_tables)
    words = rnd.sample(_SCHEMA_WORDS, k=min(len(_SCHEMA_WORDS), 2 * (n_tables + n_columns)))
    cursor = 0

    def take_name() -> tuple[str, ...]:
        nonlocal cursor
        length = rnd.choice((1, 1, 2))
        name = tuple(words[cursor : cursor + length])
        cursor += length
        return name

    items = [
        SchemaItem(ItemKind.TABLE, take_name(), seq_index=i) for i in range(n_tables)
    ]
    for j in range(n_columns):
        items.append(
            SchemaItem(
                ItemKind.COLUMN,
                take_name(),
                seq_index=n_tables + j,
                parent_table=rnd.randrange(n_tables),
            )
        )
    return Schema(db_id=db_id, items=tuple(items))


def _plant(rnd: random.Random, n_question: int, n_schema: int) -> dict[tuple[int, int], float]:
    # leave most pairs unplanted so min-max normalization keeps a zero floor
    count = rnd.randint(1, min(4, max(1, n_question * n_schema // 4)))
    pairs = rnd.sample(
        [(q, s) for q in range(n_question) for s in range(n_schema)], k=count
    )
    return {pair: rnd.uniform(0.3, 1.0) for pair in pairs}


def _disjoint_cases(prefix: str, count: int, seed: int, max_question: int, max_items: int):
    rnd = random.Random(seed)
    cases = []
    for idx in range(count):
        schema = _make_schema(rnd, f"{prefix}db_{idx:03d}", max_items)
        n_question = rnd.randint(3, max_question)
        question = tuple(rnd.choice(_QUESTION_WORDS) for _ in range(n_question))
        planted = _plant(rnd, n_question, len(schema))
        example = ProbeExample(
            example_id=f"{prefix}-{idx:03d}",
            question_tokens=question,
            schema=schema,
            gold_links=frozenset(planted),
        )
        cases.append(SyntheticCase(example=example, planted=planted))
    return cases


def recovery_suite(
    count: int = 60, seed: int = 7, max_question: int = 12, max_items: int = 15
) -> list[SyntheticCase]:
    return _disjoint_cases("recovery", count, seed, max_question, max_items)


def synonym_suite(
    count: int = 24, seed: int = 11, max_question: int = 12, max_items: int = 15
) -> list[SyntheticCase]:
    return _disjoint_cases("synonym", count, seed, max_question, max_items)


def exact_match_suite(count: int = 24, seed: int = 13, max_items: int = 15) -> list[SyntheticCase]:
    """Questions quoting 1-3 schema item names verbatim between filler words."""
    rnd = random.Random(seed)
    cases = []
    for idx in range(count):
        schema = _make_schema(rnd, f"exactdb_{idx:03d}", max_items)
        mentioned = rnd.sample(range(len(schema)), k=rnd.randint(1, min(3, len(schema))))
        question: list[str] = [rnd.choice(_QUESTION_WORDS)]
        gold = set()
        for s_index in mentioned:
            for tok in schema.items[s_index].name_tokens:
                gold.add((len(question), s_index))
                question.append(tok)
            question.append(rnd.choice(_QUESTION_WORDS))
        example = ProbeExample(
            example_id=f"exact-{idx:03d}",
            question_tokens=tuple(question),
            schema=schema,
            gold_links=frozenset(gold),
        )
        cases.append(SyntheticCase(example=example, planted={}))
    return cases
