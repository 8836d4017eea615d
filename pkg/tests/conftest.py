import numpy as np
import pytest

from schemaprobe import ItemKind, ProbeExample, Schema, SchemaItem


@pytest.fixture
def pets_schema() -> Schema:
    return Schema(
        db_id="pets_1",
        items=(
            SchemaItem(ItemKind.TABLE, ("pets",), 0),
            SchemaItem(ItemKind.TABLE, ("owner",), 1),
            SchemaItem(ItemKind.COLUMN, ("pet", "type"), 2, parent_table=0),
            SchemaItem(ItemKind.COLUMN, ("weight",), 3, parent_table=0),
            SchemaItem(ItemKind.COLUMN, ("owner", "name"), 4, parent_table=1),
        ),
    )


@pytest.fixture
def pets_example(pets_schema) -> ProbeExample:
    return ProbeExample(
        example_id="pets-0",
        question_tokens=("find", "the", "category", "and", "weight"),
        schema=pets_schema,
        gold_links=frozenset({(2, 2), (4, 3)}),
    )


class CountingEncoder:
    """Wraps any encoder and counts encode() invocations."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def encode(self, layout, masked_question=None):
        self.calls += 1
        return self.inner.encode(layout, masked_question)


@pytest.fixture
def counting_encoder_cls():
    return CountingEncoder


def random_ball_point(rng: np.random.Generator, dim: int, max_norm: float = 0.98) -> np.ndarray:
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    return direction * rng.uniform(0.0, max_norm)
