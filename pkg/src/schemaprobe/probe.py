"""Two-pass masked-encoding probe and relation-matrix post-processing.

One baseline pass plus one pass per masked question token; each matrix
entry is the distance (Euclidean, or Poincare after projecting both
vectors into the ball) between an item's baseline vector and its vector
with that question token masked.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .datamodel import LinkGraph, LinkTag, ProbeExample, RelationMatrix
from .dumpio import EmbeddingSet
from .encoders import Encoder
from .errors import ValidationError
from .geometry import exp_map_origin, poincare_distance

SEQ_START = "<s>"
SEQ_SEP = "</s>"


class Metric(Enum):
    EUCLIDEAN = "euclidean"
    POINCARE = "poincare"


@dataclass(frozen=True)
class InputLayout:
    """Concatenated probe input: start marker, question, then each schema
    item introduced by a separator.

    Slot maps give each question token and schema item its half-open token
    range inside `tokens`.
    """

    tokens: tuple[str, ...]
    question_slots: tuple[tuple[int, int], ...]
    schema_slots: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "question_slots", tuple(map(tuple, self.question_slots)))
        object.__setattr__(self, "schema_slots", tuple(map(tuple, self.schema_slots)))
        if not self.question_slots or not self.schema_slots:
            raise ValidationError("layout needs at least one question token and one schema item")
        previous_stop = 0
        for start, stop in (*self.question_slots, *self.schema_slots):
            if not (previous_stop <= start < stop <= len(self.tokens)):
                raise ValidationError(
                    f"slot range ({start}, {stop}) overlaps or leaves the token sequence"
                )
            previous_stop = stop

    @property
    def n_question(self) -> int:
        return len(self.question_slots)

    @property
    def n_schema(self) -> int:
        return len(self.schema_slots)

    def delimiter_count(self) -> int:
        return sum(1 for t in self.tokens if t in (SEQ_START, SEQ_SEP))


def build_input_layout(example: ProbeExample) -> InputLayout:
    """Lay out <s> q1..qn </s> then (</s> item-tokens) per schema item."""
    tokens: list[str] = [SEQ_START]
    question_slots = []
    for tok in example.question_tokens:
        question_slots.append((len(tokens), len(tokens) + 1))
        tokens.append(tok)
    tokens.append(SEQ_SEP)
    schema_slots = []
    for item in example.schema.items:
        tokens.append(SEQ_SEP)
        schema_slots.append((len(tokens), len(tokens) + len(item.name_tokens)))
        tokens.extend(item.name_tokens)
    return InputLayout(
        tokens=tuple(tokens),
        question_slots=tuple(question_slots),
        schema_slots=tuple(schema_slots),
    )


def _distance_row(masked: np.ndarray, baseline: np.ndarray, metric: Metric) -> np.ndarray:
    if metric is Metric.EUCLIDEAN:
        return np.linalg.norm(masked - baseline, axis=1)
    return np.array(
        [
            poincare_distance(exp_map_origin(m), exp_map_origin(b))
            for m, b in zip(masked, baseline)
        ]
    )


def _as_metric(metric: Metric | str) -> Metric:
    if isinstance(metric, Metric):
        return metric
    try:
        return Metric(metric)
    except ValueError:
        raise ValidationError(f"unknown metric {metric!r}") from None


def probe_example(
    example: ProbeExample, encoder: Encoder, metric: Metric | str = Metric.EUCLIDEAN
) -> RelationMatrix:
    """Run the baseline pass plus |Q| masked passes and collect distances.

    The returned matrix is unnormalized.
    """
    metric = _as_metric(metric)
    layout = build_input_layout(example)
    baseline = np.asarray(encoder.encode(layout, None), dtype=np.float64)
    if baseline.ndim != 2 or baseline.shape[0] != layout.n_schema:
        raise ValidationError(
            f"{example.example_id}: encoder returned shape {baseline.shape}, "
            f"expected ({layout.n_schema}, dim)"
        )
    rows = []
    for i in range(layout.n_question):
        masked = np.asarray(encoder.encode(layout, i), dtype=np.float64)
        if masked.shape != baseline.shape:
            raise ValidationError(
                f"{example.example_id}: encoder dimension changed between passes: "
                f"{masked.shape} vs {baseline.shape}"
            )
        rows.append(_distance_row(masked, baseline, metric))
    return RelationMatrix(np.stack(rows), normalized=False)


def materialize_from_dump(
    dump: EmbeddingSet,
    metric: Metric | str = Metric.EUCLIDEAN,
    example: ProbeExample | None = None,
) -> RelationMatrix:
    """Same math as probe_example, consuming precomputed vectors."""
    metric = _as_metric(metric)
    if example is not None:
        expected = (len(example.question_tokens), len(example.schema))
        if (dump.n_question, dump.n_schema) != expected:
            raise ValidationError(
                f"{dump.example_id}: dump shape ({dump.n_question}, {dump.n_schema}) "
                f"does not match example shape {expected}"
            )
    rows = [
        _distance_row(dump.masked[i], dump.baseline, metric)
        for i in range(dump.n_question)
    ]
    return RelationMatrix(np.stack(rows), normalized=False)


def normalize_minmax(matrix: RelationMatrix) -> RelationMatrix:
    """Min-max scale the whole matrix into [0, 1]; a constant matrix maps to zeros."""
    values = matrix.values
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return RelationMatrix(np.zeros_like(values), normalized=True)
    return RelationMatrix((values - lo) / (hi - lo), normalized=True)


def threshold_adjacency(matrix: RelationMatrix, tau: float) -> LinkGraph:
    """Probe edges at entries >= tau of a normalized matrix."""
    if not matrix.normalized:
        raise ValidationError("threshold_adjacency requires a normalized matrix")
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau must lie in [0, 1], got {tau}")
    edges = frozenset(
        (int(i), int(j), LinkTag.PROBE)
        for i, j in np.argwhere(matrix.values >= tau)
    )
    return LinkGraph(n_question=matrix.rows, n_schema=matrix.cols, edges=edges)


def dump_from_encoder(
    example: ProbeExample, encoder: Encoder, example_id: str | None = None
) -> EmbeddingSet:
    """Capture an encoder's baseline and masked vectors as an EmbeddingSet."""
    layout = build_input_layout(example)
    baseline = np.asarray(encoder.encode(layout, None), dtype=np.float64)
    masked = np.stack(
        [
            np.asarray(encoder.encode(layout, i), dtype=np.float64)
            for i in range(layout.n_question)
        ]
    )
    return EmbeddingSet(
        example_id=example_id or example.example_id, baseline=baseline, masked=masked
    )
