"""Encoder contract plus the deterministic reference encoder.

The reference encoder is the test oracle: every schema-item vector is a
fixed base vector plus planted-similarity multiples of unit-norm question
context vectors, so masking question token i moves item j's vector by
exactly sim(i, j) in L2.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Protocol

import numpy as np

from .datamodel import ProbeExample
from .errors import ValidationError

if TYPE_CHECKING:
    from .probe import InputLayout


class Encoder(Protocol):
    """Produces one vector per schema item for a (possibly corrupted) input.

    Implementations must be deterministic: identical (layout, masked)
    arguments yield identical outputs. `masked_question` names the single
    question token replaced by the mask convention of the encoder.
    """

    def encode(self, layout: "InputLayout", masked_question: int | None = None) -> np.ndarray:
        ...


def hashed_rng(*parts) -> np.random.Generator:
    """Platform-stable RNG seeded from a hash of the given parts."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode("utf-8"), digest_size=8
    ).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


@dataclass(frozen=True, eq=False)
class ReferenceEncoderSpec:
    """Fixed vectors and planted similarities for one example.

    base has shape (items, dim); context has shape (question tokens, dim)
    with unit-norm rows; planted maps (q_index, s_index) to a similarity
    in [0, 1].
    """

    dim: int
    base: np.ndarray
    context: np.ndarray
    planted: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        base = np.ascontiguousarray(np.asarray(self.base, dtype=np.float64))
        ctx = np.ascontiguousarray(np.asarray(self.context, dtype=np.float64))
        if base.ndim != 2 or base.shape[1] != self.dim:
            raise ValidationError(f"base must be (items, {self.dim}), got {base.shape}")
        if ctx.ndim != 2 or ctx.shape[1] != self.dim:
            raise ValidationError(f"context must be (questions, {self.dim}), got {ctx.shape}")
        norms = np.linalg.norm(ctx, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-9):
            raise ValidationError("context vectors must be unit norm")
        planted = {(int(q), int(s)): float(v) for (q, s), v in self.planted.items()}
        for (q, s), sim in planted.items():
            if not 0 <= q < ctx.shape[0] or not 0 <= s < base.shape[0]:
                raise ValidationError(f"planted pair ({q}, {s}) out of range")
            if not 0.0 <= sim <= 1.0:
                raise ValidationError(f"planted similarity {sim} outside [0, 1]")
        base.flags.writeable = False
        ctx.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "context", ctx)
        object.__setattr__(self, "planted", planted)

    @classmethod
    def build(
        cls,
        example: ProbeExample,
        dim: int = 16,
        seed: int = 0,
        planted: Mapping[tuple[int, int], float] | None = None,
    ) -> "ReferenceEncoderSpec":
        """Derive base/context vectors from hashes of item names and tokens."""
        base = np.stack(
            [
                hashed_rng(seed, "item", it.kind.value, it.name).standard_normal(dim)
                for it in example.schema.items
            ]
        )
        ctx = np.stack(
            [
                hashed_rng(seed, "question", i, tok).standard_normal(dim)
                for i, tok in enumerate(example.question_tokens)
            ]
        )
        ctx /= np.linalg.norm(ctx, axis=1, keepdims=True)
        return cls(dim=dim, base=base, context=ctx, planted=dict(planted or {}))

    @property
    def n_schema(self) -> int:
        return self.base.shape[0]

    @property
    def n_question(self) -> int:
        return self.context.shape[0]

    def similarity_matrix(self) -> np.ndarray:
        sims = np.zeros((self.n_question, self.n_schema))
        for (q, s), sim in self.planted.items():
            sims[q, s] = sim
        return sims


def reference_encode(
    spec: ReferenceEncoderSpec, layout: "InputLayout", masked_question: int | None = None
) -> np.ndarray:
    """Schema-item vectors: base_j + sum_i sim(i, j) * ctx_i, skipping the masked i."""
    if layout.n_schema != spec.n_schema or layout.n_question != spec.n_question:
        raise ValidationError(
            f"encoder spec ({spec.n_question} x {spec.n_schema}) does not match "
            f"layout ({layout.n_question} x {layout.n_schema})"
        )
    sims = spec.similarity_matrix()
    if masked_question is not None:
        if not 0 <= masked_question < spec.n_question:
            raise ValidationError(f"masked question index {masked_question} out of range")
        sims = sims.copy()
        sims[masked_question, :] = 0.0
    return spec.base + sims.T @ spec.context


@dataclass(frozen=True, eq=False)
class ReferenceEncoder:
    spec: ReferenceEncoderSpec

    def encode(self, layout: "InputLayout", masked_question: int | None = None) -> np.ndarray:
        return reference_encode(self.spec, layout, masked_question)
