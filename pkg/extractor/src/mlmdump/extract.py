"""Run baseline plus per-question-token masked passes and write dump records."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .config import ExtractorConfig
from .dumpfmt import record_bytes
from .encoding import EncodingPlan, build_plan, masked_variant
from .errors import ExtractionError
from .inputs import Example

log = logging.getLogger("mlmdump")


def _pool(states: np.ndarray, spans: Sequence[tuple[int, int]], mode: str) -> np.ndarray:
    """One vector per span from a (passes, length, dim) state tensor."""
    if mode == "mean":
        pooled = [states[:, a:b].mean(axis=1) for a, b in spans]
    else:  # first-subtoken
        pooled = [states[:, a] for a, _ in spans]
    return np.stack(pooled, axis=1)  # (passes, items, dim)


def _hidden_states(model, variants: list[tuple[int, ...]], config: ExtractorConfig) -> np.ndarray:
    chunks = []
    for offset in range(0, len(variants), config.batch_size):
        batch = torch.tensor(variants[offset : offset + config.batch_size], dtype=torch.long)
        outputs = model(
            input_ids=batch,
            attention_mask=torch.ones_like(batch),
            output_hidden_states=True,
        )
        states = outputs.hidden_states
        if not -len(states) <= config.layer < len(states):
            raise ExtractionError(
                f"layer {config.layer} out of range; model exposes {len(states)} "
                f"hidden-state layers (use -1 for the last)"
            )
        chunks.append(states[config.layer].numpy().astype(np.float32))
    return np.concatenate(chunks, axis=0)


def _check_length(plan: EncodingPlan, example: Example, model) -> None:
    limit = getattr(model.config, "max_position_embeddings", None)
    if limit and len(plan.input_ids) > limit:
        raise ExtractionError(
            f"{example.example_id}: input is {len(plan.input_ids)} tokens but the "
            f"model accepts at most {limit}; truncation is unsupported, shorten "
            f"the question or schema"
        )


def extract(examples: Iterable[Example], config: ExtractorConfig) -> list[int]:
    """Write one dump record per example; returns per-example pass counts."""
    tokenizer = AutoTokenizer.from_pretrained(config.model)
    model = AutoModel.from_pretrained(config.model)
    model.eval()
    torch.manual_seed(config.seed)
    meta = {"model": str(config.model), "pooling": config.pooling, "layer": config.layer}
    pass_counts = []
    with open(Path(config.output), "wb") as out, torch.no_grad():
        for example in examples:
            plan = build_plan(tokenizer, example)
            _check_length(plan, example, model)
            variants = [plan.input_ids]
            variants += [masked_variant(plan, i) for i in range(len(plan.question_spans))]
            assert len(variants) == len(example.question_tokens) + 1
            states = _hidden_states(model, variants, config)
            pooled = _pool(states, plan.item_spans, config.pooling)
            out.write(
                record_bytes(
                    example.example_id + config.id_suffix,
                    baseline=pooled[0],
                    masked=pooled[1:],
                    meta=meta,
                )
            )
            pass_counts.append(len(variants))
            log.info(
                "example %s: %d passes over %d tokens (%d items, dim %d)",
                example.example_id, len(variants), len(plan.input_ids),
                pooled.shape[1], pooled.shape[2],
            )
    return pass_counts
