"""Token-level input plan: ids plus subword spans for words and schema items.

The input sequence follows the probing convention: start marker, question
words, a separator, then every schema item introduced by its own separator.
Question-word spans let a masked pass replace all of a word's subword
pieces with the mask token; item spans are what gets pooled into one
vector per schema item.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExtractionError
from .inputs import Example


@dataclass(frozen=True)
class EncodingPlan:
    input_ids: tuple[int, ...]
    question_spans: tuple[tuple[int, int], ...]
    item_spans: tuple[tuple[int, int], ...]
    mask_id: int


def _special_ids(tokenizer) -> tuple[int, int, int]:
    start = tokenizer.cls_token_id
    if start is None:
        start = tokenizer.bos_token_id
    sep = tokenizer.sep_token_id
    if sep is None:
        sep = tokenizer.eos_token_id
    mask = tokenizer.mask_token_id
    if start is None or sep is None:
        raise ExtractionError("tokenizer lacks start/separator special tokens")
    if mask is None:
        raise ExtractionError("tokenizer has no mask token; a masked LM is required")
    return start, sep, mask


def _pieces(tokenizer, word: str) -> list[int]:
    return tokenizer(word, add_special_tokens=False)["input_ids"]


def build_plan(tokenizer, example: Example) -> EncodingPlan:
    start, sep, mask = _special_ids(tokenizer)
    ids: list[int] = [start]
    question_spans = []
    for word in example.question_tokens:
        pieces = _pieces(tokenizer, word)
        if not pieces:
            raise ExtractionError(
                f"{example.example_id}: tokenizer produced zero subtokens "
                f"for question word {word!r}"
            )
        question_spans.append((len(ids), len(ids) + len(pieces)))
        ids.extend(pieces)
    ids.append(sep)
    item_spans = []
    for index, name_tokens in enumerate(example.schema.items):
        ids.append(sep)
        pieces = [p for token in name_tokens for p in _pieces(tokenizer, token)]
        if not pieces:
            raise ExtractionError(
                f"{example.example_id}: tokenizer produced zero subtokens "
                f"for schema item {index} ({' '.join(name_tokens)!r})"
            )
        item_spans.append((len(ids), len(ids) + len(pieces)))
        ids.extend(pieces)
    return EncodingPlan(
        input_ids=tuple(ids),
        question_spans=tuple(question_spans),
        item_spans=tuple(item_spans),
        mask_id=mask,
    )


def masked_variant(plan: EncodingPlan, question_index: int) -> tuple[int, ...]:
    """Input ids with every subword piece of one question word masked."""
    start, stop = plan.question_spans[question_index]
    ids = list(plan.input_ids)
    ids[start:stop] = [plan.mask_id] * (stop - start)
    return tuple(ids)
