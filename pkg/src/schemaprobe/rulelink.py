"""Rule-based lexical schema linker: the baseline the probe is compared to.

Question n-grams are matched against schema item names longest-first,
greedily and without overlap per schema item. A full-name match yields
exact edges, a strict contiguous sub-sequence yields partial edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .datamodel import LinkGraph, LinkTag, ProbeExample
from .errors import ValidationError


@dataclass(frozen=True)
class MatchConfig:
    max_ngram: int = 5
    case_fold: bool = True

    def __post_init__(self) -> None:
        if self.max_ngram < 1:
            raise ValidationError(f"max_ngram must be >= 1, got {self.max_ngram}")


def _contiguous_strict_subsequence(gram: tuple[str, ...], name: tuple[str, ...]) -> bool:
    if len(gram) >= len(name):
        return False
    return any(name[k : k + len(gram)] == gram for k in range(len(name) - len(gram) + 1))


def lexical_link(example: ProbeExample, config: MatchConfig = MatchConfig()) -> LinkGraph:
    """Link question tokens to schema items by n-gram surface matching."""
    fold = (lambda t: t.lower()) if config.case_fold else (lambda t: t)
    question = tuple(fold(t) for t in example.question_tokens)
    edges: set[tuple[int, int, LinkTag]] = set()
    for item in example.schema.items:
        name = tuple(fold(t) for t in item.name_tokens)
        covered = [False] * len(question)
        for n in range(min(config.max_ngram, len(question)), 0, -1):
            for start in range(len(question) - n + 1):
                if any(covered[start : start + n]):
                    continue
                gram = question[start : start + n]
                if gram == name:
                    tag = LinkTag.EXACT
                elif _contiguous_strict_subsequence(gram, name):
                    tag = LinkTag.PARTIAL
                else:
                    continue
                for pos in range(start, start + n):
                    edges.add((pos, item.seq_index, tag))
                    covered[pos] = True
    return LinkGraph(
        n_question=len(question), n_schema=len(example.schema), edges=frozenset(edges)
    )


def merge_graphs(probe: LinkGraph, rule: LinkGraph) -> LinkGraph:
    """Union of two edge sets over the same example; tags are preserved."""
    if (probe.n_question, probe.n_schema) != (rule.n_question, rule.n_schema):
        raise ValidationError(
            f"cannot merge graphs of shapes {probe.n_question}x{probe.n_schema} "
            f"and {rule.n_question}x{rule.n_schema}"
        )
    return LinkGraph(
        n_question=probe.n_question,
        n_schema=probe.n_schema,
        edges=probe.edges | rule.edges,
    )
