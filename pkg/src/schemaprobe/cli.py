"""Command-line pipeline: probe, link, baseline, merge, eval, render, selftest.

Subcommands exchange JSON Lines intermediates (see serialize). Exit codes:
0 success, 1 validation/usage error, 2 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .datamodel import ProbeExample, load_examples, load_spider_schemas
from .dumpio import read_embedding_dump
from .encoders import ReferenceEncoder, ReferenceEncoderSpec, hashed_rng
from .errors import FormatError, ValidationError
from .metrics import LinkMetrics, combine, score_links, score_pairs
from .probe import Metric, materialize_from_dump, normalize_minmax, probe_example, threshold_adjacency
from .render import render_matrix
from .rulelink import MatchConfig, lexical_link, merge_graphs
from .serialize import (
    LinkRecord,
    MatrixRecord,
    read_gold_links,
    read_links,
    read_matrices,
    write_links,
    write_matrices,
)
from .synthetic import exact_match_suite, recovery_suite, synonym_suite

T = TypeVar("T")
U = TypeVar("U")

REFERENCE_DIM = 16


class _UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str) -> None:
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); the contract wants 1
        raise _UsageError(self, message)


def _pmap(fn: Callable[[T], U], items: list[T]) -> list[U]:
    """Concurrent map with input-order results."""
    if len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(8, len(items))) as pool:
        return list(pool.map(fn, items))


def _load_corpus(args) -> list[ProbeExample]:
    schemas = load_spider_schemas(args.schemas)
    return load_examples(args.examples, schemas)


def planted_from_gold(example: ProbeExample, seed: int) -> dict[tuple[int, int], float]:
    """Deterministic similarities in [0.4, 1.0] for each gold link."""
    if not example.gold_links:
        return {}
    return {
        (q, s): 0.4 + 0.6 * hashed_rng(seed, "plant", example.example_id, q, s).random()
        for q, s in example.gold_links
    }


def _matrix_record(example: ProbeExample, matrix) -> MatrixRecord:
    return MatrixRecord(
        example_id=example.example_id,
        matrix=matrix,
        row_labels=example.question_tokens,
        col_labels=tuple(example.schema.item_label(j) for j in range(len(example.schema))),
    )


def cmd_probe(args) -> int:
    examples = _load_corpus(args)
    metric = Metric(args.metric)
    if args.encoder == "dump":
        if not args.dump:
            raise ValidationError("--dump PATH is required with --encoder dump")
        by_id = {}
        for record in read_embedding_dump(args.dump):
            if record.example_id in by_id:
                raise ValidationError(f"duplicate dump record for {record.example_id!r}")
            by_id[record.example_id] = record

        def run(example: ProbeExample) -> MatrixRecord:
            if example.example_id not in by_id:
                raise ValidationError(f"no dump record for example {example.example_id!r}")
            return _matrix_record(
                example, materialize_from_dump(by_id[example.example_id], metric, example)
            )

    else:

        def run(example: ProbeExample) -> MatrixRecord:
            spec = ReferenceEncoderSpec.build(
                example,
                dim=REFERENCE_DIM,
                seed=args.seed,
                planted=planted_from_gold(example, args.seed),
            )
            return _matrix_record(example, probe_example(example, ReferenceEncoder(spec), metric))

    write_matrices(_pmap(run, examples), args.out)
    return 0


def cmd_link(args) -> int:
    records = []
    for rec in read_matrices(args.matrices):
        matrix = rec.matrix if rec.matrix.normalized else normalize_minmax(rec.matrix)
        records.append(
            LinkRecord(example_id=rec.example_id, graph=threshold_adjacency(matrix, args.tau))
        )
    write_links(records, args.out)
    return 0


def cmd_baseline(args) -> int:
    examples = _load_corpus(args)
    config = MatchConfig(max_ngram=args.max_ngram)
    records = _pmap(
        lambda ex: LinkRecord(example_id=ex.example_id, graph=lexical_link(ex, config)),
        examples,
    )
    write_links(records, args.out)
    return 0


def cmd_merge(args) -> int:
    left = {rec.example_id: rec.graph for rec in read_links(args.a)}
    right = {rec.example_id: rec.graph for rec in read_links(args.b)}
    if set(left) != set(right):
        only_a = sorted(set(left) - set(right))
        only_b = sorted(set(right) - set(left))
        raise ValidationError(
            f"link files cover different examples (only in --a: {only_a}, only in --b: {only_b})"
        )
    records = [
        LinkRecord(example_id=ex_id, graph=merge_graphs(left[ex_id], right[ex_id]))
        for ex_id in left
    ]
    write_links(records, args.out)
    return 0


def cmd_eval(args) -> int:
    pred = {rec.example_id: rec.graph for rec in read_links(args.pred)}
    gold = read_gold_links(args.gold_from_examples)
    skipped = sorted(set(pred) - set(gold))
    per_example: dict[str, LinkMetrics] = {}
    for ex_id in sorted(gold):
        if ex_id in pred:
            per_example[ex_id] = score_links(pred[ex_id], gold[ex_id])
        else:
            per_example[ex_id] = score_pairs(frozenset(), gold[ex_id])
    overall = combine(per_example.values())
    if args.report == "json":
        payload = {
            "examples": {
                ex_id: {
                    "tp": m.true_positives,
                    "fp": m.false_positives,
                    "fn": m.false_negatives,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                }
                for ex_id, m in per_example.items()
            },
            "overall": {
                "tp": overall.true_positives,
                "fp": overall.false_positives,
                "fn": overall.false_negatives,
                "precision": overall.precision,
                "recall": overall.recall,
                "f1": overall.f1,
            },
            "scored": len(per_example),
            "skipped_no_gold": skipped,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for ex_id, m in per_example.items():
            print(f"{ex_id}\tP={m.precision:.3f} R={m.recall:.3f} F1={m.f1:.3f}")
        print(
            f"overall\tP={overall.precision:.3f} R={overall.recall:.3f} "
            f"F1={overall.f1:.3f} ({len(per_example)} examples"
            + (f", {len(skipped)} without gold skipped)" if skipped else ")")
        )
    return 0


def cmd_render(args) -> int:
    match = [rec for rec in read_matrices(args.matrix) if rec.example_id == args.example_id]
    if not match:
        raise ValidationError(f"no matrix record for example {args.example_id!r}")
    rec = match[0]
    matrix = rec.matrix if rec.matrix.normalized else normalize_minmax(rec.matrix)
    rows, cols = rec.labels()
    render_matrix(matrix, rows, cols, args.format, args.out)
    return 0


def _selftest_probe(case, metric: Metric, dim: int, seed: int) -> LinkMetrics:
    spec = ReferenceEncoderSpec.build(case.example, dim=dim, seed=seed, planted=case.planted)
    matrix = normalize_minmax(probe_example(case.example, ReferenceEncoder(spec), metric))
    tau = min(float(matrix.values[q, s]) for q, s in case.planted)
    graph = threshold_adjacency(matrix, tau)
    return score_links(graph, case.example.gold_links)


def cmd_selftest(args) -> int:
    started = time.perf_counter()
    ok = True
    probe_aggregates = []

    recovery = recovery_suite(count=args.count)
    synonym = synonym_suite()
    exact = exact_match_suite()

    for metric in (Metric.EUCLIDEAN, Metric.POINCARE):
        for name, suite in (("recovery", recovery), ("synonym", synonym)):
            agg = combine(
                _pmap(lambda c: _selftest_probe(c, metric, args.dim, args.seed), suite)
            )
            probe_aggregates.append(agg)
            ok &= agg.f1 == 1.0
            print(
                f"{name} probe ({metric.value}): P={agg.precision:.3f} "
                f"R={agg.recall:.3f} F1={agg.f1:.3f} ({len(suite)} examples)"
            )

    lex_synonym = combine(
        score_links(lexical_link(c.example), c.example.gold_links) for c in synonym
    )
    ok &= lex_synonym.f1 == 0.0 and lex_synonym.true_positives == 0
    print(f"synonym lexical baseline: F1={lex_synonym.f1:.3f} (expected 0.000)")

    lex_exact = combine(
        score_links(lexical_link(c.example), c.example.gold_links) for c in exact
    )
    ok &= lex_exact.f1 == 1.0
    print(f"exact-match lexical baseline: F1={lex_exact.f1:.3f} (expected 1.000)")

    overall = combine(probe_aggregates)
    print(f"overall probe F1 = {overall.f1:.3f}")
    elapsed = time.perf_counter() - started
    if not ok:
        print(f"selftest FAILED after {elapsed:.2f}s", file=sys.stderr)
        return 1
    print(f"selftest passed in {elapsed:.2f}s")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="schemaprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", help="compute relation matrices for a corpus")
    p.add_argument("--examples", required=True)
    p.add_argument("--schemas", required=True)
    p.add_argument("--encoder", choices=("reference", "dump"), default="reference")
    p.add_argument("--dump", help="embedding dump path (required with --encoder dump)")
    p.add_argument("--metric", choices=("euclidean", "poincare"), default="euclidean")
    p.add_argument("--seed", type=int, default=0, help="reference-encoder seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("link", help="threshold normalized matrices into probe links")
    p.add_argument("--matrices", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("baseline", help="rule-based lexical matching links")
    p.add_argument("--examples", required=True)
    p.add_argument("--schemas", required=True)
    p.add_argument("--max-ngram", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("merge", help="union two link files over the same examples")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("eval", help="score predicted links against gold links")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold-from-examples", required=True)
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="render one matrix as csv, pgm, or svg")
    p.add_argument("--matrix", required=True)
    p.add_argument("--example-id", required=True)
    p.add_argument("--format", choices=("csv", "pgm", "svg"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("selftest", help="run the reference-encoder end-to-end suite")
    p.add_argument("--count", type=int, default=60, help="recovery-suite size")
    p.add_argument("--dim", type=int, default=REFERENCE_DIM)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc.parser.format_usage(), end="", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
