"""Command line for the extractor; flags mirror ExtractorConfig.

Exit codes: 0 success, 1 bad input/usage, 2 extraction or I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import POOLING_MODES, ExtractorConfig
from .errors import ExtractionError, InputError
from .extract import extract
from .inputs import load_examples, load_schemas


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlmdump",
        description="Extract baseline and per-question-token masked embeddings "
        "from a masked language model into a binary dump file.",
    )
    parser.add_argument("--examples", required=True, help="JSON Lines examples file")
    parser.add_argument("--schemas", required=True, help="Spider-style tables.json")
    parser.add_argument("--model", required=True, help="model name or local directory")
    parser.add_argument("--pooling", choices=POOLING_MODES, default="mean")
    parser.add_argument("--layer", type=int, default=-1, help="hidden-state layer (-1 = last)")
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--id-suffix", default="", help="appended to each record's example_id")
    parser.add_argument("--out", required=True, help="output dump path")
    parser.add_argument("--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = ExtractorConfig(
            model=args.model,
            output=args.out,
            pooling=args.pooling,
            layer=args.layer,
            batch_size=args.batch_size,
            seed=args.seed,
            id_suffix=args.id_suffix,
        )
        schemas = load_schemas(args.schemas)
        examples = load_examples(args.examples, schemas)
        pass_counts = extract(examples, config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ExtractionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    total = sum(pass_counts)
    print(f"wrote {len(pass_counts)} records ({total} forward passes) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
