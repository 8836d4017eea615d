#!/usr/bin/env python3
"""Write the bundled synthetic suites out as schema/example files.

Produces <outdir>/{recovery,synonym,exact}/tables.json and examples.jsonl,
ready for the CLI (`schemaprobe probe --examples ... --schemas ...`).
"""

import argparse
from pathlib import Path

from schemaprobe.datamodel import save_examples, save_spider_schemas
from schemaprobe.synthetic import exact_match_suite, recovery_suite, synonym_suite


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="corpus", help="output directory")
    parser.add_argument("--count", type=int, default=60, help="recovery-suite size")
    args = parser.parse_args()

    suites = {
        "recovery": recovery_suite(count=args.count),
        "synonym": synonym_suite(),
        "exact": exact_match_suite(),
    }
    for name, cases in suites.items():
        outdir = Path(args.outdir) / name
        outdir.mkdir(parents=True, exist_ok=True)
        save_spider_schemas([c.example.schema for c in cases], outdir / "tables.json")
        save_examples([c.example for c in cases], outdir / "examples.jsonl")
        print(f"{name}: {len(cases)} examples -> {outdir}")


if __name__ == "__main__":
    main()
