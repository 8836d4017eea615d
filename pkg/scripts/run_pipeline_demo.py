#!/usr/bin/env python3
"""End-to-end demo over the synonym suite: probe vs lexical baseline.

Generates the corpus, probes with both metrics, thresholds, merges with the
lexical baseline, scores everything against gold, and renders one example's
heatmap in all three formats.
"""

import argparse
import subprocess
import sys
from pathlib import Path

from schemaprobe.datamodel import save_examples, save_spider_schemas
from schemaprobe.synthetic import synonym_suite


def cli(*argv: object) -> None:
    cmd = [sys.executable, "-m", "schemaprobe.cli", *map(str, argv)]
    print("$", " ".join(cmd[2:]), flush=True)
    subprocess.run(cmd, check=True)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo_out")
    parser.add_argument("--tau", type=float, default=0.3)
    args = parser.parse_args()

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    cases = synonym_suite()
    save_spider_schemas([c.example.schema for c in cases], work / "tables.json")
    save_examples([c.example for c in cases], work / "examples.jsonl")

    for metric in ("euclidean", "poincare"):
        cli(
            "probe", "--examples", work / "examples.jsonl", "--schemas", work / "tables.json",
            "--metric", metric, "--out", work / f"matrices_{metric}.jsonl",
        )
        cli(
            "link", "--matrices", work / f"matrices_{metric}.jsonl",
            "--tau", args.tau, "--out", work / f"links_{metric}.jsonl",
        )
        print(f"-- probe ({metric}) vs gold:", flush=True)
        cli(
            "eval", "--pred", work / f"links_{metric}.jsonl",
            "--gold-from-examples", work / "examples.jsonl",
        )

    cli(
        "baseline", "--examples", work / "examples.jsonl", "--schemas", work / "tables.json",
        "--out", work / "links_lexical.jsonl",
    )
    print("-- lexical baseline vs gold (surface forms are disjoint, so expect 0):", flush=True)
    cli(
        "eval", "--pred", work / "links_lexical.jsonl",
        "--gold-from-examples", work / "examples.jsonl",
    )

    cli(
        "merge", "--a", work / "links_poincare.jsonl", "--b", work / "links_lexical.jsonl",
        "--out", work / "links_merged.jsonl",
    )

    example_id = cases[0].example.example_id
    for fmt in ("csv", "pgm", "svg"):
        cli(
            "render", "--matrix", work / "matrices_poincare.jsonl",
            "--example-id", example_id, "--format", fmt,
            "--out", work / f"{example_id}.{fmt}",
        )
    print(f"artifacts in {work}/")


if __name__ == "__main__":
    main()
