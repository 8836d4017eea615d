#!/usr/bin/env python3
"""Synonym case study: does the probe align "category" with the pet-type column?

Builds a one-example corpus (Pets schema; a question using the synonym
"category" instead of the column's surface form), extracts embeddings with
the given masked LM, probes with the Poincare metric through the
schemaprobe CLI, and reports whether the pet-type column receives the
maximal normalized score in the "category" row. Also renders the heatmap.

This is a reported experiment, not a gated test: with a randomly
initialized model the alignment is meaningless, and in offline
environments no pretrained weights are available. Pass --model with a
pretrained checkpoint (e.g. a local bert/roberta/electra directory) for a
meaningful result.
"""

import argparse
import json
import shutil
import subprocess
import sys
from pathlib import Path

QUESTION = ["what", "is", "the", "category", "of", "each", "pet"]
SYNONYM_INDEX = QUESTION.index("category")
TARGET_COLUMN = 1  # items: pets table, pettype, pet age, weight

TABLES = [
    {
        "db_id": "pets_1",
        "table_names_original": ["Pets"],
        "column_names_original": [
            [-1, "*"],
            [0, "PetType"],
            [0, "pet_age"],
            [0, "weight"],
        ],
    }
]
EXAMPLE = {
    "example_id": "case-category",
    "db_id": "pets_1",
    "question_tokens": QUESTION,
    "gold_links": [[SYNONYM_INDEX, TARGET_COLUMN]],
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True, help="masked-LM name or local directory")
    parser.add_argument("--workdir", default="case_study_out")
    parser.add_argument("--pooling", default="mean", choices=("mean", "first-subtoken"))
    parser.add_argument("--layer", type=int, default=-1)
    args = parser.parse_args()

    primary = shutil.which("schemaprobe")
    if primary is None:
        print("REPORT: blocked (schemaprobe CLI is not installed)")
        return 0

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    (work / "tables.json").write_text(json.dumps(TABLES), encoding="utf-8")
    (work / "examples.jsonl").write_text(json.dumps(EXAMPLE) + "\n", encoding="utf-8")

    extract_cmd = [
        sys.executable, "-m", "mlmdump.cli",
        "--examples", str(work / "examples.jsonl"),
        "--schemas", str(work / "tables.json"),
        "--model", args.model,
        "--pooling", args.pooling,
        "--layer", str(args.layer),
        "--out", str(work / "vectors.bin"),
    ]
    result = subprocess.run(extract_cmd, capture_output=True, text=True)
    if result.returncode != 0:
        print(f"REPORT: blocked (extraction failed: {result.stderr.strip()})")
        return 0

    for cmd in (
        [primary, "probe",
         "--examples", str(work / "examples.jsonl"),
         "--schemas", str(work / "tables.json"),
         "--encoder", "dump", "--dump", str(work / "vectors.bin"),
         "--metric", "poincare", "--out", str(work / "matrices.jsonl")],
        [primary, "render",
         "--matrix", str(work / "matrices.jsonl"),
         "--example-id", "case-category",
         "--format", "svg", "--out", str(work / "heatmap.svg")],
        [primary, "render",
         "--matrix", str(work / "matrices.jsonl"),
         "--example-id", "case-category",
         "--format", "pgm", "--out", str(work / "heatmap.pgm")],
    ):
        result = subprocess.run(cmd, capture_output=True, text=True)
        if result.returncode != 0:
            print(f"REPORT: blocked ({' '.join(cmd[1:2])} failed: {result.stderr.strip()})")
            return 0

    record = json.loads((work / "matrices.jsonl").read_text().splitlines()[0])
    rows, cols = record["rows"], record["cols"]
    values = record["values"]
    row = values[SYNONYM_INDEX * cols : (SYNONYM_INDEX + 1) * cols]
    ranked = sorted(range(cols), key=lambda j: row[j], reverse=True)
    labels = record.get("col_labels", [f"s{j}" for j in range(cols)])
    hit = ranked[0] == TARGET_COLUMN
    print(f"model: {args.model} (pooling={args.pooling}, layer={args.layer})")
    print(f"'category' row scores: " + ", ".join(f"{l}={v:.4f}" for l, v in zip(labels, row)))
    print(f"top column for 'category': {labels[ranked[0]]}")
    print(
        "REPORT: "
        + ("the pet-type column has the maximal score in the 'category' row"
           if hit else
           "the pet-type column does NOT have the maximal score in the 'category' row")
    )
    print(f"heatmaps written to {work}/heatmap.svg and {work}/heatmap.pgm")
    return 0


if __name__ == "__main__":
    sys.exit(main())
