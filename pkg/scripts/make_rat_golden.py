#!/usr/bin/env python3
"""Regenerate the frozen attention-layer regression fixtures in tests/data.

Run from the repository root after an intentional change to the layer math,
then review the test diff before committing.
"""

from pathlib import Path

import numpy as np

from schemaprobe import LinkGraph, LinkTag, init_rat_params, init_relation_vocabulary, rat_forward
from schemaprobe.ratlayer import load_rat_params, relations_from_graph, save_rat_params

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    params_path = DATA_DIR / "rat_params_small.bin"
    save_rat_params(init_rat_params(dim=16, heads=4, ffn_dim=32, seed=9), params_path)
    params = load_rat_params(params_path)  # freeze at f32 storage precision

    rng = np.random.default_rng(2024)
    x = rng.standard_normal((4, params.dim))
    vocab = init_relation_vocabulary(params.head_dim, seed=1)
    graph = LinkGraph(2, 2, {(0, 1, LinkTag.EXACT), (1, 0, LinkTag.PROBE)})
    tags = relations_from_graph(graph, 2, 2)
    y = rat_forward(x, tags, vocab, params)
    np.savez(DATA_DIR / "rat_golden.npz", x=x, y=y)
    print(f"wrote {params_path}")
    print(f"wrote {DATA_DIR / 'rat_golden.npz'} (y[0,:4]={y[0, :4]})")


if __name__ == "__main__":
    main()
