"""Writer for the binary embedding-dump format the probing package reads.

Record: "PRBD" magic, u32 version (1), u32 header length, UTF-8 JSON header
{example_id, dim, num_question_tokens, num_schema_items, dtype: "f32le",
order: "baseline_then_masked_i_major"} plus extractor metadata, then the
float32 little-endian payload: items*dim baseline values followed by
questions*items*dim masked values (question index outer).
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"PRBD"
FORMAT_VERSION = 1


def record_bytes(
    example_id: str,
    baseline: np.ndarray,
    masked: np.ndarray,
    meta: dict | None = None,
) -> bytes:
    baseline = np.ascontiguousarray(baseline, dtype="<f4")
    masked = np.ascontiguousarray(masked, dtype="<f4")
    n_s, dim = baseline.shape
    n_q = masked.shape[0]
    assert masked.shape == (n_q, n_s, dim)
    header = {
        "example_id": example_id,
        "dim": int(dim),
        "num_question_tokens": int(n_q),
        "num_schema_items": int(n_s),
        "dtype": "f32le",
        "order": "baseline_then_masked_i_major",
    }
    if meta:
        header["meta"] = meta
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return (
        MAGIC
        + struct.pack("<II", FORMAT_VERSION, len(head))
        + head
        + baseline.tobytes()
        + masked.tobytes()
    )
