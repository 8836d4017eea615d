"""Binary embedding-dump format: reader, writer, and the in-memory set.

Record layout (little-endian):
  bytes 0-3   magic "PRBD"
  bytes 4-7   format version, u32 (currently 1)
  bytes 8-11  header length L, u32
  bytes 12..  UTF-8 JSON header {example_id, dim, num_question_tokens,
              num_schema_items, dtype: "f32le",
              order: "baseline_then_masked_i_major"}
  payload     num_schema_items*dim baseline floats, then
              num_question_tokens*num_schema_items*dim masked floats,
              row-major (question index outer, item middle, coord inner),
              IEEE-754 binary32 little-endian.

Records concatenate back-to-back to form a multi-example dump. Values are
promoted to float64 on read; unknown extra header keys are ignored.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np

from .errors import FormatError, ValidationError

MAGIC = b"PRBD"
FORMAT_VERSION = 1
DTYPE_NAME = "f32le"
ORDER_NAME = "baseline_then_masked_i_major"

_REQUIRED_KEYS = (
    "example_id",
    "dim",
    "num_question_tokens",
    "num_schema_items",
    "dtype",
    "order",
)


class DumpFormatError(FormatError):
    """Bad magic, version, or header in an embedding dump."""


class DumpTruncatedError(FormatError):
    """Dump ended before the declared payload was complete."""


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Baseline schema-item vectors plus one masked variant per question token.

    baseline has shape (num items, dim); masked has shape
    (num question tokens, num items, dim).
    """

    example_id: str
    baseline: np.ndarray
    masked: np.ndarray

    def __post_init__(self) -> None:
        base = np.ascontiguousarray(np.asarray(self.baseline, dtype=np.float64))
        mask = np.ascontiguousarray(np.asarray(self.masked, dtype=np.float64))
        if base.ndim != 2 or base.size == 0:
            raise ValidationError(
                f"{self.example_id}: baseline must be (items, dim), got shape {base.shape}"
            )
        if mask.ndim != 3 or mask.shape[1:] != base.shape or mask.shape[0] == 0:
            raise ValidationError(
                f"{self.example_id}: masked must be (questions, {base.shape[0]}, "
                f"{base.shape[1]}), got shape {mask.shape}"
            )
        bad = np.argwhere(~np.isfinite(base))
        if len(bad):
            j, _ = bad[0]
            raise ValidationError(
                f"{self.example_id}: non-finite baseline value at item j={j}"
            )
        bad = np.argwhere(~np.isfinite(mask))
        if len(bad):
            i, j, _ = bad[0]
            raise ValidationError(
                f"{self.example_id}: non-finite masked value at (i={i}, j={j})"
            )
        base.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "baseline", base)
        object.__setattr__(self, "masked", mask)

    @property
    def dim(self) -> int:
        return self.baseline.shape[1]

    @property
    def n_schema(self) -> int:
        return self.baseline.shape[0]

    @property
    def n_question(self) -> int:
        return self.masked.shape[0]


def record_bytes(dump: EmbeddingSet, extra_header: dict | None = None) -> bytes:
    """Serialize one EmbeddingSet to its binary record."""
    header = {
        "example_id": dump.example_id,
        "dim": dump.dim,
        "num_question_tokens": dump.n_question,
        "num_schema_items": dump.n_schema,
        "dtype": DTYPE_NAME,
        "order": ORDER_NAME,
    }
    if extra_header:
        for key, value in extra_header.items():
            header.setdefault(key, value)
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = (
        dump.baseline.astype("<f4").tobytes()
        + dump.masked.astype("<f4").tobytes()
    )
    return MAGIC + struct.pack("<II", FORMAT_VERSION, len(head)) + head + payload


def write_embedding_dump(
    dumps: Iterable[EmbeddingSet], path: str | Path, extra_header: dict | None = None
) -> None:
    with open(path, "wb") as handle:
        for dump in dumps:
            handle.write(record_bytes(dump, extra_header))


def _read_exact(handle: BinaryIO, count: int, what: str) -> bytes:
    data = handle.read(count)
    if len(data) != count:
        raise DumpTruncatedError(
            f"truncated {what}: expected {count} bytes, got {len(data)}"
        )
    return data


def _read_record(handle: BinaryIO) -> EmbeddingSet | None:
    prefix = handle.read(12)
    if not prefix:
        return None
    if len(prefix) < 12:
        raise DumpTruncatedError(
            f"truncated record prefix: expected 12 bytes, got {len(prefix)}"
        )
    magic, version, header_len = prefix[:4], *struct.unpack("<II", prefix[4:])
    if magic != MAGIC:
        raise DumpFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise DumpFormatError(f"unsupported format version {version}")
    raw_header = _read_exact(handle, header_len, "header")
    try:
        header = json.loads(raw_header.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DumpFormatError(f"unreadable record header: {exc}") from exc
    missing = [k for k in _REQUIRED_KEYS if k not in header]
    if missing:
        raise DumpFormatError(f"record header missing keys {missing}")
    if header["dtype"] != DTYPE_NAME:
        raise DumpFormatError(f"unsupported dtype {header['dtype']!r}")
    if header["order"] != ORDER_NAME:
        raise DumpFormatError(f"unsupported payload order {header['order']!r}")
    dim = header["dim"]
    n_q = header["num_question_tokens"]
    n_s = header["num_schema_items"]
    for name, value in (("dim", dim), ("num_question_tokens", n_q), ("num_schema_items", n_s)):
        if not isinstance(value, int) or value < 1:
            raise DumpFormatError(f"header field {name} must be a positive integer, got {value!r}")
    payload = _read_exact(handle, 4 * dim * (n_s + n_q * n_s), "payload")
    floats = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    baseline = floats[: n_s * dim].reshape(n_s, dim)
    masked = floats[n_s * dim :].reshape(n_q, n_s, dim)
    return EmbeddingSet(example_id=header["example_id"], baseline=baseline, masked=masked)


def read_embedding_dump(path: str | Path) -> list[EmbeddingSet]:
    """Read every record of a dump file, validating format and finiteness."""
    records = []
    with open(path, "rb") as handle:
        while True:
            record = _read_record(handle)
            if record is None:
                return records
            records.append(record)
