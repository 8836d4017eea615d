"""Forward-only relation-aware self-attention layer.

Link-graph edges become per-pair relation embeddings added to the key and
value terms of multi-head attention; the block finishes with the usual
residual + layer norm and position-wise feed-forward sublayers. Parameters
are externally supplied (seeded init helper below); there is no training.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datamodel import LinkGraph, LinkTag
from .errors import FormatError, ValidationError

NO_RELATION = "none"

# Composition precedence when one pair carries several tags.
_TAG_PRECEDENCE = (LinkTag.EXACT, LinkTag.PARTIAL, LinkTag.PROBE)

PARAMS_MAGIC = b"RATP"
PARAMS_VERSION = 1


def forward_tag(tag: LinkTag) -> str:
    return f"q>s:{tag.value}"


def mirrored_tag(tag: LinkTag) -> str:
    return f"s>q:{tag.value}"


def relation_tag_names() -> tuple[str, ...]:
    names = [NO_RELATION]
    for tag in LinkTag:
        names.append(forward_tag(tag))
        names.append(mirrored_tag(tag))
    return tuple(names)


@dataclass(frozen=True, eq=False)
class RelationVocabulary:
    """tag -> (key-side vector, value-side vector), both of head dimension.

    The reserved NO_RELATION tag must map to exact zero vectors so that an
    unrelated pair reduces to vanilla attention.
    """

    vectors: dict[str, tuple[np.ndarray, np.ndarray]]

    def __post_init__(self) -> None:
        if NO_RELATION not in self.vectors:
            raise ValidationError(f"vocabulary must include the {NO_RELATION!r} tag")
        frozen = {}
        dim = None
        for tag, (rk, rv) in self.vectors.items():
            rk = np.asarray(rk, dtype=np.float64).copy()
            rv = np.asarray(rv, dtype=np.float64).copy()
            if rk.ndim != 1 or rk.shape != rv.shape:
                raise ValidationError(f"tag {tag!r}: relation vectors must be equal-length 1-D")
            if dim is None:
                dim = rk.shape[0]
            elif rk.shape[0] != dim:
                raise ValidationError(f"tag {tag!r}: vector dimension {rk.shape[0]} != {dim}")
            if not (np.all(np.isfinite(rk)) and np.all(np.isfinite(rv))):
                raise ValidationError(f"tag {tag!r}: non-finite relation vector")
            rk.flags.writeable = False
            rv.flags.writeable = False
            frozen[tag] = (rk, rv)
        none_k, none_v = frozen[NO_RELATION]
        if np.any(none_k != 0.0) or np.any(none_v != 0.0):
            raise ValidationError(f"{NO_RELATION!r} vectors must be exactly zero")
        object.__setattr__(self, "vectors", frozen)

    @property
    def dim(self) -> int:
        return self.vectors[NO_RELATION][0].shape[0]


def init_relation_vocabulary(head_dim: int, seed: int = 0, scale: float = 0.1) -> RelationVocabulary:
    rng = np.random.default_rng(seed)
    vectors = {NO_RELATION: (np.zeros(head_dim), np.zeros(head_dim))}
    for name in relation_tag_names():
        if name == NO_RELATION:
            continue
        vectors[name] = (
            scale * rng.standard_normal(head_dim),
            scale * rng.standard_normal(head_dim),
        )
    return RelationVocabulary(vectors)


def relations_from_graph(graph: LinkGraph, n_question: int, n_schema: int) -> np.ndarray:
    """Expand a bipartite link graph into a dense n x n relation-tag matrix.

    Schema item j sits at combined position n_question + j. Each edge fills
    its forward entry and a direction-marked mirrored entry; when a pair
    carries several tags the highest-precedence one wins.
    """
    if (graph.n_question, graph.n_schema) != (n_question, n_schema):
        raise ValidationError(
            f"graph shape {graph.n_question}x{graph.n_schema} does not match "
            f"requested {n_question}x{n_schema}"
        )
    n = n_question + n_schema
    tags = np.full((n, n), NO_RELATION, dtype="<U16")
    by_pair: dict[tuple[int, int], set[LinkTag]] = {}
    for q, s, tag in graph.edges:
        by_pair.setdefault((q, s), set()).add(tag)
    for (q, s), tag_set in by_pair.items():
        chosen = next(t for t in _TAG_PRECEDENCE if t in tag_set)
        tags[q, n_question + s] = forward_tag(chosen)
        tags[n_question + s, q] = mirrored_tag(chosen)
    tags.flags.writeable = False
    return tags


@dataclass(frozen=True, eq=False)
class RatParams:
    """Per-head projections, feed-forward weights, and two layer-norm pairs.

    w_q/w_k/w_v have shape (heads, dim, dim // heads).
    """

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    fc1_w: np.ndarray
    fc1_b: np.ndarray
    fc2_w: np.ndarray
    fc2_b: np.ndarray
    ln1_scale: np.ndarray
    ln1_shift: np.ndarray
    ln2_scale: np.ndarray
    ln2_shift: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in (
            "w_q", "w_k", "w_v", "fc1_w", "fc1_b", "fc2_w", "fc2_b",
            "ln1_scale", "ln1_shift", "ln2_scale", "ln2_shift",
        ):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"parameter {name} has non-finite entries")
            arr.flags.writeable = False
            arrays[name] = arr
            object.__setattr__(self, name, arr)
        heads, dim, head_dim = arrays["w_q"].shape
        if head_dim * heads != dim:
            raise ValidationError(f"hidden dim {dim} not divisible into {heads} heads")
        for name in ("w_q", "w_k", "w_v"):
            if arrays[name].shape != (heads, dim, head_dim):
                raise ValidationError(f"{name} must have shape {(heads, dim, head_dim)}")
        ffn = arrays["fc1_w"].shape[1]
        expected = {
            "fc1_w": (dim, ffn), "fc1_b": (ffn,), "fc2_w": (ffn, dim), "fc2_b": (dim,),
            "ln1_scale": (dim,), "ln1_shift": (dim,), "ln2_scale": (dim,), "ln2_shift": (dim,),
        }
        for name, shape in expected.items():
            if arrays[name].shape != shape:
                raise ValidationError(f"{name} must have shape {shape}, got {arrays[name].shape}")

    @property
    def heads(self) -> int:
        return self.w_q.shape[0]

    @property
    def dim(self) -> int:
        return self.w_q.shape[1]

    @property
    def head_dim(self) -> int:
        return self.w_q.shape[2]

    @property
    def ffn_dim(self) -> int:
        return self.fc1_w.shape[1]


def init_rat_params(dim: int, heads: int, ffn_dim: int = 1024, seed: int = 0) -> RatParams:
    """Seeded pseudo-random parameters; layer norms start at identity."""
    if dim % heads:
        raise ValidationError(f"dim {dim} must be divisible by heads {heads}")
    rng = np.random.default_rng(seed)
    head_dim = dim // heads
    scale = 1.0 / np.sqrt(dim)
    return RatParams(
        w_q=scale * rng.standard_normal((heads, dim, head_dim)),
        w_k=scale * rng.standard_normal((heads, dim, head_dim)),
        w_v=scale * rng.standard_normal((heads, dim, head_dim)),
        fc1_w=scale * rng.standard_normal((dim, ffn_dim)),
        fc1_b=np.zeros(ffn_dim),
        fc2_w=rng.standard_normal((ffn_dim, dim)) / np.sqrt(ffn_dim),
        fc2_b=np.zeros(dim),
        ln1_scale=np.ones(dim),
        ln1_shift=np.zeros(dim),
        ln2_scale=np.ones(dim),
        ln2_shift=np.zeros(dim),
    )


LAYER_NORM_EPS = 1e-5


def layer_norm(x: np.ndarray, scale: np.ndarray, shift: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + LAYER_NORM_EPS) * scale + shift


def _check_finite(stage: str, arr: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"non-finite values at stage {stage!r}")
    return arr


def _relation_tensors(
    tags: np.ndarray, vocab: RelationVocabulary
) -> tuple[np.ndarray, np.ndarray]:
    n = tags.shape[0]
    rk = np.zeros((n, n, vocab.dim))
    rv = np.zeros((n, n, vocab.dim))
    for i in range(n):
        for j in range(n):
            tag = str(tags[i, j])
            if tag == NO_RELATION:
                continue
            if tag not in vocab.vectors:
                raise ValidationError(f"tag {tag!r} missing from relation vocabulary")
            rk[i, j], rv[i, j] = vocab.vectors[tag]
    return rk, rv


def rat_forward(
    inputs: np.ndarray,
    tags: np.ndarray,
    vocab: RelationVocabulary,
    params: RatParams,
) -> np.ndarray:
    """One relation-aware attention block over n input vectors.

    Attention logits are x_i W_Q (x_j W_K + rK_ij)^T scaled by the square
    root of the head dimension; values are x_j W_V + rV_ij; heads are
    concatenated, then residual + layer norm and FFN + layer norm.
    """
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValidationError(f"inputs must be (n, dim), got shape {x.shape}")
    n, dim = x.shape
    if dim != params.dim:
        raise ValidationError(f"input dim {dim} does not match parameter dim {params.dim}")
    tags = np.asarray(tags)
    if tags.shape != (n, n):
        raise ValidationError(f"tag matrix must be ({n}, {n}), got {tags.shape}")
    if vocab.dim != params.head_dim:
        raise ValidationError(
            f"relation vectors of dim {vocab.dim} do not fit head dim {params.head_dim}"
        )
    _check_finite("inputs", x)

    rk, rv = _relation_tensors(tags, vocab)
    scale = np.sqrt(params.head_dim)
    head_outputs = []
    for h in range(params.heads):
        q = x @ params.w_q[h]
        k = x @ params.w_k[h]
        v = x @ params.w_v[h]
        logits = (q @ k.T + np.einsum("id,ijd->ij", q, rk)) / scale
        _check_finite("attention logits", logits)
        logits = logits - logits.max(axis=1, keepdims=True)
        weights = np.exp(logits)
        weights /= weights.sum(axis=1, keepdims=True)
        _check_finite("attention weights", weights)
        z = weights @ v + np.einsum("ij,ijd->id", weights, rv)
        _check_finite("attention values", z)
        head_outputs.append(z)
    z = np.concatenate(head_outputs, axis=1)
    y1 = layer_norm(x + z, params.ln1_scale, params.ln1_shift)
    _check_finite("attention residual norm", y1)
    ffn = np.maximum(y1 @ params.fc1_w + params.fc1_b, 0.0) @ params.fc2_w + params.fc2_b
    _check_finite("feed-forward", ffn)
    out = layer_norm(y1 + ffn, params.ln2_scale, params.ln2_shift)
    return _check_finite("output norm", out)


# ---------------------------------------------------------------------------
# Parameter fixture file (versioned binary: shapes header + f32le payload)
# ---------------------------------------------------------------------------

_PARAM_ORDER = (
    "w_q", "w_k", "w_v", "fc1_w", "fc1_b", "fc2_w", "fc2_b",
    "ln1_scale", "ln1_shift", "ln2_scale", "ln2_shift",
)


def save_rat_params(params: RatParams, path: str | Path) -> None:
    header = {
        "arrays": [[name, list(getattr(params, name).shape)] for name in _PARAM_ORDER],
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(PARAMS_MAGIC + struct.pack("<II", PARAMS_VERSION, len(head)) + head)
        for name in _PARAM_ORDER:
            handle.write(getattr(params, name).astype("<f4").tobytes())


def load_rat_params(path: str | Path) -> RatParams:
    blob = Path(path).read_bytes()
    if blob[:4] != PARAMS_MAGIC:
        raise FormatError(f"bad parameter-file magic {blob[:4]!r}")
    version, header_len = struct.unpack("<II", blob[4:12])
    if version != PARAMS_VERSION:
        raise FormatError(f"unsupported parameter-file version {version}")
    try:
        header = json.loads(blob[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable parameter header: {exc}") from exc
    offset = 12 + header_len
    arrays = {}
    for name, shape in header["arrays"]:
        count = int(np.prod(shape))
        end = offset + 4 * count
        if end > len(blob):
            raise FormatError(
                f"truncated parameter payload for {name}: expected {end - offset} bytes, "
                f"got {len(blob) - offset}"
            )
        arrays[name] = (
            np.frombuffer(blob[offset:end], dtype="<f4").astype(np.float64).reshape(shape)
        )
        offset = end
    missing = [name for name in _PARAM_ORDER if name not in arrays]
    if missing:
        raise FormatError(f"parameter file missing arrays {missing}")
    return RatParams(**arrays)
