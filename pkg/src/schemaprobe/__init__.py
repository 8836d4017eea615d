"""Masked-encoding schema-linking probe with Euclidean and Poincare metrics."""

from .datamodel import (
    ItemKind,
    LinkGraph,
    LinkTag,
    ProbeExample,
    RelationMatrix,
    Schema,
    SchemaItem,
    load_examples,
    load_spider_schemas,
)
from .dumpio import EmbeddingSet, read_embedding_dump, write_embedding_dump
from .encoders import Encoder, ReferenceEncoder, ReferenceEncoderSpec, reference_encode
from .errors import FormatError, ValidationError
from .geometry import (
    BallPoint,
    TangentVector,
    euclidean_distance,
    exp_map_origin,
    mobius_add,
    poincare_distance,
)
from .metrics import LinkMetrics, combine, score_links
from .probe import (
    InputLayout,
    Metric,
    build_input_layout,
    dump_from_encoder,
    materialize_from_dump,
    normalize_minmax,
    probe_example,
    threshold_adjacency,
)
from .ratlayer import (
    RatParams,
    RelationVocabulary,
    init_rat_params,
    init_relation_vocabulary,
    rat_forward,
    relations_from_graph,
)
from .render import RenderFormat, render_matrix
from .rulelink import MatchConfig, lexical_link, merge_graphs

__all__ = [
    "BallPoint",
    "EmbeddingSet",
    "Encoder",
    "FormatError",
    "InputLayout",
    "ItemKind",
    "LinkGraph",
    "LinkMetrics",
    "LinkTag",
    "MatchConfig",
    "Metric",
    "ProbeExample",
    "RatParams",
    "ReferenceEncoder",
    "ReferenceEncoderSpec",
    "RelationMatrix",
    "RelationVocabulary",
    "RenderFormat",
    "Schema",
    "SchemaItem",
    "TangentVector",
    "ValidationError",
    "build_input_layout",
    "combine",
    "dump_from_encoder",
    "euclidean_distance",
    "exp_map_origin",
    "init_rat_params",
    "init_relation_vocabulary",
    "lexical_link",
    "load_examples",
    "load_spider_schemas",
    "materialize_from_dump",
    "merge_graphs",
    "mobius_add",
    "normalize_minmax",
    "poincare_distance",
    "probe_example",
    "rat_forward",
    "read_embedding_dump",
    "reference_encode",
    "relations_from_graph",
    "render_matrix",
    "score_links",
    "threshold_adjacency",
    "write_embedding_dump",
]
