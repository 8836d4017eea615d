"""Masked-LM embedding extractor producing portable binary dump files."""

from .config import ExtractorConfig
from .errors import ExtractionError, InputError
from .extract import extract
from .inputs import Example, SchemaItems, load_examples, load_schemas

__all__ = [
    "Example",
    "ExtractionError",
    "ExtractorConfig",
    "InputError",
    "SchemaItems",
    "extract",
    "load_examples",
    "load_schemas",
]
