class InputError(ValueError):
    """Bad corpus file or unusable input (exit code 1 at the CLI)."""


class ExtractionError(RuntimeError):
    """The model or tokenizer cannot process an input as required."""
