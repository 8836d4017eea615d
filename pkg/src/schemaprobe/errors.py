"""Error taxonomy shared across the package.

The CLI maps ValidationError to exit code 1 and FormatError / OSError to
exit code 2; everything else is a bug.
"""


class ValidationError(ValueError):
    """A domain rule was violated (bad index, bad range, bad shape)."""


class FormatError(ValueError):
    """An external file is malformed (syntax, magic bytes, byte counts)."""
