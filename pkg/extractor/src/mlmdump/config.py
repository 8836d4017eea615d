from dataclasses import dataclass
from pathlib import Path

from .errors import InputError

POOLING_MODES = ("mean", "first-subtoken")


@dataclass(frozen=True)
class ExtractorConfig:
    """Extraction settings; pooling and layer are recorded in each record header."""

    model: str
    output: str | Path
    pooling: str = "mean"
    layer: int = -1
    batch_size: int = 8
    seed: int = 0
    id_suffix: str = ""

    def __post_init__(self) -> None:
        if self.pooling not in POOLING_MODES:
            raise InputError(f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}")
        if self.batch_size < 1:
            raise InputError(f"batch_size must be >= 1, got {self.batch_size}")
