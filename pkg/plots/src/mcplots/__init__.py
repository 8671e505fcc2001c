"""Figure regeneration for wmc experiment CSVs."""

from .figures import (
    KINDS,
    RANK_CURVES,
    SAMPLE_W_CURVES,
    SPECTRAL_GAP_CURVES,
    WEIGHT_ENTRIES,
    FigureSpec,
    SchemaError,
    build_figure,
    read_rows,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "KINDS", "RANK_CURVES", "SAMPLE_W_CURVES", "SPECTRAL_GAP_CURVES",
    "WEIGHT_ENTRIES", "FigureSpec", "SchemaError", "build_figure",
    "read_rows", "render",
]
