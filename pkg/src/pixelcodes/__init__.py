"""Selective binary pixel encodings for stochastic self-assembly."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    DimensionError,
    ExhaustedSearchError,
    GridFormatError,
    InvalidMatrixError,
)
from .matrix import (
    PixelMatrix,
    elementwise_product,
    enumerate_binary,
    interaction_sum,
    is_hadamard,
    mate,
    normalized_score,
    row_permutations,
    sylvester,
)

__all__ = [
    "CapacityError",
    "DimensionError",
    "ExhaustedSearchError",
    "GridFormatError",
    "InvalidMatrixError",
    "PixelMatrix",
    "elementwise_product",
    "enumerate_binary",
    "interaction_sum",
    "is_hadamard",
    "mate",
    "normalized_score",
    "row_permutations",
    "sylvester",
]
