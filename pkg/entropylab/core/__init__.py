"""entropylab core - settings, errors and random streams."""

from entropylab.core.config import Settings, get_settings
from entropylab.core.errors import (
    ConfigError,
    ConvolutionDensityError,
    EntropyLabError,
    InfeasibleBodyError,
    InternalInconsistencyError,
    InvalidParameterError,
    UnsupportedOperationError,
)
from entropylab.core.streams import RandomStream, as_stream, map_chunks

__all__ = [
    "Settings",
    "get_settings",
    "ConfigError",
    "ConvolutionDensityError",
    "EntropyLabError",
    "InfeasibleBodyError",
    "InternalInconsistencyError",
    "InvalidParameterError",
    "UnsupportedOperationError",
    "RandomStream",
    "as_stream",
    "map_chunks",
]
