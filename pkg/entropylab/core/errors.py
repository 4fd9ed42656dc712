"""Exception hierarchy for entropylab.

Every error raised by the library derives from :class:`EntropyLabError`, and the
common categories also derive from the matching built-in so callers can keep
catching ``ValueError`` or ``NotImplementedError``.
"""

from __future__ import annotations

from typing import Optional


class EntropyLabError(Exception):
    """Root of all entropylab errors."""


class InvalidParameterError(EntropyLabError, ValueError):
    """A parameter is outside the domain an operation accepts."""


class UnsupportedOperationError(EntropyLabError, NotImplementedError):
    """The operation is well defined but not available for this input."""


class InfeasibleBodyError(EntropyLabError):
    """An H-polytope has no interior point."""


class InternalInconsistencyError(EntropyLabError):
    """A sampler produced a point where its own density vanishes."""


class ConvolutionDensityError(EntropyLabError):
    """The MC convolution density estimate stayed at zero after refinement."""

    def __init__(self, message: str, m_inner: int):
        super().__init__(f"{message} (last m_inner={m_inner}; increase m_inner)")
        self.m_inner = m_inner


class ConfigError(EntropyLabError):
    """An experiment configuration failed to parse or validate."""

    def __init__(self, message: str, location: Optional[str] = None):
        where = f" at {location}" if location else ""
        super().__init__(f"{message}{where}")
        self.location = location
