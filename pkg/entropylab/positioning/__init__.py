"""Affine maps and positioning.

Only :class:`AffineMap` is re-exported here; it sits below the density zoo in
the import graph. The positioning operations live in
:mod:`entropylab.positioning.position`.
"""

from entropylab.positioning.affine import AffineMap

__all__ = ["AffineMap"]
