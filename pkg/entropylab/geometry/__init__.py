"""Convex bodies.

Operations on bodies (volumes, samplers, Minkowski sums, uniform models) live in
:mod:`entropylab.geometry.operations`.
"""

from entropylab.geometry.bodies import (
    Ball,
    Box,
    ConvexBody,
    Ellipsoid,
    HPolytope,
    Simplex,
    VolumeEstimate,
)

__all__ = ["Ball", "Box", "ConvexBody", "Ellipsoid", "HPolytope", "Simplex", "VolumeEstimate"]
