"""Convex bodies with analytic volumes, membership and affine images.

Variants: :class:`Ball`, :class:`Box`, :class:`Simplex`, :class:`Ellipsoid` and
:class:`HPolytope`. All are immutable. Volumes are kept in log form
(``log_volume``) because the unit ball volume underflows long before the
dimensions we care about stop being interesting.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from math import lgamma, log, pi
from typing import Any, ClassVar, Dict, Tuple

import numpy as np
from pydantic import BaseModel

from entropylab.core.errors import InvalidParameterError, UnsupportedOperationError
from entropylab.positioning.affine import AffineMap

MEMBERSHIP_TOL = 1e-9


def log_unit_ball_volume(n: int) -> float:
    """log ω_n, with ω_n = π^{n/2} / Γ(n/2 + 1)."""
    return 0.5 * n * log(pi) - lgamma(0.5 * n + 1.0)


def _frozen(array: Any, ndmin: int = 1) -> np.ndarray:
    out = np.array(array, dtype=float, ndmin=ndmin)
    out.setflags(write=False)
    return out


class VolumeEstimate(BaseModel):
    """Lebesgue volume; ``exact`` bodies have ``std_error == 0``."""

    value: float
    std_error: float = 0.0
    exact: bool = True
    sample_size: int = 0


class ConvexBody(ABC):
    """A compact convex set with nonempty interior."""

    variant: ClassVar[str] = ""

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @abstractmethod
    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> Any:
        """Membership for a point ``(n,)`` (bool) or a batch ``(m, n)`` (bool array)."""

    @abstractmethod
    def transform(self, amap: AffineMap) -> "ConvexBody":
        """Image of the body under an invertible affine map."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]: ...

    @property
    def has_analytic_volume(self) -> bool:
        return True

    def log_volume(self) -> float:
        raise UnsupportedOperationError(f"{self.variant} has no closed-form volume")

    def centroid(self) -> np.ndarray:
        raise UnsupportedOperationError(f"{self.variant} has no closed-form centroid")

    def uniform_covariance(self) -> np.ndarray:
        raise UnsupportedOperationError(f"{self.variant} has no closed-form covariance")

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        """Exact uniform draws ``(size, n)``."""
        raise UnsupportedOperationError(f"{self.variant} has no direct uniform sampler")

    def _batch(self, x: np.ndarray) -> Tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.dim:
            raise InvalidParameterError(f"point dimension {x.shape[1]} != body dimension {self.dim}")
        return x, single

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


def _ball_directions(generator: np.random.Generator, size: int, n: int) -> np.ndarray:
    """Uniform points in the unit ball (Gaussian direction, U^{1/n} radius)."""
    g = generator.standard_normal((size, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = generator.random(size) ** (1.0 / n)
    return g * r[:, None]


@dataclass(frozen=True, eq=False, repr=False)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float
    variant: ClassVar[str] = "ball"

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", _frozen(self.center))
        if not self.radius > 0:
            raise InvalidParameterError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x, single = self._batch(x)
        inside = np.linalg.norm(x - self.center, axis=1) <= self.radius * (1.0 + tol)
        return bool(inside[0]) if single else inside

    def log_volume(self) -> float:
        return log_unit_ball_volume(self.dim) + self.dim * log(self.radius)

    def centroid(self) -> np.ndarray:
        return np.array(self.center)

    def uniform_covariance(self) -> np.ndarray:
        return self.radius ** 2 / (self.dim + 2) * np.eye(self.dim)

    def sample(self, generator, size):
        return self.center + self.radius * _ball_directions(generator, size, self.dim)

    def transform(self, amap: AffineMap) -> ConvexBody:
        return Ellipsoid(amap.linear * self.radius, amap.apply(self.center))

    def to_dict(self):
        return {"variant": self.variant, "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False, repr=False)
class Box(ConvexBody):
    lower: np.ndarray
    upper: np.ndarray
    variant: ClassVar[str] = "box"

    def __post_init__(self) -> None:
        lower, upper = _frozen(self.lower), _frozen(self.upper)
        if lower.shape != upper.shape:
            raise InvalidParameterError("box bounds have different shapes")
        if not np.all(upper > lower):
            raise InvalidParameterError("box needs upper > lower in every coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, n: int, side: float = 1.0) -> "Box":
        return cls(np.zeros(n), np.full(n, side))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x, single = self._batch(x)
        pad = tol * self.widths
        inside = np.all((x >= self.lower - pad) & (x <= self.upper + pad), axis=1)
        return bool(inside[0]) if single else inside

    def log_volume(self) -> float:
        return float(np.sum(np.log(self.widths)))

    def centroid(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def uniform_covariance(self) -> np.ndarray:
        return np.diag(self.widths ** 2 / 12.0)

    def sample(self, generator, size):
        return self.lower + self.widths * generator.random((size, self.dim))

    def to_hpolytope(self) -> "HPolytope":
        eye = np.eye(self.dim)
        return HPolytope(np.vstack([eye, -eye]), np.concatenate([self.upper, -self.lower]))

    def transform(self, amap: AffineMap) -> ConvexBody:
        if amap.is_diagonal():
            a, b = amap.apply(self.lower), amap.apply(self.upper)
            return Box(np.minimum(a, b), np.maximum(a, b))
        return self.to_hpolytope().transform(amap)

    def to_dict(self):
        return {"variant": self.variant, "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class Simplex(ConvexBody):
    vertices: np.ndarray  # (n + 1, n)
    variant: ClassVar[str] = "simplex"

    def __post_init__(self) -> None:
        vertices = _frozen(self.vertices, ndmin=2)
        n = vertices.shape[1]
        if vertices.shape[0] != n + 1:
            raise InvalidParameterError(f"a simplex in R^{n} needs {n + 1} vertices")
        edges = vertices[1:] - vertices[0]
        if abs(np.linalg.det(edges)) <= 1e-14 * max(1.0, float(np.abs(edges).max()) ** n):
            raise InvalidParameterError("simplex vertices are affinely dependent")
        object.__setattr__(self, "vertices", vertices)

    @classmethod
    def standard(cls, n: int) -> "Simplex":
        return cls(np.vstack([np.zeros(n), np.eye(n)]))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def _edges_inv(self) -> np.ndarray:
        return np.linalg.inv(self.vertices[1:] - self.vertices[0])

    def barycentric(self, x: np.ndarray) -> np.ndarray:
        x, _ = self._batch(x)
        lam = (x - self.vertices[0]) @ self._edges_inv
        return np.column_stack([1.0 - lam.sum(axis=1), lam])

    def contains(self, x, tol=MEMBERSHIP_TOL):
        single = np.asarray(x).ndim == 1
        inside = np.all(self.barycentric(x) >= -tol, axis=1)
        return bool(inside[0]) if single else inside

    def log_volume(self) -> float:
        _, logdet = np.linalg.slogdet(self.vertices[1:] - self.vertices[0])
        return float(logdet) - lgamma(self.dim + 1.0)

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def uniform_covariance(self) -> np.ndarray:
        n = self.dim
        centered = self.vertices - self.centroid()
        return centered.T @ centered / ((n + 1) * (n + 2))

    def sample(self, generator, size):
        weights = generator.dirichlet(np.ones(self.dim + 1), size=size)
        return weights @ self.vertices

    def transform(self, amap: AffineMap) -> ConvexBody:
        return Simplex(amap.apply(self.vertices))

    def to_dict(self):
        return {"variant": self.variant, "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class Ellipsoid(ConvexBody):
    """``center + shape @ B`` with B the closed unit ball."""

    shape: np.ndarray
    center: np.ndarray
    variant: ClassVar[str] = "ellipsoid"

    def __post_init__(self) -> None:
        shape = _frozen(self.shape, ndmin=2)
        center = _frozen(self.center)
        if shape.shape != (center.shape[0], center.shape[0]):
            raise InvalidParameterError("ellipsoid shape matrix must be n x n")
        sign, _ = np.linalg.slogdet(shape)
        if sign == 0:
            raise InvalidParameterError("ellipsoid shape matrix is singular")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        return self.shape @ self.shape.T

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x, single = self._batch(x)
        u = np.linalg.solve(self.shape, (x - self.center).T).T
        inside = np.linalg.norm(u, axis=1) <= 1.0 + tol
        return bool(inside[0]) if single else inside

    def log_volume(self) -> float:
        _, logdet = np.linalg.slogdet(self.shape)
        return log_unit_ball_volume(self.dim) + float(logdet)

    def centroid(self) -> np.ndarray:
        return np.array(self.center)

    def uniform_covariance(self) -> np.ndarray:
        return self.gram / (self.dim + 2)

    def sample(self, generator, size):
        return self.center + _ball_directions(generator, size, self.dim) @ self.shape.T

    def transform(self, amap: AffineMap) -> ConvexBody:
        return Ellipsoid(amap.linear @ self.shape, amap.apply(self.center))

    def to_dict(self):
        return {"variant": self.variant, "shape": self.shape.tolist(), "center": self.center.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class HPolytope(ConvexBody):
    """``{x : A x <= b}``; must be bounded with nonempty interior."""

    A: np.ndarray
    b: np.ndarray
    variant: ClassVar[str] = "hpolytope"

    def __post_init__(self) -> None:
        A = _frozen(self.A, ndmin=2)
        b = _frozen(self.b)
        if A.shape[0] != b.shape[0]:
            raise InvalidParameterError("H-polytope needs one right-hand side per row")
        if A.shape[0] <= A.shape[1]:
            raise InvalidParameterError("a bounded H-polytope in R^n needs at least n + 1 rows")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def has_analytic_volume(self) -> bool:
        return False

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x, single = self._batch(x)
        scale = np.maximum(np.abs(self.b), 1.0)
        inside = np.all(x @ self.A.T <= self.b + tol * scale, axis=1)
        return bool(inside[0]) if single else inside

    def transform(self, amap: AffineMap) -> ConvexBody:
        inv = np.linalg.inv(amap.linear)
        A = self.A @ inv
        return HPolytope(A, self.b + A @ amap.shift)

    def to_dict(self):
        return {"variant": self.variant, "A": self.A.tolist(), "b": self.b.tolist()}
