"""Density models: sampleable densities with optional closed-form facts."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional

import numpy as np

from entropylab.core.errors import InvalidParameterError
from entropylab.core.streams import RandomStream, map_chunks
from entropylab.geometry.bodies import ConvexBody

LogDensity = Callable[[np.ndarray], np.ndarray]
Sampler = Callable[[np.random.Generator, int], np.ndarray]

KAPPA_TOL = 1e-12


def _readonly(value: Optional[Any], ndmin: int) -> Optional[np.ndarray]:
    if value is None:
        return None
    out = np.array(value, dtype=float, ndmin=ndmin)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False, kw_only=True)
class DensityModel:
    """A probability density on R^n.

    ``log_density`` maps a batch ``(m, n)`` to natural-log densities ``(m,)``
    (``-inf`` off the support); ``sampler`` maps ``(generator, size)`` to a
    batch ``(size, n)``. The optional fields are exact facts about the density
    and are used as oracles whenever present.
    """

    name: str
    family: str
    dim: int
    sampler: Sampler
    log_density: Optional[LogDensity] = None
    analytic_entropy: Optional[float] = None
    analytic_max_density: Optional[float] = None
    mean: Optional[np.ndarray] = None
    covariance: Optional[np.ndarray] = None
    kappa: Optional[float] = None
    support: Optional[ConvexBody] = None
    mode: Optional[np.ndarray] = None
    flat: bool = False
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidParameterError(f"dimension must be positive, got {self.dim}")
        if self.kappa is not None and self.kappa > 1.0 / self.dim + KAPPA_TOL:
            raise InvalidParameterError(f"kappa={self.kappa} exceeds 1/n={1.0 / self.dim}")
        if self.analytic_max_density is not None and not self.analytic_max_density > 0:
            raise InvalidParameterError("max density must be positive")
        if self.support is not None and self.support.dim != self.dim:
            raise InvalidParameterError("support dimension does not match model dimension")
        object.__setattr__(self, "mean", _readonly(self.mean, 1))
        object.__setattr__(self, "covariance", _readonly(self.covariance, 2))
        object.__setattr__(self, "mode", _readonly(self.mode, 1))

    @property
    def has_density(self) -> bool:
        return self.log_density is not None

    @property
    def is_log_concave(self) -> bool:
        """kappa >= 0 (log-concave or better)."""
        return self.kappa is not None and self.kappa >= 0.0

    @property
    def is_gaussian(self) -> bool:
        return self.family == "gaussian"

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        out = np.asarray(self.sampler(generator, size), dtype=float)
        return out.reshape(size, self.dim)

    def draw(
        self,
        stream: RandomStream,
        m: int,
        chunk_size: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> np.ndarray:
        """``m`` draws using the per-chunk generators of ``stream``."""
        out = map_chunks(self.sample, m, stream, chunk_size=chunk_size, workers=workers)
        return out.reshape(m, self.dim)

    def log_pdf(self, x: np.ndarray) -> Any:
        """Log-density at a point ``(n,)`` (float) or a batch ``(m, n)``."""
        if self.log_density is None:
            raise InvalidParameterError(f"model {self.name!r} has no evaluable density")
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        values = np.asarray(self.log_density(np.atleast_2d(x).reshape(-1, self.dim)), dtype=float)
        return float(values[0]) if single else values

    def with_name(self, name: str) -> "DensityModel":
        return replace(self, name=name)

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "family": self.family,
            "dim": self.dim,
            "kappa": self.kappa,
            "analytic_entropy": self.analytic_entropy,
            "analytic_max_density": self.analytic_max_density,
            "params": self.params,
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, dim={self.dim}, kappa={self.kappa})"


@dataclass(frozen=True, eq=False, kw_only=True)
class ConvolutionModel(DensityModel):
    """Law of X + Y for independent X ~ left, Y ~ right.

    Sums of Gaussians and of uniform boxes carry a closed-form density;
    otherwise values come from the MC estimator in
    :mod:`entropylab.estimators.entropy`.
    """

    left: DensityModel
    right: DensityModel


@dataclass
class MaxDensity:
    """Result of :func:`entropylab.zoo.families.max_density`.

    ``value`` is an attained density value, hence a lower bound on ||f||_inf
    (exact when ``analytic``).
    """

    value: float
    log_value: float
    argmax: Optional[np.ndarray]
    converged: bool
    iterations: int
    analytic: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "argmax": None if self.argmax is None else np.asarray(self.argmax).tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
            "analytic": self.analytic,
        }
