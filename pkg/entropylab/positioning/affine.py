"""Affine maps ``x -> linear @ x + shift`` with a cached log-determinant."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from entropylab.core.errors import InvalidParameterError


@dataclass(frozen=True, eq=False)
class AffineMap:
    """Invertible affine map on R^n.

    ``log_det`` is log|det linear|, computed once with ``slogdet``. It is the
    change of differential entropy under the map: h(u(X)) = h(X) + log_det.
    """

    linear: np.ndarray
    shift: np.ndarray
    log_det: float = field(init=False)

    def __post_init__(self) -> None:
        linear = np.array(self.linear, dtype=float, ndmin=2)
        shift = np.array(self.shift, dtype=float, ndmin=1)
        if linear.shape[0] != linear.shape[1]:
            raise InvalidParameterError(f"linear part must be square, got {linear.shape}")
        if shift.shape != (linear.shape[0],):
            raise InvalidParameterError(
                f"shift has shape {shift.shape}, expected ({linear.shape[0]},)"
            )
        sign, log_det = np.linalg.slogdet(linear)
        if sign == 0 or not np.isfinite(log_det):
            raise InvalidParameterError("affine map has a singular linear part")
        linear.setflags(write=False)
        shift.setflags(write=False)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "log_det", float(log_det))

    @property
    def dim(self) -> int:
        return self.linear.shape[0]

    @property
    def abs_det(self) -> float:
        return float(np.exp(self.log_det))

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def scaling(cls, factor: float, n: int) -> "AffineMap":
        return cls(factor * np.eye(n), np.zeros(n))

    @classmethod
    def translation(cls, shift: np.ndarray) -> "AffineMap":
        shift = np.atleast_1d(np.asarray(shift, dtype=float))
        return cls(np.eye(shift.shape[0]), shift)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Map a point ``(n,)`` or a batch ``(m, n)``."""
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.shift

    def apply_inverse(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.linalg.solve(self.linear, (y - self.shift).T).T

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.shift)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self ∘ inner``: apply ``inner`` first."""
        if inner.dim != self.dim:
            raise InvalidParameterError("cannot compose maps of different dimensions")
        return AffineMap(self.linear @ inner.linear, self.linear @ inner.shift + self.shift)

    def is_identity(self, tol: float = 0.0) -> bool:
        n = self.dim
        return bool(
            np.all(np.abs(self.linear - np.eye(n)) <= tol) and np.all(np.abs(self.shift) <= tol)
        )

    def is_volume_preserving(self, tol: float = 1e-10) -> bool:
        return abs(self.log_det) <= tol

    def is_diagonal(self) -> bool:
        return bool(np.count_nonzero(self.linear - np.diag(np.diag(self.linear))) == 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "linear": self.linear.tolist(),
            "shift": self.shift.tolist(),
            "log_det": self.log_det,
        }

    def __repr__(self) -> str:
        return f"AffineMap(dim={self.dim}, log_det={self.log_det:.6g})"
