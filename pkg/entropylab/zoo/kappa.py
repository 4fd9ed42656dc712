"""Borell's kappa algebra for convolutions."""

from __future__ import annotations

from entropylab.core.errors import InvalidParameterError


def kappa_convolution(k1: float, k2: float) -> float:
    """Concavity parameter of mu * nu for a k1-concave mu and a k2-concave nu.

    Requires k1, k2 in [-1, 1] and k1 + k2 > 0; the result solves
    1/kappa = 1/k1 + 1/k2 (a log-concave factor, kappa = 0, gives 0).
    """
    for k in (k1, k2):
        if not -1.0 <= k <= 1.0:
            raise InvalidParameterError(f"kappa must lie in [-1, 1], got {k}")
    if k1 + k2 <= 0.0:
        raise InvalidParameterError(f"kappa convolution needs k1 + k2 > 0, got {k1} + {k2}")
    if k1 == 0.0 or k2 == 0.0:
        return 0.0
    return 1.0 / (1.0 / k1 + 1.0 / k2)
