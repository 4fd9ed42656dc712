"""Uniform sampling on H-polytopes.

Interior points come from the Chebyshev-center LP (maximise the slack of the
tightest constraint); samples come from hit-and-run run as a block of
independent chains that advance together, one vectorised step at a time.
"""

from __future__ import annotations

from math import ceil
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from entropylab.core.config import get_settings
from entropylab.core.errors import InfeasibleBodyError, InvalidParameterError
from entropylab.geometry.bodies import HPolytope
from entropylab.observability.logger import get_logger

logger = get_logger(__name__)

_LP_UNBOUNDED = 3
_LP_INFEASIBLE = 2


def chebyshev_center(poly: HPolytope) -> Tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside ``poly``."""
    A, b = poly.A, poly.b
    n = poly.dim
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.column_stack([A, norms]),
        b_ub=b,
        bounds=[(None, None)] * n + [(0.0, None)],
        method="highs",
    )
    if res.status == _LP_UNBOUNDED:
        raise InvalidParameterError("H-polytope is unbounded")
    if res.status == _LP_INFEASIBLE or not res.success:
        raise InfeasibleBodyError(f"no interior point found: {res.message}")
    radius = float(res.x[-1])
    if radius <= 1e-12:
        raise InfeasibleBodyError("H-polytope has empty interior")
    return res.x[:n], radius


def bounding_box(poly: HPolytope) -> Tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box from 2n small LPs."""
    n = poly.dim
    lower, upper = np.empty(n), np.empty(n)
    for i in range(n):
        for sign, target in ((1.0, lower), (-1.0, upper)):
            c = np.zeros(n)
            c[i] = sign
            res = linprog(c, A_ub=poly.A, b_ub=poly.b, bounds=[(None, None)] * n, method="highs")
            if res.status == _LP_UNBOUNDED:
                raise InvalidParameterError("H-polytope is unbounded")
            if not res.success:
                raise InfeasibleBodyError(f"bounding box LP failed: {res.message}")
            target[i] = res.x[i]
    return lower, upper


def hit_and_run(
    poly: HPolytope,
    generator: np.random.Generator,
    size: int,
    start: Optional[np.ndarray] = None,
    burn_in: Optional[int] = None,
    thinning: Optional[int] = None,
    chains: Optional[int] = None,
) -> np.ndarray:
    """Approximately uniform draws ``(size, n)`` from ``poly``.

    Each chain starts at ``start`` (the Chebyshev center by default), runs
    ``burn_in`` steps (default 100·n) and then keeps every ``thinning``-th state.
    """
    cfg = get_settings()
    n = poly.dim
    burn_in = cfg.hit_and_run_burn_in_factor * n if burn_in is None else burn_in
    thinning = thinning or cfg.hit_and_run_thinning
    chains = max(1, min(chains or cfg.hit_and_run_chains, size))
    if start is None:
        start, _ = chebyshev_center(poly)

    A, b = poly.A, poly.b
    state = np.tile(np.asarray(start, dtype=float), (chains, 1))
    per_chain = ceil(size / chains)
    kept = []
    for step in range(1, burn_in + per_chain * thinning + 1):
        direction = generator.standard_normal((chains, n))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        slack = np.maximum(b - state @ A.T, 0.0)
        rate = direction @ A.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack / rate
        t_hi = np.min(np.where(rate > 0, ratio, np.inf), axis=1)
        t_lo = np.max(np.where(rate < 0, ratio, -np.inf), axis=1)
        t = t_lo + (t_hi - t_lo) * generator.random(chains)
        state = state + t[:, None] * direction
        if step > burn_in and (step - burn_in) % thinning == 0:
            kept.append(state.copy())

    samples = np.stack(kept, axis=1).reshape(-1, n)
    return samples[:size]


def hpolytope_volume_mc(
    poly: HPolytope, generator: np.random.Generator, m: int
) -> Tuple[float, float]:
    """Hit-or-miss volume in the bounding box: (value, standard error)."""
    lower, upper = bounding_box(poly)
    box_volume = float(np.prod(upper - lower))
    points = lower + (upper - lower) * generator.random((m, poly.dim))
    frac = float(np.mean(poly.contains(points)))
    se = box_volume * float(np.sqrt(frac * (1.0 - frac) / m))
    logger.debug("hpolytope_volume", dim=poly.dim, m=m, fraction=frac)
    return box_volume * frac, se
