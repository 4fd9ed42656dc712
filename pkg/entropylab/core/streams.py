"""Counter-based random streams and chunked Monte Carlo helpers.

A :class:`RandomStream` never hands out a stateful generator that is shared
between consumers. Every chunk of every consumer gets its own Philox generator
keyed by ``(seed, key path, chunk index)``, so the draws a computation sees
depend only on the seed, the key path and the chunk size, never on how many
workers evaluated the chunks or in which order they finished.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from entropylab.core.config import get_settings

Key = Union[int, str]


def _key_int(key: Key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"stream keys must be non-negative, got {key}")
    return int(key)


class RandomStream:
    """A node in a tree of independent, reproducible random streams."""

    def __init__(self, seed: int, key: Sequence[Key] = ()):
        self.seed = int(seed)
        self.key: Tuple[int, ...] = tuple(_key_int(k) for k in key)

    def child(self, *key: Key) -> "RandomStream":
        """Derive an independent sub-stream."""
        return RandomStream(self.seed, self.key + tuple(_key_int(k) for k in key))

    def generator(self, chunk: int = 0) -> np.random.Generator:
        """Generator for one chunk of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=self.key + (int(chunk),))
        return np.random.Generator(np.random.Philox(seq))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, key={self.key})"


def as_stream(rng: Union["RandomStream", int, None]) -> RandomStream:
    """Accept a stream, a bare seed, or None (the configured seed)."""
    if isinstance(rng, RandomStream):
        return rng
    if rng is None:
        return RandomStream(get_settings().seed)
    return RandomStream(int(rng))


def chunk_sizes(m: int, chunk_size: int) -> List[int]:
    """Split ``m`` draws into fixed-size chunks (last one possibly shorter)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    full, rest = divmod(m, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def map_chunks(
    fn: Callable[[np.random.Generator, int], np.ndarray],
    m: int,
    stream: RandomStream,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Evaluate ``fn(generator, count)`` over the chunks of ``m`` draws.

    Results are concatenated along axis 0 in chunk order whatever ``workers`` is.
    """
    size = chunk_size or get_settings().chunk_size
    counts = chunk_sizes(m, size)
    if not counts:
        return np.empty((0,))

    def _one(index: int) -> np.ndarray:
        return np.asarray(fn(stream.generator(index), counts[index]))

    if workers and workers > 1 and len(counts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_one, range(len(counts))))
    else:
        parts = [_one(i) for i in range(len(counts))]
    return np.concatenate(parts, axis=0)


def mean_and_se(values: np.ndarray) -> Tuple[float, float]:
    """Sample mean and its standard error (``std / sqrt(m)``, ddof=1)."""
    values = np.asarray(values, dtype=float)
    m = values.shape[0]
    if m == 0:
        raise ValueError("cannot average an empty sample")
    mean = float(np.mean(values))
    if m < 2:
        return mean, float("inf")
    return mean, float(np.std(values, ddof=1) / np.sqrt(m))


def binomial_se(p: float, m: int) -> float:
    """Standard error of an empirical frequency."""
    return float(np.sqrt(max(p * (1.0 - p), 0.0) / m))
