"""Reproducible randomness for sketch operators.

Every random operator is keyed by a ``(seed, stream)`` pair. Dense random
draws (Gaussian matrices, sampled rows, Rademacher diagonals) come from a
Philox generator seeded by that pair; hash and sign functions used by count
sketches are stateless splitmix64 mixes of ``(seed, stream, index)`` so they
never need to be materialized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def mix64(x):
    """splitmix64 finalizer applied elementwise to a uint64 array."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x ^ (x >> np.uint64(30))
        x = x * _M1
        x = x ^ (x >> np.uint64(27))
        x = x * _M2
        x = x ^ (x >> np.uint64(31))
    return x


@dataclass(frozen=True)
class SketchSeed:
    """Key of one random operator; equal keys give bit-identical operators."""

    seed: int
    stream: int = 0

    def child(self, stream: int) -> "SketchSeed":
        """Derive an independent key for a sub-operator."""
        key = int(mix64(np.array([(self.stream * 0x100000001B3 + stream + 1) & _MASK64]))[0])
        return SketchSeed(self.seed, key)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed & _MASK64, self.stream & _MASK64])
        return np.random.Generator(np.random.Philox(ss))

    def _key(self, salt: int) -> np.uint64:
        base = mix64(np.array([self.seed & _MASK64], dtype=np.uint64))[0]
        with np.errstate(over="ignore"):
            base = mix64(np.array([base ^ np.uint64(self.stream & _MASK64)]))[0]
            base = mix64(np.array([base + np.uint64(salt) * _GOLDEN]))[0]
        return base

    def hash_multi(self, idx, salt: int = 0):
        """Hash rows of an integer index array (n, c) (or a 1-D array) to uint64."""
        idx = np.asarray(idx, dtype=np.int64)
        if idx.ndim == 1:
            idx = idx[:, None]
        h = np.full(idx.shape[0], self._key(salt), dtype=np.uint64)
        with np.errstate(over="ignore"):
            for j in range(idx.shape[1]):
                h = mix64(h ^ (idx[:, j].astype(np.uint64) + _GOLDEN * np.uint64(j + 1)))
        return h

    def bucket_sign(self, idx, m: int):
        """Bucket in ``[0, m)`` from the low bits and sign from the top bit of one hash."""
        h = self.hash_multi(idx, salt=1)
        return (h % np.uint64(m)).astype(np.int64), 1.0 - 2.0 * (h >> np.uint64(63)).astype(np.float64)

    def buckets(self, idx, m: int):
        return self.bucket_sign(idx, m)[0]

    def signs(self, idx):
        return self.bucket_sign(idx, 2)[1]


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an int seed, a SketchSeed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SketchSeed):
        return rng.generator()
    return np.random.default_rng(rng)


def as_seed(seed) -> SketchSeed:
    """Coerce ``seed`` into a SketchSeed, drawing one from a Generator if needed."""
    if isinstance(seed, SketchSeed):
        return seed
    if isinstance(seed, np.random.Generator):
        return SketchSeed(int(seed.integers(0, 2**63 - 1)))
    if seed is None:
        return SketchSeed(int(np.random.default_rng().integers(0, 2**63 - 1)))
    return SketchSeed(int(seed))
