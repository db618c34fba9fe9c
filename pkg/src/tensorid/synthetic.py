"""Synthetic test tensors."""
from __future__ import annotations

import math

import numpy as np

from .exceptions import InvalidArgumentError
from .rng import as_generator
from .tensors import CPTensor, SparseTensor, TuckerTensor, tucker_reconstruct


def gen_synthetic_cp(n: int, p: int, r: int, sigma: float = 0.2, zero_row_frac: float = 0.25,
                     d: int = 4, noise: int = 0, seed=None) -> CPTensor:
    """Nearly low-rank CP tensor from a Gaussian mixture in ``R^{d n}``.

    ``p - noise`` columns are mixture samples (standard Gaussian means,
    covariance ``sigma^2 I``, weights uniform on [1, 10] then normalized),
    chopped into ``d`` factor columns of length ``n``; the other ``noise``
    columns are standard Gaussian (none by default). In every factor
    ``ceil(zero_row_frac * n)`` random rows are zeroed.
    """
    if min(n, p, r, d) < 1 or sigma < 0:
        raise InvalidArgumentError("n, p, r, d must be positive and sigma nonnegative")
    if not 0 <= zero_row_frac < 1:
        raise InvalidArgumentError("zero_row_frac must lie in [0, 1)")
    g = as_generator(seed)
    if not 0 <= noise <= p:
        raise InvalidArgumentError("noise count must lie in [0, p]")
    means = g.standard_normal((r, d * n))
    mix = g.uniform(1.0, 10.0, size=r)
    mix /= mix.sum()
    comp = g.choice(r, size=p - noise, p=mix)
    U = means[comp] + sigma * g.standard_normal((p - noise, d * n))
    U = np.vstack([U, g.standard_normal((noise, d * n))])
    factors = [U[:, i * n:(i + 1) * n].T.copy() for i in range(d)]
    z = math.ceil(zero_row_frac * n)
    for F in factors:
        F[g.choice(n, size=z, replace=False)] = 0.0
    return CPTensor(factors)


def gen_counterexample_matrix(n: int, M: float) -> np.ndarray:
    """Ones on the first row and column, zero diagonal after (0, 0), ``M`` elsewhere."""
    if n < 3 or not M > 1:
        raise InvalidArgumentError("need n >= 3 and M > 1")
    A = np.full((n, n), float(M))
    A[0, :] = 1.0
    A[:, 0] = 1.0
    idx = np.arange(1, n)
    A[idx, idx] = 0.0
    return A


def gen_low_rank_tucker(shape, ranks, seed=None) -> np.ndarray:
    """Dense tensor of exact multilinear rank ``ranks`` (Gaussian core and satellites)."""
    g = as_generator(seed)
    core = g.standard_normal(tuple(ranks))
    sats = [g.standard_normal((n, k)) for n, k in zip(shape, ranks)]
    return tucker_reconstruct(TuckerTensor(core, sats))


def gen_sparse_random(shape, fill: float, seed=None) -> SparseTensor:
    """Sparse tensor with Bernoulli(``fill``) support and Gaussian values."""
    g = as_generator(seed)
    mask = g.random(tuple(shape)) < fill
    coords = np.argwhere(mask)
    return SparseTensor(tuple(shape), coords, g.standard_normal(coords.shape[0]))


def gen_sparse_tucker(shape, ranks, density: float = 0.5, seed=None) -> SparseTensor:
    """Exact low multilinear rank tensor with sparse satellites, stored sparse."""
    g = as_generator(seed)
    core = g.standard_normal(tuple(ranks))
    sats = []
    for n, k in zip(shape, ranks):
        U = g.standard_normal((n, k)) * (g.random((n, k)) < density)
        U[g.choice(n, size=k, replace=False), np.arange(k)] = 1.0  # keep full column rank
        sats.append(U)
    return SparseTensor.from_dense(tucker_reconstruct(TuckerTensor(core, sats)))
