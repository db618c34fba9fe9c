"""Random sketch operators.

Operators are immutable objects built from a :class:`~tensorid.rng.SketchSeed`;
building the same operator twice from the same key gives bit-identical
results. Every operator has a ``to_matrix`` method that materializes it, used
only by tests as an independent oracle.

Normalizations make ``E ||S x||^2 = ||x||^2`` for every operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sps

from .exceptions import InvalidArgumentError
from .rng import SketchSeed, as_seed
from .tensors import SparseTensor


def next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def fwht(X: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along axis 0 (length a power of 2)."""
    X = np.array(X, dtype=float)
    n = X.shape[0]
    if n & (n - 1):
        raise InvalidArgumentError(f"transform length {n} is not a power of two")
    tail = X.shape[1:]
    h = 1
    while h < n:
        Y = X.reshape((n // (2 * h), 2, h) + tail)
        a = Y[:, 0]
        b = Y[:, 1]
        X = np.stack((a + b, a - b), axis=1).reshape((n,) + tail)
        h *= 2
    return X


def _parity(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> np.uint64(shift)
    return (x & np.uint64(1)).astype(np.int8)


def hadamard_entries(rows, cols) -> np.ndarray:
    """Entries ``(-1)^popcount(r & c)`` of the Sylvester Hadamard matrix."""
    r = np.asarray(rows, dtype=np.int64).astype(np.uint64)
    c = np.asarray(cols, dtype=np.int64).astype(np.uint64)
    return 1.0 - 2.0 * _parity(r & c)


# --------------------------------------------------------------------------- count sketch


@dataclass(frozen=True)
class CountSketch:
    """Hashing sketch from ``prod(input_shape)`` to ``m`` dimensions.

    The input index may be a multi-index over ``input_shape``; bucket and sign
    are hashes of the whole multi-index. With ``injective=True`` the bucket is
    the row-major linear index (requires ``m >= prod(input_shape)``) and only
    the signs are random, which makes the operator a signed permutation.
    """

    m: int
    input_shape: tuple
    seed: SketchSeed
    injective: bool = False

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.input_shape))
        object.__setattr__(self, "input_shape", shape)
        object.__setattr__(self, "seed", as_seed(self.seed))
        if self.m < 1:
            raise InvalidArgumentError("sketch dimension must be positive")
        if self.injective and self.m < math.prod(shape):
            raise InvalidArgumentError("injective count sketch needs m >= input dimension")

    @property
    def input_dim(self) -> int:
        return math.prod(self.input_shape)

    def bucket_sign(self, idx):
        """Buckets and signs of the multi-indices in the rows of ``idx``, hashed once."""
        idx = np.asarray(idx, dtype=np.int64).reshape(-1, len(self.input_shape))
        if self.input_dim < 2**63:
            # hash the linear index: one mixing pass instead of one per mode
            lin = np.ravel_multi_index(tuple(idx.T), self.input_shape) if idx.shape[1] > 1 else idx[:, 0]
            b, s = self.seed.bucket_sign(lin, self.m)
            return (lin.astype(np.int64) if self.injective else b), s
        if self.injective:
            raise InvalidArgumentError("injective count sketch input too large")
        return self.seed.bucket_sign(idx, self.m)

    def buckets(self, idx) -> np.ndarray:
        return self.bucket_sign(idx)[0]

    def signs(self, idx) -> np.ndarray:
        return self.bucket_sign(idx)[1]

    def _row_multi(self, rows):
        return np.stack(np.unravel_index(np.asarray(rows, dtype=np.int64), self.input_shape), axis=1)

    def sparse_matrix(self) -> sps.csr_matrix:
        rows = np.arange(self.input_dim)
        mi = self._row_multi(rows)
        b, sg = self.bucket_sign(mi)
        return sps.csr_matrix((sg, (b, rows)),
                              shape=(self.m, self.input_dim))

    def to_matrix(self) -> np.ndarray:
        return self.sparse_matrix().toarray()

    def apply(self, A) -> np.ndarray:
        return count_sketch_apply_matrix(self, A)


def count_sketch_apply_matrix(S: CountSketch, A) -> np.ndarray:
    """``S @ A`` in time proportional to the nonzeros of ``A``."""
    if sps.issparse(A):
        A = sps.coo_matrix(A)
        if A.shape[0] != S.input_dim:
            raise InvalidArgumentError(f"matrix has {A.shape[0]} rows, sketch expects {S.input_dim}")
        mi = S._row_multi(A.row)
        b, sg = S.bucket_sign(mi)
        out = sps.coo_matrix((A.data * sg, (b, A.col)), shape=(S.m, A.shape[1]))
        return out.toarray()
    A = np.asarray(A, dtype=float)
    vec = A.ndim == 1
    A2 = A[:, None] if vec else A
    if A2.shape[0] != S.input_dim:
        raise InvalidArgumentError(f"matrix has {A2.shape[0]} rows, sketch expects {S.input_dim}")
    mi = S._row_multi(np.arange(A2.shape[0]))
    out = np.zeros((S.m, A2.shape[1]))
    b, sg = S.bucket_sign(mi)
    np.add.at(out, b, A2 * sg[:, None])
    return out[:, 0] if vec else out


def count_sketch_apply_modes(T: SparseTensor, modes: Sequence[int], m: int | None, seed,
                             injective: bool = False) -> SparseTensor:
    """Merge ``modes`` of a sparse tensor into one count-sketched mode of extent ``m``.

    The sketched mode takes the position of the smallest listed mode; the
    other modes keep their relative order. ``m=None`` means an injective
    sketch of full dimension. One pass over the nonzeros.
    """
    modes = sorted(int(j) for j in modes)
    if not modes or len(set(modes)) != len(modes) or modes[0] < 0 or modes[-1] >= T.ndim:
        raise InvalidArgumentError(f"invalid modes {modes} for order {T.ndim}")
    in_shape = tuple(T.shape[j] for j in modes)
    if m is None:
        m, injective = math.prod(in_shape), True
    S = CountSketch(m, in_shape, seed, injective)
    sub = T.coords[:, modes]
    b, sg = S.bucket_sign(sub)
    vals = T.values * sg
    keep = [j for j in range(T.ndim) if j not in modes]
    pos = sum(1 for j in keep if j < modes[0])
    new_coords = np.insert(T.coords[:, keep], pos, b, axis=1)
    new_shape = [T.shape[j] for j in keep]
    new_shape.insert(pos, m)
    return SparseTensor(tuple(new_shape), new_coords, vals)


# --------------------------------------------------------------------------- SRHT


@dataclass(frozen=True)
class SRHT:
    """Subsampled randomized Hadamard transform ``sqrt(pad/m) P H D`` (H orthonormal).

    Rows are sampled without replacement, so ``m = pad`` is an orthogonal map
    on the zero-padded space.
    """

    m: int
    input_dim: int
    seed: SketchSeed
    pad: int = field(init=False)
    signs: np.ndarray = field(init=False, repr=False)
    rows: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "seed", as_seed(self.seed))
        pad = next_pow2(self.input_dim)
        if not 1 <= self.m <= pad:
            raise InvalidArgumentError(f"SRHT dimension {self.m} must lie in [1, {pad}]")
        g = self.seed.generator()
        object.__setattr__(self, "pad", pad)
        object.__setattr__(self, "signs", g.choice([-1.0, 1.0], size=self.input_dim))
        object.__setattr__(self, "rows", g.choice(pad, size=self.m, replace=False))

    @property
    def scale(self) -> float:
        return math.sqrt(self.pad / self.m) / math.sqrt(self.pad)

    def apply(self, X) -> np.ndarray:
        return srht_apply(self, X)

    def to_matrix(self) -> np.ndarray:
        H = scipy.linalg.hadamard(self.pad)[self.rows][:, : self.input_dim]
        return self.scale * H * self.signs


def srht_apply(S: SRHT, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    vec = X.ndim == 1
    X2 = X[:, None] if vec else X
    if X2.shape[0] != S.input_dim:
        raise InvalidArgumentError(f"matrix has {X2.shape[0]} rows, SRHT expects {S.input_dim}")
    Y = np.zeros((S.pad, X2.shape[1]))
    Y[: S.input_dim] = X2 * S.signs[:, None]
    out = S.scale * fwht(Y)[S.rows]
    return out[:, 0] if vec else out


# --------------------------------------------------------------------------- Kronecker FJLT


@dataclass(frozen=True)
class KFJLT:
    """Kronecker fast JL transform on the space ``R^{n_1} x ... x R^{n_c}``.

    Each mode gets its own Rademacher diagonal and orthonormal Hadamard
    transform; ``m`` rows of the Kronecker product are sampled uniformly with
    replacement and scaled by ``sqrt(prod(pad) / m)``. If ``m`` reaches the
    full padded dimension all rows are used once (an orthogonal map).
    """

    dims: tuple
    m: int
    seed: SketchSeed
    pads: tuple = field(init=False)
    signs: tuple = field(init=False, repr=False)
    rows: np.ndarray = field(init=False, repr=False)
    scale: float = field(init=False)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims:
            raise InvalidArgumentError("KFJLT needs at least one mode")
        if self.m < 1:
            raise InvalidArgumentError("sketch dimension must be positive")
        seed = as_seed(self.seed)
        pads = tuple(next_pow2(n) for n in dims)
        total = math.prod(pads)
        signs = tuple(seed.child(j).generator().choice([-1.0, 1.0], size=n) for j, n in enumerate(dims))
        if self.m >= total:
            rows = np.stack([g.ravel() for g in np.indices(pads)], axis=1)
            scale = 1.0
        else:
            g = seed.child(len(dims)).generator()
            rows = np.stack([g.integers(0, p, size=self.m) for p in pads], axis=1)
            scale = math.sqrt(total / self.m)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "pads", pads)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "scale", scale)

    @property
    def out_dim(self) -> int:
        return self.rows.shape[0]

    def transform_factor(self, j: int, F: np.ndarray) -> np.ndarray:
        """Orthonormal Hadamard transform of the sign-flipped, padded factor ``F``."""
        F = np.asarray(F, dtype=float)
        Y = np.zeros((self.pads[j],) + F.shape[1:])
        Y[: self.dims[j]] = F * self.signs[j].reshape((-1,) + (1,) * (F.ndim - 1))
        return fwht(Y) / math.sqrt(self.pads[j])

    def sampled_factor_rows(self, factors) -> list:
        """Per mode, the transformed factor rows at the sampled multi-indices."""
        if len(factors) != len(self.dims):
            raise InvalidArgumentError("need one factor per KFJLT mode")
        return [self.transform_factor(j, F)[self.rows[:, j]] for j, F in enumerate(factors)]

    def apply_cp(self, factors, weights=None) -> np.ndarray:
        rows = self.sampled_factor_rows(factors)
        out = np.full(rows[0].shape, self.scale)
        for R in rows:
            out = out * R
        if weights is not None:
            out = out * np.asarray(weights, dtype=float)
        return out

    def entries(self, coords) -> np.ndarray:
        """Operator entries at columns ``coords`` (nnz x c): an (m x nnz) array."""
        coords = np.asarray(coords, dtype=np.int64)
        out = np.full((self.out_dim, coords.shape[0]), self.scale)
        for j in range(len(self.dims)):
            out *= hadamard_entries(self.rows[:, j][:, None], coords[:, j][None, :])
            out *= (self.signs[j][coords[:, j]] / math.sqrt(self.pads[j]))[None, :]
        return out

    def apply_coo(self, coords, values, chunk: int = 4096) -> np.ndarray:
        """Sketch of a sparse tensor given by coordinates and values."""
        values = np.asarray(values, dtype=float)
        out = np.zeros(self.out_dim)
        for s in range(0, values.shape[0], chunk):
            out += self.entries(coords[s:s + chunk]) @ values[s:s + chunk]
        return out

    def to_matrix(self) -> np.ndarray:
        grids = np.indices(self.dims).reshape(len(self.dims), -1).T
        return self.entries(grids)


def kfjlt_apply_cp(factors, weights, m: int, seed) -> np.ndarray:
    """KFJLT of the columns ``w_k * kron_j H_j[:, k]``; returns ``m x p``."""
    if not factors:
        raise InvalidArgumentError("empty factor list")
    S = KFJLT(tuple(np.shape(F)[0] for F in factors), m, seed)
    return S.apply_cp(factors, weights)


# --------------------------------------------------------------------------- tensor sketch


@dataclass(frozen=True)
class TensorSketch:
    """Count sketch on a Kronecker space via convolution of per-mode count sketches."""

    dims: tuple
    m: int
    seed: SketchSeed

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims:
            raise InvalidArgumentError("tensor sketch needs at least one mode")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "seed", as_seed(self.seed))

    @property
    def parts(self) -> list:
        return [CountSketch(self.m, (n,), self.seed.child(j)) for j, n in enumerate(self.dims)]

    def apply_cp(self, factors, weights=None) -> np.ndarray:
        if len(factors) != len(self.dims):
            raise InvalidArgumentError("need one factor per tensor-sketch mode")
        parts = self.parts
        if len(parts) == 1:
            out = parts[0].apply(factors[0])
        else:
            spec = None
            for S, F in zip(parts, factors):
                f = np.fft.rfft(S.apply(F), axis=0)
                spec = f if spec is None else spec * f
            out = np.fft.irfft(spec, n=self.m, axis=0)
        if weights is not None:
            out = out * np.asarray(weights, dtype=float)
        return out

    def to_matrix(self) -> np.ndarray:
        grids = np.indices(self.dims).reshape(len(self.dims), -1).T
        h = np.zeros(grids.shape[0], dtype=np.int64)
        s = np.ones(grids.shape[0])
        for j, S in enumerate(self.parts):
            h = h + S.buckets(grids[:, j])
            s = s * S.signs(grids[:, j])
        M = np.zeros((self.m, grids.shape[0]))
        M[h % self.m, np.arange(grids.shape[0])] = s
        return M


def tensor_sketch_apply_cp(factors, weights, m: int, seed) -> np.ndarray:
    if not factors:
        raise InvalidArgumentError("empty factor list")
    return TensorSketch(tuple(np.shape(F)[0] for F in factors), m, seed).apply_cp(factors, weights)


# --------------------------------------------------------------------------- Gaussian


@dataclass(frozen=True)
class GaussianSketch:
    m: int
    input_dim: int
    seed: SketchSeed

    def to_matrix(self) -> np.ndarray:
        g = as_seed(self.seed).generator()
        return g.standard_normal((self.m, self.input_dim)) / math.sqrt(self.m)

    def apply(self, X) -> np.ndarray:
        return self.to_matrix() @ np.asarray(X, dtype=float)


def make_sketch(kind: str, m: int, input_dim: int, seed):
    """Unstructured sketch for a dense matrix with ``input_dim`` rows."""
    kind = kind.lower()
    if kind == "gaussian":
        return GaussianSketch(m, input_dim, as_seed(seed))
    if kind == "srht":
        return SRHT(min(m, next_pow2(input_dim)), input_dim, seed)
    if kind in ("countsketch", "count"):
        return CountSketch(m, (input_dim,), seed)
    raise InvalidArgumentError(f"unknown sketch kind {kind!r}")


# --------------------------------------------------------------------------- sparse network


@dataclass(frozen=True)
class NetworkOperators:
    """The three operators of the sparse CoreID sketch network.

    ``kron`` acts on the already-processed (reduced) modes, ``count`` on the
    unprocessed non-target modes and ``outer`` on the ``m2 * m3`` combined
    rows; each may be ``None`` when the corresponding stage is omitted.
    """

    processed_modes: tuple
    rest_modes: tuple
    target: int
    kron: KFJLT | None
    count: CountSketch | None
    outer: SRHT | CountSketch | None

    @property
    def inner_rows(self) -> int:
        a = self.kron.out_dim if self.kron is not None else 1
        b = self.count.m if self.count is not None else 1
        return a * b


def network_operators(shape, processed, target: int, dims, seed, outer: str = "srht") -> NetworkOperators:
    """Build the operators used by :func:`sparse_sketch_network`.

    ``processed`` is a sequence of ``(mode, J, L)`` triples in processing
    order; ``dims = (m1, m2, m3)`` where ``None`` in m2/m3 means full
    dimension (orthogonal KFJLT / injective count sketch) and ``m1=None``
    disables the outer sketch.
    """
    seed = as_seed(seed)
    d = len(shape)
    m1, m2, m3 = dims
    pmodes = tuple(int(p[0]) for p in processed)
    if target in pmodes or len(set(pmodes)) != len(pmodes) or not 0 <= target < d:
        raise InvalidArgumentError("target mode must be unprocessed and modes distinct")
    rest = tuple(j for j in range(d) if j != target and j not in pmodes)
    kron = None
    if pmodes:
        kdims = tuple(len(p[1]) for p in processed)
        total = math.prod(next_pow2(k) for k in kdims)
        kron = KFJLT(kdims, total if m2 is None else m2, seed.child(2))
    count = None
    if rest:
        rshape = tuple(shape[j] for j in rest)
        if m3 is None:
            count = CountSketch(math.prod(rshape), rshape, seed.child(3), injective=True)
        else:
            count = CountSketch(m3, rshape, seed.child(3))
    a = kron.out_dim if kron is not None else 1
    b = count.m if count is not None else 1
    outer_op = None
    if m1 is not None and a * b > m1:
        if outer == "srht":
            outer_op = SRHT(m1, a * b, seed.child(1))
        elif outer in ("countsketch", "count"):
            outer_op = CountSketch(m1, (a * b,), seed.child(1))
        else:
            raise InvalidArgumentError(f"unknown outer sketch {outer!r}")
    return NetworkOperators(pmodes, rest, int(target), kron, count, outer_op)


def sparse_sketch_network(T: SparseTensor, processed, target: int, dims=(400, 400, 2000),
                          seed=0, outer: str = "srht", ops: NetworkOperators | None = None) -> np.ndarray:
    """Sketch of the adaptive-sequential flattening for mode ``target``.

    Computes ``S1 (S2 kron S3)`` applied to the column flattening at ``target``
    of ``T[J_1, ..., J_s, ...]`` contracted with ``L_p^T`` on each processed
    mode ``p``. Rows of the inner product are ordered (KFJLT row, count-sketch
    bucket). Cost is ``O(m2 * nnz)`` plus the outer sketch.
    """
    if ops is None:
        ops = network_operators(T.shape, processed, target, dims, seed, outer)
    for mode, J, L in processed:
        L = np.asarray(L)
        if L.shape != (len(J), len(J)):
            raise InvalidArgumentError(f"L factor for mode {mode} must be {len(J)}x{len(J)}")
        if len(J) and (min(J) < 0 or max(J) >= T.shape[mode]):
            raise InvalidArgumentError(f"selected index out of range in mode {mode}")
    n_t = T.shape[target]
    coords = T.coords
    vals = T.values
    # keep nonzeros whose processed-mode coordinates were selected
    pos = []
    keep = np.ones(T.nnz, dtype=bool)
    for mode, J, _ in processed:
        lookup = np.full(T.shape[mode], -1, dtype=np.int64)
        lookup[np.asarray(J, dtype=np.int64)] = np.arange(len(J))
        p = lookup[coords[:, mode]]
        keep &= p >= 0
        pos.append(p)
    coords = coords[keep]
    vals = vals[keep]
    pos = [p[keep] for p in pos]

    if ops.count is not None:
        sub = coords[:, list(ops.rest_modes)]
        bucket, sg = ops.count.bucket_sign(sub)
        vals = vals * sg
        m3 = ops.count.m
    else:
        bucket = np.zeros(coords.shape[0], dtype=np.int64)
        m3 = 1
    col = bucket * n_t + coords[:, target]
    M = sps.csr_matrix((vals, (np.arange(vals.shape[0]), col)), shape=(vals.shape[0], m3 * n_t))

    if ops.kron is not None:
        S2 = ops.kron
        W = np.full((S2.out_dim, vals.shape[0]), S2.scale)
        for j, (_, J, L) in enumerate(processed):
            Y = S2.transform_factor(j, np.asarray(L, dtype=float).T)  # pad x k
            W *= Y[S2.rows[:, j]][:, pos[j]]
        inner = np.asarray((M.T @ W.T).T)
    else:
        inner = np.asarray(M.sum(axis=0))
    B = inner.reshape(-1, n_t)
    if ops.outer is not None:
        B = ops.outer.apply(B)
    return B


def network_matrix(ops: NetworkOperators, processed) -> np.ndarray:
    """Materialized ``S1 (S2 kron S3)`` for rows ordered (processed modes, rest modes)."""
    S2 = ops.kron.to_matrix() if ops.kron is not None else np.ones((1, 1))
    S3 = ops.count.to_matrix() if ops.count is not None else np.ones((1, 1))
    S = np.kron(S2, S3)
    if ops.outer is not None:
        S = ops.outer.to_matrix() @ S
    return S


# --------------------------------------------------------------------------- diagnostics


def empirical_se_distortion(S, A, tol: float | None = None) -> float:
    """Smallest ``delta`` such that ``S`` is a delta-subspace embedding of col(A).

    ``S`` is a matrix or a callable applying the sketch to a matrix.
    """
    A = np.asarray(A, dtype=float)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return 0.0
    if tol is None:
        tol = max(A.shape) * np.finfo(float).eps
    r = int(np.sum(s > tol * s[0]))
    U = U[:, :r]
    SU = S(U) if callable(S) else np.asarray(S) @ U
    sv = np.linalg.svd(SU, compute_uv=False)
    sv = np.concatenate([sv, np.zeros(max(r - sv.size, 0))])[:r]
    return float(np.max(np.abs(sv**2 - 1.0)))
