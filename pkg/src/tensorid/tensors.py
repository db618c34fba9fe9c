"""Tensor containers and the basic multilinear algebra used by every algorithm.

Dense tensors are plain ``numpy.ndarray`` objects. Sparse tensors are stored in
coordinate format (:class:`SparseTensor`), CP tensors as factor matrices plus a
weight vector (:class:`CPTensor`) and Tucker tensors as a core plus satellite
matrices (:class:`TuckerTensor`).

Index conventions: all indices are 0-based. When several modes are grouped
into one matrix dimension, the grouped multi-index is linearized row-major in
the order the modes are listed (last listed mode fastest). Column modes of a
flattening are the complement of the row modes in ascending order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .exceptions import InvalidArgumentError, ResourceLimitError

MAX_DENSE_ENTRIES = 10**8


def check_size(shape, max_entries=None):
    limit = MAX_DENSE_ENTRIES if max_entries is None else max_entries
    size = 1
    for n in shape:
        size *= int(n)
    if size > limit:
        raise ResourceLimitError(
            f"dense tensor of shape {tuple(shape)} has {size} entries (cap {limit})"
        )
    return size


def _check_modes(modes, d):
    modes = [int(m) for m in modes]
    if len(set(modes)) != len(modes):
        raise InvalidArgumentError(f"duplicate modes in {modes}")
    for m in modes:
        if not 0 <= m < d:
            raise InvalidArgumentError(f"mode {m} out of range for order {d}")
    return modes


# --------------------------------------------------------------------------- dense


def flatten(T: np.ndarray, row_modes: Sequence[int]) -> np.ndarray:
    """Matricize ``T`` with ``row_modes`` (in the given order) indexing rows."""
    T = np.asarray(T)
    rows = _check_modes(row_modes, T.ndim)
    if not rows:
        raise InvalidArgumentError("row_modes must be nonempty")
    cols = [m for m in range(T.ndim) if m not in rows]
    nrows = int(np.prod([T.shape[m] for m in rows]))
    return np.transpose(T, rows + cols).reshape(nrows, -1)


def unflatten(M: np.ndarray, shape: Sequence[int], row_modes: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`flatten`."""
    shape = tuple(int(n) for n in shape)
    rows = _check_modes(row_modes, len(shape))
    cols = [m for m in range(len(shape)) if m not in rows]
    perm = rows + cols
    T = np.asarray(M).reshape([shape[m] for m in perm])
    return np.transpose(T, np.argsort(perm))


def mode_contract(T: np.ndarray, mode: int, M: np.ndarray) -> np.ndarray:
    """Mode product: replaces extent ``n_mode`` by ``M.shape[0]``."""
    T = np.asarray(T)
    M = np.asarray(M)
    _check_modes([mode], T.ndim)
    if M.ndim != 2 or M.shape[1] != T.shape[mode]:
        raise InvalidArgumentError(
            f"matrix of shape {M.shape} cannot contract mode {mode} of extent {T.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(M, T, axes=(1, mode)), 0, mode)


def khatri_rao_row(factors: Sequence[np.ndarray], idx: Sequence[int]) -> np.ndarray:
    """Row ``idx`` of the Khatri-Rao product of ``factors``."""
    if len(factors) != len(idx):
        raise InvalidArgumentError("need one index per factor")
    out = np.ones(np.asarray(factors[0]).shape[1])
    for F, i in zip(factors, idx):
        out = out * np.asarray(F)[int(i)]
    return out


def khatri_rao(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Full Khatri-Rao product, first factor varying slowest."""
    out = np.asarray(factors[0], dtype=float)
    for F in factors[1:]:
        F = np.asarray(F, dtype=float)
        out = (out[:, None, :] * F[None, :, :]).reshape(-1, F.shape[1])
    return out


# --------------------------------------------------------------------------- sparse


@dataclass(frozen=True, eq=False)
class SparseTensor:
    """Coordinate-format sparse tensor.

    Coordinates are kept lexicographically sorted with duplicates summed and
    explicit zeros dropped.
    """

    shape: tuple
    coords: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if not shape or min(shape) < 0:
            raise InvalidArgumentError(f"invalid shape {shape}")
        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, len(shape))
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if coords.shape[0] != values.shape[0]:
            raise InvalidArgumentError("coords and values disagree in length")
        if coords.size and (coords.min() < 0 or np.any(coords.max(axis=0) >= shape)):
            raise InvalidArgumentError("coordinate outside tensor shape")
        coords, values = _canonical(coords, values)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_dense(cls, T: np.ndarray) -> "SparseTensor":
        T = np.asarray(T, dtype=float)
        coords = np.argwhere(T != 0)
        return cls(T.shape, coords, T[tuple(coords.T)])

    @classmethod
    def empty(cls, shape) -> "SparseTensor":
        return cls(shape, np.zeros((0, len(shape)), dtype=np.int64), np.zeros(0))

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def to_dense(self, max_entries=None) -> np.ndarray:
        check_size(self.shape, max_entries)
        out = np.zeros(self.shape)
        if self.nnz:
            np.add.at(out, tuple(self.coords.T), self.values)
        return out

    def permute(self, perm) -> "SparseTensor":
        perm = _check_modes(perm, self.ndim)
        return SparseTensor(tuple(self.shape[p] for p in perm), self.coords[:, perm], self.values)

    def subtensor(self, index_sets) -> "SparseTensor":
        """Restrict mode ``i`` to the ordered indices ``index_sets[i]``, re-indexed."""
        keep = np.ones(self.nnz, dtype=bool)
        new = np.empty_like(self.coords)
        for i, J in enumerate(index_sets):
            J = np.asarray(J, dtype=np.int64)
            if J.size and (J.min() < 0 or J.max() >= self.shape[i]):
                raise InvalidArgumentError(f"index out of range in mode {i}")
            lookup = np.full(self.shape[i], -1, dtype=np.int64)
            lookup[J] = np.arange(J.size)
            pos = lookup[self.coords[:, i]]
            keep &= pos >= 0
            new[:, i] = pos
        shape = tuple(len(J) for J in index_sets)
        return SparseTensor(shape, new[keep], self.values[keep])


def _canonical(coords, values):
    if coords.shape[0] == 0:
        return coords, values
    order = np.lexsort(coords.T[::-1])
    coords = coords[order]
    values = values[order]
    if coords.shape[0] > 1:
        new_group = np.empty(coords.shape[0], dtype=bool)
        new_group[0] = True
        np.any(coords[1:] != coords[:-1], axis=1, out=new_group[1:])
        if not new_group.all():
            starts = np.flatnonzero(new_group)
            values = np.add.reduceat(values, starts)
            coords = coords[starts]
    nz = values != 0
    if not nz.all():
        coords, values = coords[nz], values[nz]
    return np.ascontiguousarray(coords), values


def sparse_slice(T: SparseTensor, mode: int, index: int) -> SparseTensor:
    """Fix ``mode`` at ``index``; the result has order ``d - 1``."""
    _check_modes([mode], T.ndim)
    if T.ndim < 2:
        raise InvalidArgumentError("cannot slice an order-1 tensor")
    if not 0 <= index < T.shape[mode]:
        raise InvalidArgumentError(f"index {index} out of range for mode {mode}")
    sel = T.coords[:, mode] == index
    keep = [m for m in range(T.ndim) if m != mode]
    return SparseTensor(tuple(T.shape[m] for m in keep), T.coords[sel][:, keep], T.values[sel])


# --------------------------------------------------------------------------- CP


@dataclass(frozen=True, eq=False)
class CPTensor:
    """Sum of ``p`` weighted rank-one terms, ``sum_k w_k outer(H_1[:,k], ..., H_d[:,k])``."""

    factors: tuple
    weights: np.ndarray = None

    def __post_init__(self):
        factors = tuple(np.atleast_2d(np.asarray(F, dtype=float)) for F in self.factors)
        if not factors:
            raise InvalidArgumentError("CP tensor needs at least one factor")
        p = factors[0].shape[1]
        if p < 1 or any(F.shape[1] != p for F in factors):
            raise InvalidArgumentError("CP factors must share a positive column count")
        w = np.ones(p) if self.weights is None else np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != p:
            raise InvalidArgumentError("weight vector length must equal CP rank")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "weights", w)

    @property
    def shape(self) -> tuple:
        return tuple(F.shape[0] for F in self.factors)

    @property
    def ndim(self) -> int:
        return len(self.factors)

    @property
    def rank(self) -> int:
        return self.factors[0].shape[1]

    def to_dense(self, max_entries=None) -> np.ndarray:
        return cp_materialize(self, max_entries)

    def gram(self) -> np.ndarray:
        """Hadamard product of factor Grams, the p x p inner-product matrix of terms."""
        G = np.ones((self.rank, self.rank))
        for F in self.factors:
            G *= F.T @ F
        return G

    def norm(self) -> float:
        w = self.weights
        return float(np.sqrt(max(w @ self.gram() @ w, 0.0)))

    def restrict(self, index_sets) -> "CPTensor":
        return CPTensor([F[np.asarray(J, dtype=np.int64)] for F, J in zip(self.factors, index_sets)],
                        self.weights)


def cp_materialize(T: CPTensor, max_entries=None) -> np.ndarray:
    check_size(T.shape, max_entries)
    out = T.factors[0] * T.weights
    if T.ndim == 1:
        return out.sum(axis=1)
    for F in T.factors[1:-1]:
        out = (out[:, None, :] * F[None, :, :]).reshape(-1, T.rank)
    return (out @ T.factors[-1].T).reshape(T.shape)


def cp_flatten_gram(T: CPTensor, mode: int) -> np.ndarray:
    """Gram matrix of the columns of the mode-``mode`` column flattening.

    Equals ``H_i (w w^T * prod_{j != i} H_j^T H_j) H_i^T`` and never touches
    the full tensor.
    """
    _check_modes([mode], T.ndim)
    W = np.outer(T.weights, T.weights)
    for j, F in enumerate(T.factors):
        if j != mode:
            W = W * (F.T @ F)
    H = T.factors[mode]
    return H @ W @ H.T


# --------------------------------------------------------------------------- Tucker


Core = Union[np.ndarray, SparseTensor, CPTensor]


@dataclass(frozen=True, eq=False)
class TuckerTensor:
    """Core tensor contracted with one satellite matrix (n_i x k_i) per mode."""

    core: Core
    satellites: tuple = field(default_factory=tuple)

    def __post_init__(self):
        sats = tuple(np.atleast_2d(np.asarray(U, dtype=float)) for U in self.satellites)
        core = self.core
        if isinstance(core, np.ndarray) or np.isscalar(core):
            core = np.asarray(core, dtype=float)
        cshape = core.shape
        if len(cshape) != len(sats):
            raise InvalidArgumentError("need one satellite per core mode")
        for i, (U, k) in enumerate(zip(sats, cshape)):
            if U.shape[1] != k:
                raise InvalidArgumentError(
                    f"satellite {i} has {U.shape[1]} columns but core mode has extent {k}"
                )
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "satellites", sats)

    @property
    def shape(self) -> tuple:
        return tuple(U.shape[0] for U in self.satellites)

    @property
    def ranks(self) -> tuple:
        return tuple(U.shape[1] for U in self.satellites)

    @property
    def ndim(self) -> int:
        return len(self.satellites)

    def to_dense(self, max_entries=None) -> np.ndarray:
        return tucker_reconstruct(self, max_entries)


def dense_core(core: Core, max_entries=None) -> np.ndarray:
    if isinstance(core, SparseTensor):
        return core.to_dense(max_entries)
    if isinstance(core, CPTensor):
        return cp_materialize(core, max_entries)
    return np.asarray(core, dtype=float)


def tucker_reconstruct(A: TuckerTensor, max_entries=None) -> np.ndarray:
    check_size(A.shape, max_entries)
    if isinstance(A.core, CPTensor):
        return cp_materialize(
            CPTensor([U @ F for U, F in zip(A.satellites, A.core.factors)], A.core.weights),
            max_entries,
        )
    out = dense_core(A.core, max_entries)
    # contract the largest shrinkage first to keep intermediates small
    for i in np.argsort([U.shape[0] / max(U.shape[1], 1) for U in A.satellites]):
        out = mode_contract(out, int(i), A.satellites[i])
    return out


def materialize(T, max_entries=None) -> np.ndarray:
    """Dense form of any supported tensor type."""
    if isinstance(T, (SparseTensor, CPTensor, TuckerTensor)):
        return T.to_dense(max_entries)
    return np.asarray(T, dtype=float)


def tensor_shape(T) -> tuple:
    return tuple(np.shape(T)) if isinstance(T, np.ndarray) else tuple(T.shape)
