"""Core interpolative decomposition with the adaptive sequential approach.

The core of the approximation is the subtensor ``T[J_1, ..., J_d]`` and the
satellites are ``X_i^T`` (``n_i x k_i``). Modes are processed one at a time;
the selection for mode ``i`` runs on the column flattening of the tensor
already reconstructed on the processed modes. Only the triangular factor
``L`` of the row-wise QR ``X = L Q`` is carried forward, since the
orthonormal factor does not change any column norm or Gram matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgumentError
from .matrix_id import (DEFAULT_TOL, Method, coeffs_from_gram, gram_select,
                        interpolation_coeffs, matrix_id, select_columns,
                        sketched_matrix_id)
from .rng import as_seed
from .sketch import KFJLT, TensorSketch, sparse_sketch_network
from .tensors import (CPTensor, SparseTensor, TuckerTensor, cp_flatten_gram,
                      flatten, mode_contract, tensor_shape)


@dataclass
class CoreIDResult:
    index_sets: list
    coeffs: list  # X_i, k_i x n_i
    lfactors: list  # L_i, k_i x k_i lower triangular
    mode_order: list = field(default_factory=list)

    @property
    def ranks(self) -> tuple:
        return tuple(len(J) for J in self.index_sets)


def row_lq(X: np.ndarray):
    """``X = L Q`` with ``L`` lower triangular and ``Q`` having orthonormal rows."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        return np.zeros((0, 0)), np.zeros((0, X.shape[1]))
    Qt, R = np.linalg.qr(X.T)
    return R.T, Qt.T


def _resolve(shape, ranks, mode_order):
    d = len(shape)
    ranks = [int(k) for k in ranks]
    if len(ranks) != d:
        raise InvalidArgumentError(f"expected {d} ranks, got {len(ranks)}")
    for k, n in zip(ranks, shape):
        if not 0 <= k <= n:
            raise InvalidArgumentError(f"rank {k} exceeds mode extent {n}")
    order = list(range(d)) if mode_order is None else [int(i) for i in mode_order]
    if sorted(order) != list(range(d)):
        raise InvalidArgumentError(f"mode order {order} is not a permutation of range({d})")
    return ranks, order


def _empty_result(shape, order):
    d = len(shape)
    return CoreIDResult([[] for _ in range(d)], [np.zeros((0, n)) for n in shape],
                        [np.zeros((0, 0)) for _ in range(d)], order)


def coreid_dense(T, ranks, method="normmax", sketch=None, sketch_dim=None,
                 mode_order=None, seed=None, tol=DEFAULT_TOL) -> CoreIDResult:
    """Adaptive sequential CoreID of a dense tensor.

    ``sketch`` selects an unstructured sketch (``"gaussian"``, ``"srht"``,
    ``"countsketch"``) applied once per mode; ``None`` runs the selection on
    the exact flattening.
    """
    T = np.asarray(T, dtype=float)
    ranks, order = _resolve(T.shape, ranks, mode_order)
    key = as_seed(seed)
    res = _empty_result(T.shape, order)
    stage = T
    for step, i in enumerate(order):
        A = flatten(stage, [j for j in range(T.ndim) if j != i])
        mode_key = key.child(step)
        if sketch is None:
            sel = matrix_id(A, ranks[i], method, tol, mode_key.generator())
        else:
            sel = sketched_matrix_id(A, ranks[i], method, sketch, sketch_dim, mode_key, tol)
        L, _ = row_lq(sel.coeffs)
        res.index_sets[i], res.coeffs[i], res.lfactors[i] = sel.indices, sel.coeffs, L
        stage = mode_contract(np.take(stage, sel.indices, axis=i), i, L.T)
    return res


def coreid_independent(T, ranks, method="nuclear", seed=None, tol=DEFAULT_TOL) -> CoreIDResult:
    """Independent per-mode selection on the original flattenings (no adaptivity).

    Kept as a reference point: its error is not controlled by the per-mode
    ID errors.
    """
    T = np.asarray(T, dtype=float)
    ranks, order = _resolve(T.shape, ranks, None)
    key = as_seed(seed)
    res = _empty_result(T.shape, order)
    for i in range(T.ndim):
        A = flatten(T, [j for j in range(T.ndim) if j != i])
        sel = matrix_id(A, ranks[i], method, tol, key.child(i).generator())
        res.index_sets[i], res.coeffs[i] = sel.indices, sel.coeffs
        res.lfactors[i] = row_lq(sel.coeffs)[0]
    return res


def coreid_cp(T: CPTensor, ranks, method="normmax", sketch_dim=128, sketch="kfjlt",
              mode_order=None, seed=None, tol=DEFAULT_TOL, refit: bool = False) -> CoreIDResult:
    """CoreID of a CP tensor without forming it.

    With ``sketch_dim=None`` the selection uses the exact flattening Gram
    matrix; otherwise a KFJLT (or tensor sketch) of the flattening. After mode
    ``i`` is processed its factor becomes ``L_i^T H_i[J_i]``, so the stage
    tensor stays in CP form. Coefficients are solved on the sketch unless
    ``refit`` is set, which recomputes them from the exact flattening Gram
    matrix (``O(p^2)`` memory).
    """
    ranks, order = _resolve(T.shape, ranks, mode_order)
    key = as_seed(seed)
    res = _empty_result(T.shape, order)
    factors = list(T.factors)
    w = T.weights
    for step, i in enumerate(order):
        mode_key = key.child(step)
        rng = mode_key.child(1).generator()
        others = [factors[j] for j in range(T.ndim) if j != i]
        if sketch_dim is None:
            K = cp_flatten_gram(CPTensor(factors, w), i)
            sel = gram_select(K, ranks[i], method, tol, rng)
            X = coeffs_from_gram(K, sel.indices)
        else:
            dims = tuple(F.shape[0] for F in others)
            if sketch == "kfjlt":
                Y = KFJLT(dims, sketch_dim, mode_key).apply_cp(others, w)
            elif sketch == "tensorsketch":
                Y = TensorSketch(dims, sketch_dim, mode_key).apply_cp(others, w)
            else:
                raise InvalidArgumentError(f"unknown CP sketch {sketch!r}")
            B = Y @ factors[i].T
            sel = select_columns(B, ranks[i], method, tol, rng)
            if refit:
                X = coeffs_from_gram(cp_flatten_gram(CPTensor(factors, w), i), sel.indices)
            else:
                X = interpolation_coeffs(B, sel.indices)
        L, _ = row_lq(X)
        res.index_sets[i], res.coeffs[i], res.lfactors[i] = sel.indices, X, L
        factors[i] = L.T @ factors[i][sel.indices]
    return res


def coreid_sparse(T: SparseTensor, ranks, method="normmax", dims=(400, 400, 2000),
                  mode_order=None, seed=None, outer="srht", tol=DEFAULT_TOL) -> CoreIDResult:
    """CoreID of a sparse tensor using the composed sketch network per mode."""
    ranks, order = _resolve(T.shape, ranks, mode_order)
    key = as_seed(seed)
    res = _empty_result(T.shape, order)
    processed = []
    for step, i in enumerate(order):
        mode_key = key.child(step)
        B = sparse_sketch_network(T, processed, i, dims, mode_key, outer)
        sel = select_columns(B, ranks[i], method, tol, mode_key.child(7).generator())
        X = interpolation_coeffs(B, sel.indices)
        L, _ = row_lq(X)
        res.index_sets[i], res.coeffs[i], res.lfactors[i] = sel.indices, X, L
        processed.append((i, list(sel.indices), L))
    return res


def coreid_reconstruct(source, result: CoreIDResult) -> TuckerTensor:
    """Tucker form ``tucker(T[J_1, ..., J_d], X_1^T, ..., X_d^T)``."""
    shape = tensor_shape(source)
    if len(result.index_sets) != len(shape):
        raise InvalidArgumentError("result order does not match the source tensor")
    for J, X, n in zip(result.index_sets, result.coeffs, shape):
        if X.shape != (len(J), n):
            raise InvalidArgumentError("coefficient shape inconsistent with source")
        if len(J) and (min(J) < 0 or max(J) >= n):
            raise InvalidArgumentError("selected index out of range")
    J = [np.asarray(j, dtype=np.int64) for j in result.index_sets]
    if isinstance(source, SparseTensor):
        core = source.subtensor(J)
    elif isinstance(source, CPTensor):
        core = source.restrict(J)
    else:
        core = np.asarray(source, dtype=float)[np.ix_(*J)]
    return TuckerTensor(core, [X.T for X in result.coeffs])


def stage_reconstructions(T, result: CoreIDResult) -> list:
    """Dense stage tensors ``T_1 = T, T_{s+1} = T[J_1..J_s] x X^T ...`` in mode order."""
    T = np.asarray(T, dtype=float)
    out = [T]
    done = []
    for i in result.mode_order:
        done.append(i)
        cur = T
        for j in done:
            cur = np.take(cur, result.index_sets[j], axis=j)
        for j in done:
            cur = mode_contract(cur, j, result.coeffs[j].T)
        out.append(cur)
    return out


__all__ = [
    "CoreIDResult", "Method", "coreid_cp", "coreid_dense", "coreid_independent",
    "coreid_reconstruct", "coreid_sparse", "row_lq", "stage_reconstructions",
]
