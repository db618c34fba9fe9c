"""Reconstruction error, exact and sketched, and a truncated HOSVD reference."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgumentError, ResourceLimitError
from .rng import as_seed
from .satid import pinv
from .sketch import KFJLT
from .tensors import (MAX_DENSE_ENTRIES, CPTensor, SparseTensor, TuckerTensor, check_size, flatten,
                      materialize, mode_contract, tensor_shape)


@dataclass
class ErrorReport:
    absolute_error: float
    relative_error: float
    method: str = "exact"
    sketch_dim: int | None = None
    seed: int | None = None
    per_mode_errors: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {"absoluteError": self.absolute_error, "relativeError": self.relative_error,
               "method": self.method}
        if self.method == "sketched":
            out["sketchDim"] = self.sketch_dim
            out["seed"] = self.seed
        if self.per_mode_errors:
            out["perModeErrors"] = list(self.per_mode_errors)
        return out


# --------------------------------------------------------------------------- structured algebra


def _tucker_parts(A: TuckerTensor):
    """(dense core, satellites) or a CPTensor when the core is CP."""
    if isinstance(A.core, CPTensor):
        return CPTensor([U @ H for U, H in zip(A.satellites, A.core.factors)], A.core.weights)
    core = A.core.to_dense() if isinstance(A.core, SparseTensor) else np.asarray(A.core, dtype=float)
    return core, list(A.satellites)


def _canon(X):
    if isinstance(X, TuckerTensor):
        parts = _tucker_parts(X)
        return parts if isinstance(parts, CPTensor) else TuckerTensor(*parts)
    if isinstance(X, (SparseTensor, CPTensor)):
        return X
    return np.asarray(X, dtype=float)


def _tucker_at(A: TuckerTensor, coords, chunk=2048) -> np.ndarray:
    """Entries of a Tucker tensor (dense core) at integer coordinates."""
    out = np.empty(coords.shape[0])
    C = np.asarray(A.core)
    for s in range(0, coords.shape[0], chunk):
        c = coords[s:s + chunk]
        Z = np.broadcast_to(C, (c.shape[0],) + C.shape)
        for i, U in enumerate(A.satellites):
            rows = U[c[:, i]]  # b x k_i
            Z = np.einsum("bk...,bk->b...", Z, rows)
        out[s:s + chunk] = Z
    return out


def _cp_at(T: CPTensor, coords) -> np.ndarray:
    P = np.ones((coords.shape[0], T.rank))
    for i, F in enumerate(T.factors):
        P *= F[coords[:, i]]
    return P @ T.weights


def _tucker_project(C, mats):
    for i, M in enumerate(mats):
        C = mode_contract(C, i, M)
    return C


def inner(X, Y) -> float:
    """Frobenius inner product of two tensors in any supported format."""
    X, Y = _canon(X), _canon(Y)
    if tensor_shape(X) != tensor_shape(Y):
        raise InvalidArgumentError(f"shape mismatch {tensor_shape(X)} vs {tensor_shape(Y)}")
    order = (np.ndarray, SparseTensor, CPTensor, TuckerTensor)
    rank = lambda Z: next(i for i, t in enumerate(order) if isinstance(Z, t))
    if rank(X) > rank(Y):
        X, Y = Y, X
    if isinstance(X, np.ndarray):
        return float(np.sum(X * materialize(Y)))
    if isinstance(X, SparseTensor):
        if isinstance(Y, SparseTensor):
            both = SparseTensor(X.shape, np.vstack([X.coords, Y.coords]),
                                np.concatenate([X.values, Y.values]))
            return 0.5 * (both.norm() ** 2 - X.norm() ** 2 - Y.norm() ** 2)
        if isinstance(Y, CPTensor):
            return float(X.values @ _cp_at(Y, X.coords))
        return float(X.values @ _tucker_at(Y, X.coords))
    if isinstance(X, CPTensor):
        if isinstance(Y, CPTensor):
            G = np.ones((X.rank, Y.rank))
            for A, B in zip(X.factors, Y.factors):
                G *= A.T @ B
            return float(X.weights @ G @ Y.weights)
        small = CPTensor([U.T @ H for U, H in zip(Y.satellites, X.factors)], X.weights).to_dense()
        return float(np.sum(small * Y.core))
    G = [U.T @ V for U, V in zip(X.satellites, Y.satellites)]
    return float(np.sum(_tucker_project(np.asarray(X.core), [g.T for g in G]) * Y.core))


def norm_sq(X) -> float:
    X = _canon(X)
    if isinstance(X, np.ndarray):
        return float(np.sum(X * X))
    if isinstance(X, SparseTensor):
        return X.norm() ** 2
    if isinstance(X, CPTensor):
        return X.norm() ** 2
    G = [U.T @ U for U in X.satellites]
    return float(max(np.sum(_tucker_project(X.core, G) * X.core), 0.0))


# --------------------------------------------------------------------------- error


def exact_rel_error(T, approx, max_entries=None, structured: bool | None = None) -> ErrorReport:
    """Frobenius error ``||T - approx||`` and its ratio to ``||T||``.

    Both tensors are materialized when they fit under the entry cap, which is
    the accurate path; otherwise the expansion
    ``||T||^2 - 2<T, approx> + ||approx||^2`` is evaluated with structured
    inner products (subject to cancellation when the error is tiny).
    """
    shape = tensor_shape(T)
    if tensor_shape(approx) != shape:
        raise InvalidArgumentError(f"approximation shape {tensor_shape(approx)} != {shape}")
    cap = MAX_DENSE_ENTRIES if max_entries is None else max_entries
    if structured is None:
        structured = math.prod(shape) > cap
    nrm = math.sqrt(norm_sq(T))
    if structured:
        err2 = norm_sq(T) - 2 * inner(T, approx) + norm_sq(approx)
        err = math.sqrt(max(err2, 0.0))
    else:
        check_size(shape, cap)
        err = float(np.linalg.norm(materialize(T, cap) - materialize(approx, cap)))
    rel = err / nrm if nrm > 0 else (0.0 if err == 0 else math.inf)
    return ErrorReport(err, rel)


def sketch_tensor(S: KFJLT, X) -> np.ndarray:
    """``S vec(X)`` for a KFJLT over the full tensor shape, exploiting structure."""
    X = _canon(X)
    if isinstance(X, SparseTensor):
        return S.apply_coo(X.coords, X.values)
    if isinstance(X, CPTensor):
        return S.apply_cp(list(X.factors), X.weights).sum(axis=1)
    if isinstance(X, np.ndarray):
        grid = np.indices(X.shape).reshape(X.ndim, -1).T
        return S.apply_coo(grid, X.reshape(-1))
    rows = [S.transform_factor(i, U)[S.rows[:, i]] for i, U in enumerate(X.satellites)]
    m = S.out_dim
    Z = np.broadcast_to(np.asarray(X.core, dtype=float), (m,) + np.shape(X.core))
    for R in rows:
        Z = np.einsum("bk...,bk->b...", Z, R)
    return S.scale * Z


def sketched_rel_error(T, approx, m: int = 200, seed=0) -> ErrorReport:
    """Estimate ``||T - approx|| / ||T||`` from one shared KFJLT of both tensors."""
    if m < 1:
        raise InvalidArgumentError("sketch dimension must be positive")
    shape = tensor_shape(T)
    if tensor_shape(approx) != shape:
        raise InvalidArgumentError(f"approximation shape {tensor_shape(approx)} != {shape}")
    key = as_seed(seed)
    S = KFJLT(shape, m, key)
    sT = sketch_tensor(S, T)
    diff = sT - sketch_tensor(S, approx)
    err = float(np.linalg.norm(diff))
    nrm = float(np.linalg.norm(sT))
    rel = err / nrm if nrm > 0 else (0.0 if err == 0 else math.inf)
    return ErrorReport(err, rel, "sketched", m, key.seed)


def projection_errors(T, satellites) -> list:
    """Per-mode interpolation errors ``||A_i - T_i T_i^+ A_i||`` with ``A_i = mat_{i,.} T``."""
    T = np.asarray(T, dtype=float)
    out = []
    for i, S in enumerate(satellites):
        A = flatten(T, [i])
        S = np.asarray(S, dtype=float)
        out.append(float(np.linalg.norm(A - S @ (pinv(S) @ A))))
    return out


# --------------------------------------------------------------------------- HOSVD


def hosvd_baseline(T, ranks, mode_order=None, max_entries=None) -> TuckerTensor:
    """Sequentially truncated HOSVD: leading singular vectors per mode, projected core."""
    T = np.asarray(materialize(T, max_entries), dtype=float)
    d = T.ndim
    ranks = [int(k) for k in ranks]
    if len(ranks) != d or any(not 0 <= k <= n for k, n in zip(ranks, T.shape)):
        raise InvalidArgumentError(f"invalid ranks {ranks} for shape {T.shape}")
    order = range(d) if mode_order is None else mode_order
    core = T
    U = [None] * d
    for i in order:
        A = flatten(core, [i])
        u, _, _ = np.linalg.svd(A, full_matrices=False)
        U[i] = u[:, :ranks[i]]
        core = mode_contract(core, i, U[i].T)
    return TuckerTensor(core, U)


def truncation_tails(T, ranks) -> list:
    """Per-mode optimal rank-``k_i`` truncation errors of ``mat_{i,.} T``."""
    T = np.asarray(T, dtype=float)
    out = []
    for i, k in enumerate(ranks):
        s = np.linalg.svd(flatten(T, [i]), compute_uv=False)
        out.append(float(np.sqrt(np.sum(s[k:] ** 2))))
    return out


__all__ = [
    "ErrorReport", "ResourceLimitError", "exact_rel_error", "hosvd_baseline", "inner", "norm_sq",
    "projection_errors", "sketch_tensor", "sketched_rel_error", "truncation_tails",
]
