"""Satellite interpolative decomposition.

Satellites are verbatim fibers: the columns of ``T_i`` are columns of the
flattening ``mat_{i,.} T`` whose column multi-index runs over the other modes
in ascending order (row-major). Each mode is selected independently and the
core is the least-squares optimum ``tucker(T, T_1^+, ..., T_d^+)``.

CP inputs sample fibers by marginalizing one mode of the multi-index at a
time, so the ``prod_{j != i} n_j`` candidate columns are never enumerated.
Sparse inputs either score all nonzero columns directly or, when the tensor
is large relative to the sketch, marginalize with count-sketched scores.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .exceptions import InvalidArgumentError
from .matrix_id import DEFAULT_TOL, Method, _orthonormalize, matrix_id
from .rng import as_generator, as_seed
from .sketch import KFJLT, CountSketch
from .tensors import (CPTensor, SparseTensor, TuckerTensor, check_size, flatten,
                      mode_contract)


@dataclass
class SatIDResult:
    index_sets: list  # per mode, list of multi-index tuples over the other modes
    satellites: list  # T_i, n_i x k_i
    core: object = None
    traces: list = field(default_factory=list)

    @property
    def ranks(self) -> tuple:
        return tuple(len(J) for J in self.index_sets)

    def tucker(self) -> TuckerTensor:
        return TuckerTensor(self.core, self.satellites)


def pinv(A: np.ndarray) -> np.ndarray:
    """Pseudo-inverse, truncating singular values below ``max(shape) * eps * sigma_max``."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.zeros(A.shape[::-1])
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cut = max(A.shape) * np.finfo(float).eps * s[0]
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return (Vt.T * inv) @ U.T


def _draw(g, weights) -> int:
    """Index drawn with probability proportional to nonnegative ``weights``."""
    c = np.cumsum(weights)
    return int(min(np.searchsorted(c, g.random() * c[-1], "right"), c.shape[0] - 1))


def _other_modes(d, i):
    return [j for j in range(d) if j != i]


def _check_ranks(ranks, shape):
    ranks = [int(k) for k in ranks]
    if len(ranks) != len(shape):
        raise InvalidArgumentError(f"expected {len(shape)} ranks, got {len(ranks)}")
    for i, k in enumerate(ranks):
        cols = math.prod(n for j, n in enumerate(shape) if j != i)
        if not 0 <= k <= cols:
            raise InvalidArgumentError(f"rank {k} exceeds the {cols} columns of mode {i}")
    return ranks


# --------------------------------------------------------------------------- core solve


def _sparse_core(T: SparseTensor, P: list, max_entries) -> np.ndarray:
    """``T x_1 P_1 ... x_d P_d`` for a sparse tensor, contracting one mode at a time.

    The partial result is kept as a dense (prod k_done x U) block against the
    U distinct coordinate tuples of the modes not yet contracted.
    """
    d = T.ndim
    W = T.values[None, :]
    coords = T.coords
    for i in range(d):
        k = P[i].shape[0]
        check_size((W.shape[0] * k, max(W.shape[1], 1)), max_entries)
        W = (W[:, None, :] * P[i][:, coords[:, 0]][None, :, :]).reshape(-1, coords.shape[0])
        rest = coords[:, 1:]
        if rest.shape[1]:
            uniq, inv = np.unique(rest, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
        else:
            uniq, inv = np.zeros((1, 0), dtype=np.int64), np.zeros(coords.shape[0], dtype=np.int64)
        G = sps.csr_matrix((np.ones(inv.shape[0]), (np.arange(inv.shape[0]), inv)),
                           shape=(inv.shape[0], uniq.shape[0]))
        W = np.asarray((G.T @ W.T).T) if W.shape[1] else np.zeros((W.shape[0], uniq.shape[0]))
        coords = uniq
    return W.reshape(tuple(p.shape[0] for p in P))


def solve_core(T, satellites, max_entries=None) -> np.ndarray:
    """Optimal dense core ``tucker(T, T_1^+, ..., T_d^+)`` for dense or sparse ``T``."""
    shape = T.shape if isinstance(T, SparseTensor) else np.shape(T)
    if len(satellites) != len(shape):
        raise InvalidArgumentError("need one satellite per mode")
    for S, n in zip(satellites, shape):
        if np.shape(S)[0] != n:
            raise InvalidArgumentError("satellite row count must equal the mode extent")
    P = [pinv(S) for S in satellites]
    check_size(tuple(p.shape[0] for p in P), max_entries)
    if isinstance(T, SparseTensor):
        if T.nnz == 0:
            return np.zeros(tuple(p.shape[0] for p in P))
        return _sparse_core(T, P, max_entries)
    C = np.asarray(T, dtype=float)
    # contract the modes with the largest reduction first
    for i in sorted(range(C.ndim), key=lambda j: P[j].shape[0] - shape[j]):
        C = mode_contract(C, i, P[i])
    return C


# --------------------------------------------------------------------------- dense


def column_multi_index(shape, mode: int, cols) -> list:
    """Multi-indices (over the other modes, ascending) of flattening columns."""
    other = tuple(shape[j] for j in _other_modes(len(shape), mode))
    if not other:
        return [() for _ in cols]
    return [tuple(int(x) for x in t) for t in zip(*np.unravel_index(np.asarray(cols, dtype=np.int64), other))]


def fiber(T, mode: int, index) -> np.ndarray:
    """The mode-``mode`` fiber at multi-index ``index`` over the other modes."""
    index = list(index)
    if isinstance(T, SparseTensor):
        other = _other_modes(T.ndim, mode)
        m = np.all(T.coords[:, other] == np.asarray(index, dtype=np.int64), axis=1) if other else \
            np.ones(T.nnz, dtype=bool)
        out = np.zeros(T.shape[mode])
        out[T.coords[m, mode]] = T.values[m]
        return out
    if isinstance(T, CPTensor):
        w = T.weights.copy()
        for j, b in zip(_other_modes(T.ndim, mode), index):
            w = w * T.factors[j][b]
        return T.factors[mode] @ w
    T = np.asarray(T)
    sl = index[:mode] + [slice(None)] + index[mode:]
    return np.array(T[tuple(sl)], dtype=float)


def satid_dense(T, ranks, method="normmax", seed=None, tol: float = DEFAULT_TOL,
                solve: bool = True) -> SatIDResult:
    """Independent matrix ID of every ``mat_{i,.} T`` followed by the optimal core."""
    T = np.asarray(T, dtype=float)
    ranks = _check_ranks(ranks, T.shape)
    key = as_seed(seed)
    res = SatIDResult([], [])
    for i in range(T.ndim):
        A = flatten(T, [i])
        sel = matrix_id(A, ranks[i], method, tol, key.child(i).generator())
        res.index_sets.append(column_multi_index(T.shape, i, sel.indices))
        res.satellites.append(A[:, sel.indices])
        res.traces.append(sel.scores)
    if solve:
        res.core = solve_core(T, res.satellites)
    return res


satid_generic = satid_dense


# --------------------------------------------------------------------------- CP


def cp_index_scores(w, factors, S=None) -> np.ndarray:
    """Column scores ``||S mat_{.,1} cp(w, A_1, ..., A_l)[:, j]||^2`` for ``j`` in mode 1.

    ``S`` is ``None`` (exact, via Hadamard products of Gram matrices) or a
    KFJLT over the extents of ``A_2, ..., A_l``.
    """
    w = np.asarray(w, dtype=float)
    A1 = np.asarray(factors[0], dtype=float) * w
    rest = factors[1:]
    if not rest:
        return (A1 @ np.ones(w.shape[0])) ** 2
    if S is None:
        G = np.ones((w.shape[0], w.shape[0]))
        for F in rest:
            G *= F.T @ F
        return np.maximum(np.einsum("jp,pq,jq->j", A1, G, A1), 0.0)
    Y = S.apply_cp(list(rest))
    return np.sum((A1 @ Y.T) ** 2, axis=1)


def cp_sample_index(w, factors, S=None, rng=None, mask=None, tol: float = 0.0):
    """Sample an index of mode 1 proportionally to :func:`cp_index_scores`.

    Returns ``None`` when the (unmasked) mass is not above ``tol``.
    """
    d = cp_index_scores(w, factors, S)
    if mask is not None:
        d = np.where(mask, 0.0, d)
    total = d.sum()
    if not total > tol:
        return None
    g = as_generator(rng)
    return int(g.choice(d.shape[0], p=d / total))


def cp_joint_scores(T: CPTensor, mode: int, Hhat=None) -> np.ndarray:
    """Brute-force squared norms of all columns of ``mat_{mode,.}`` (residual if ``Hhat`` given)."""
    other = _other_modes(T.ndim, mode)
    H = T.factors[mode] if Hhat is None else Hhat
    fac = [T.factors[j] for j in other] + [H]
    dense = CPTensor(fac, T.weights).to_dense()
    return np.sum(dense.reshape(-1, H.shape[0]) ** 2, axis=1)


def cp_sample_mode(T: CPTensor, mode: int, k: int, m: int | None = 128, seed=None,
                   tol: float = DEFAULT_TOL):
    """Sample ``k`` fibers of a CP tensor along ``mode`` by marginalized norm sampling.

    Returns ``(J, T_i)`` with ``J`` a list of multi-indices over the other
    modes. ``m=None`` scores exactly; otherwise each marginal level uses a
    KFJLT of dimension ``m``, drawn once per level. Selected multi-indices
    are masked at the last level, and the deflation direction is normalized.
    """
    d = T.ndim
    if not 0 <= mode < d:
        raise InvalidArgumentError(f"mode {mode} out of range")
    other = _other_modes(d, mode)
    cols = math.prod(T.shape[j] for j in other)
    if not 0 <= k <= cols:
        raise InvalidArgumentError(f"cannot select {k} of {cols} columns")
    key = as_seed(seed)
    g = key.generator()
    H = T.factors[mode]
    Hhat = H.copy()
    sketches = []
    for lvl in range(len(other)):
        dims = tuple(T.shape[j] for j in other[lvl + 1:]) + (T.shape[mode],)
        sketches.append(None if m is None or lvl == len(other) - 1 else KFJLT(dims, m, key.child(lvl + 1)))
    total0 = cp_residual_mass(T, mode, Hhat)
    J, cols_out = [], []
    chosen = set()
    for _ in range(k):
        if cp_residual_mass(T, mode, Hhat) <= tol * total0:
            break
        w = T.weights.copy()
        b = []
        for lvl, s in enumerate(other):
            fac = [T.factors[s]] + [T.factors[j] for j in other[lvl + 1:]] + [Hhat]
            mask = None
            if lvl == len(other) - 1 and chosen:
                mask = np.array([tuple(b) + (j,) in chosen for j in range(T.shape[s])])
            j = cp_sample_index(w, fac, sketches[lvl], g, mask)
            if j is None:
                break
            b.append(j)
            w = w * T.factors[s][j]
        if len(b) < len(other):
            break
        q = _orthonormalize(Hhat @ w, np.zeros((H.shape[0], 0)))
        if q is None:
            break
        J.append(tuple(b))
        chosen.add(tuple(b))
        cols_out.append(H @ w)
        Hhat = Hhat - np.outer(q, q @ Hhat)
    Ti = np.column_stack(cols_out) if cols_out else np.zeros((H.shape[0], 0))
    return J, Ti


def cp_residual_mass(T: CPTensor, mode: int, Hhat) -> float:
    """``||(I - QQ^T) mat_{mode,.} T||_F^2`` for the deflated factor ``Hhat``."""
    G = Hhat.T @ Hhat
    for j in _other_modes(T.ndim, mode):
        G = G * (T.factors[j].T @ T.factors[j])
    w = T.weights
    return float(max(w @ G @ w, 0.0))


def satid_cp(T: CPTensor, ranks, m: int | None = 128, seed=None, tol: float = DEFAULT_TOL,
             dense_core: bool = False) -> SatIDResult:
    """SatID of a CP tensor; the core is ``cp(w, T_1^+ H_1, ..., T_d^+ H_d)``.

    A CP-rank reduction of the core would slot in after the core factors are
    formed; it is not performed here.
    """
    ranks = _check_ranks(ranks, T.shape)
    key = as_seed(seed)
    res = SatIDResult([], [])
    for i in range(T.ndim):
        J, Ti = cp_sample_mode(T, i, ranks[i], m, key.child(i), tol)
        res.index_sets.append(J)
        res.satellites.append(Ti)
    core = CPTensor([pinv(S) @ H for S, H in zip(res.satellites, T.factors)], T.weights)
    res.core = core.to_dense() if dense_core else core
    return res


# --------------------------------------------------------------------------- sparse


def _linear_keys(coords, dims):
    """Distinct rows of ``coords`` in lexicographic order and the inverse map."""
    if coords.shape[1] == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(coords.shape[0], dtype=np.int64)
    dims = tuple(int(x) for x in dims)
    if math.prod(dims) < 2**62:
        lin = np.ravel_multi_index(tuple(coords.T), dims)
        u, inv = np.unique(lin, return_inverse=True)
        return np.stack(np.unravel_index(u, dims), axis=1), inv.reshape(-1)
    keys, inv = np.unique(coords, axis=0, return_inverse=True)
    return keys, inv.reshape(-1)


@dataclass
class _Columns:
    """The nonzero columns of a sparse flattening ``mat_{mode,.}``."""

    keys: np.ndarray  # ncols x (d-1) multi-indices, lexicographic
    A: sps.csc_matrix  # n_mode x ncols


def _sparse_columns(T: SparseTensor, mode: int) -> _Columns:
    other = _other_modes(T.ndim, mode)
    if T.nnz == 0:
        return _Columns(np.zeros((0, len(other)), dtype=np.int64), sps.csc_matrix((T.shape[mode], 0)))
    keys, inv = _linear_keys(T.coords[:, other], [T.shape[j] for j in other])
    A = sps.csc_matrix((T.values, (T.coords[:, mode], inv)), shape=(T.shape[mode], keys.shape[0]))
    return _Columns(keys, A)


def sparse_select_direct(T: SparseTensor, mode: int, k: int, method="normmax",
                         tol: float = DEFAULT_TOL, rng=None):
    """Fiber selection on ``mat_{mode,.} T`` with O(nnz) score downdates.

    Only nonzero columns are candidates. Returns ``(J, T_i, trace)`` where
    ``trace`` holds the selected scores.
    """
    method = Method.parse(method)
    if method not in (Method.NORM_MAX, Method.NORM_SAMPLE):
        raise InvalidArgumentError("sparse direct selection supports normmax and normsample")
    if not 0 <= mode < T.ndim:
        raise InvalidArgumentError(f"mode {mode} out of range")
    if k < 0:
        raise InvalidArgumentError("k must be nonnegative")
    cols = _sparse_columns(T, mode)
    A = cols.A
    n = T.shape[mode]
    scores = np.asarray(A.multiply(A).sum(axis=0)).reshape(-1)
    total = float(scores.sum())
    g = as_generator(rng)
    Q = np.zeros((n, 0))
    J, fibers, trace = [], [], []
    AT = A.T.tocsr()
    for _ in range(k):
        dd = np.maximum(scores, 0.0)
        if not dd.size or dd.max() <= tol * total:
            break
        j = int(np.argmax(dd)) if method is Method.NORM_MAX else _draw(g, dd)
        a = np.zeros(n)
        a[A.indices[A.indptr[j]:A.indptr[j + 1]]] = A.data[A.indptr[j]:A.indptr[j + 1]]
        q = _orthonormalize(a, Q)
        if q is None:
            break
        J.append(tuple(int(x) for x in cols.keys[j]))
        fibers.append(a)
        trace.append(float(dd[j]))
        Q = np.column_stack([Q, q])
        scores = scores - (AT @ q) ** 2
        scores[j] = 0.0
    Ti = np.column_stack(fibers) if fibers else np.zeros((n, 0))
    return J, Ti, trace


def sparse_direct_scores(T: SparseTensor, mode: int, Q=None):
    """From-scratch residual scores of every nonzero column (keys, scores)."""
    cols = _sparse_columns(T, mode)
    D = cols.A.toarray()
    if Q is not None and np.shape(Q)[1]:
        D = D - Q @ (Q.T @ D)
    return cols.keys, np.sum(D * D, axis=0)


def sparse_select_sketched(T: SparseTensor, mode: int, k: int, m: int | None = 16, seed=None,
                           threshold: float = 1.0, policy: str = "auto", tol: float = DEFAULT_TOL):
    """Fiber selection by marginalized norm sampling with count-sketched scores.

    The multi-index over the other modes (ascending) is drawn one mode at a
    time. At level ``s`` the current slice is count-sketched over the modes
    after ``s`` when ``policy="auto"`` and
    ``nnz(slice) > threshold * m * n_s * n_mode``, or always with
    ``policy="always"``; otherwise the rest of the multi-index is sampled
    jointly from exact residual scores. One sketch is drawn per level.
    ``m=None`` uses an injective count sketch of full dimension, which makes
    every marginal exact. Returns ``(J, T_i)``.
    """
    if policy not in ("auto", "always", "never"):
        raise InvalidArgumentError(f"unknown sketch policy {policy!r}")
    if not 0 <= mode < T.ndim:
        raise InvalidArgumentError(f"mode {mode} out of range")
    other = _other_modes(T.ndim, mode)
    dims = [T.shape[j] for j in other]
    if not 0 <= k <= math.prod(dims):
        raise InvalidArgumentError(f"cannot select {k} columns")
    n = T.shape[mode]
    if T.nnz == 0 or k == 0:
        return [], np.zeros((n, 0))
    key = as_seed(seed)
    g = key.generator()
    total = float(np.sum(T.values ** 2))
    # gathering through the first-mode sort order doubles as the working copy;
    # level s of the multi-index is column other[s] of C
    o = np.argsort(T.coords[:, other[0]], kind="stable")
    C, V = np.take(T.coords, o, axis=0), T.values[o]
    tgt = C[:, mode]
    cols = np.asarray(other)
    L = len(other)
    big = math.prod(dims) >= 2**62
    sketches = {}

    def sort_range(a, b, lvl):
        # a range with a fixed prefix is sorted by its next mode on demand, so
        # every prefix slice stays a contiguous range
        o = np.argsort(C[a:b, other[lvl]], kind="stable")
        C[a:b], V[a:b] = C[a:b][o], V[a:b][o]

    def width(lvl):
        return m if m is not None else math.prod(dims[lvl + 1:])

    def use_sketch(nnz, lvl):
        if lvl >= L - 1:
            return False
        if policy != "auto":
            return policy == "always"
        return nnz > threshold * width(lvl) * dims[lvl] * n

    def sketch_level(a, b, lvl):
        """Dense (n_s, width, n) count sketch of the slice over the modes after ``s``."""
        if lvl not in sketches:
            sketches[lvl] = CountSketch(width(lvl), tuple(dims[lvl + 1:]), key.child(lvl + 1),
                                        injective=m is None)
        S = sketches[lvl]
        rest = C[a:b][:, cols[lvl + 1:]]
        w = S.m
        bk, sg = S.bucket_sign(rest)
        idx = (C[a:b, other[lvl]] * w + bk) * n + tgt[a:b]
        Y = np.bincount(idx, V[a:b] * sg, minlength=dims[lvl] * w * n)
        return Y.reshape(dims[lvl], w, n)

    Q = np.zeros((n, 0))
    chosen = []

    def level_scores(Y):
        s = np.einsum("jab,jab->j", Y, Y)
        if Q.shape[1]:
            YQ = Y @ Q
            s = s - np.einsum("jab,jab->j", YQ, YQ)
        return np.maximum(s, 0.0)

    blocks = {}

    def block(a, b, lvl):
        # the columns of a slice never change, only Q does
        if (a, b) not in blocks:
            sub = tuple(dims[lvl:])
            P = math.prod(sub)
            if big:
                keys, inv = _linear_keys(C[a:b][:, cols[lvl:]], sub)
            else:
                lin = C[a:b, other[-1]] if lvl == L - 1 else \
                    np.ravel_multi_index(tuple(C[a:b][:, cols[lvl:]].T), sub)
                if P <= 4 * (b - a) + 256:
                    # small index space: bucket by counting instead of sorting
                    present = np.bincount(lin, minlength=P) > 0
                    keys = np.flatnonzero(present)
                    inv = (np.cumsum(present) - 1)[lin]
                else:
                    keys, inv = np.unique(lin, return_inverse=True)
            nk = keys.shape[0]
            blocks[a, b] = keys, np.bincount(inv * n + tgt[a:b], V[a:b], minlength=nk * n).reshape(nk, n).T
        return blocks[a, b]

    taken = {}  # prefix -> suffixes of chosen multi-indices under it

    def direct(a, b, prefix, lvl):
        sub = tuple(dims[lvl:])
        keys, D = block(a, b, lvl)
        lin = None if big else keys
        R = D - Q @ (Q.T @ D) if Q.shape[1] else D
        d = np.einsum("ij,ij->j", R, R)
        sufs = taken.get(prefix)
        if sufs:
            if lin is None:
                for suf in sufs:
                    d[np.all(keys == np.asarray(suf), axis=1)] = 0.0
            else:
                want = np.ravel_multi_index(tuple(np.asarray(sufs).T), sub)
                pos = np.minimum(np.searchsorted(keys, want), keys.shape[0] - 1)
                d[pos[keys[pos] == want]] = 0.0
        if not d.sum() > tol * total:
            return None
        c = _draw(g, d)
        rest = keys[c] if lin is None else np.unravel_index(keys[c], sub)
        return prefix + tuple(int(x) for x in rest), D[:, c]

    def sample(a, b, prefix, lvl, scores=None):
        if scores is None:
            if not use_sketch(b - a, lvl):
                return direct(a, b, prefix, lvl)
            scores = level_scores(sketch_level(a, b, lvl))
            sort_range(a, b, lvl)
        scores = scores.copy()
        col = C[a:b, other[lvl]]
        while scores.sum() > 0:
            j = _draw(g, scores)
            lo = a + int(np.searchsorted(col, j, "left"))
            hi = a + int(np.searchsorted(col, j, "right"))
            out = sample(lo, hi, prefix + (j,), lvl + 1) if hi > lo else None
            if out is not None:
                return out
            scores[j] = 0.0
        return None

    top = Y1 = None
    if use_sketch(T.nnz, 0):
        Y1 = sketch_level(0, T.nnz, 0)
        top = level_scores(Y1)
    fibers = []
    for _ in range(k):
        out = sample(0, T.nnz, (), 0, top)
        if out is None:
            break
        b, f = out
        q = _orthonormalize(f, Q)
        if q is None:
            break
        chosen.append(b)
        for lv in range(L):
            taken.setdefault(b[:lv], []).append(b[lv:])
        fibers.append(f)
        Q = np.column_stack([Q, q])
        if top is not None:
            Yq = Y1 @ q
            top = np.maximum(top - np.einsum("jb,jb->j", Yq, Yq), 0.0)
    Ti = np.column_stack(fibers) if fibers else np.zeros((n, 0))
    return chosen, Ti


def satid_sparse(T: SparseTensor, ranks, method="normmax", sketched: bool = False, m: int | None = 16,
                 threshold: float = 1.0, policy: str = "auto", seed=None, tol: float = DEFAULT_TOL,
                 solve: bool = True, max_entries=None) -> SatIDResult:
    """SatID of a sparse tensor with a dense core."""
    ranks = _check_ranks(ranks, T.shape)
    key = as_seed(seed)
    res = SatIDResult([], [])
    for i in range(T.ndim):
        if sketched:
            if Method.parse(method) is not Method.NORM_SAMPLE:
                raise InvalidArgumentError("sketched sparse selection is a norm-sampling method")
            J, Ti = sparse_select_sketched(T, i, ranks[i], m, key.child(i), threshold, policy, tol)
        else:
            J, Ti, _ = sparse_select_direct(T, i, ranks[i], method, tol, key.child(i).generator())
        res.index_sets.append(J)
        res.satellites.append(Ti)
    if solve:
        res.core = solve_core(T, res.satellites, max_entries)
    return res


def satid_reconstruct(result: SatIDResult) -> TuckerTensor:
    return TuckerTensor(result.core, result.satellites)


__all__ = [
    "SatIDResult", "column_multi_index", "cp_index_scores", "cp_joint_scores", "cp_sample_index",
    "cp_sample_mode", "fiber", "pinv", "satid_cp", "satid_dense", "satid_generic", "satid_reconstruct",
    "satid_sparse", "solve_core", "sparse_direct_scores", "sparse_select_direct", "sparse_select_sketched",
]
